// Copyright 2026 The kitnoise Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <vector>

#include "kitnoise/network.hpp"

namespace kitnoise {

struct RampTarget {
    enum class Kind { SitePotential, BondScale };
    Kind kind = Kind::SitePotential;
    // Site index for SitePotential; bond endpoints (i, j) for BondScale.
    int i = 0;
    int j = -1;

    auto operator<=>(const RampTarget&) const = default;
};

// Offset on one target: a site potential U (adds U a^dag a) or an additive
// change of a bond's amplitude multiplier (1 + s).
struct Ramp {
    RampTarget target;
    double start = 0.0;
    double end = 0.0;
};

struct ScheduleStep {
    double duration = 0.0;
    std::vector<Ramp> ramps;
};

// Sequential steps; each ramp follows lambda(t) = sin^2(pi t / (2 T_f)).
// A target holds the start value of its first ramp before that ramp and the
// end value of its latest ramp afterwards.
class Schedule {
  public:
    Schedule() = default;
    explicit Schedule(std::vector<ScheduleStep> steps);

    void add_step(ScheduleStep step);
    const std::vector<ScheduleStep>& steps() const { return steps_; }
    bool empty() const { return steps_.empty(); }
    double total_duration() const;

    // Distinct targets in sorted order.
    std::vector<RampTarget> targets() const;
    // Offsets aligned with targets().
    std::vector<double> offsets(double t) const;
    // Largest |offset| each target ever takes, aligned with targets().
    std::vector<double> max_offsets() const;

    // Steps in reverse order with start and end swapped.
    Schedule reversed() const;
    // This schedule followed by other.
    Schedule then(const Schedule& other) const;

    // Throws GeometryError when a ramp refers to a missing site or bond.
    void validate(const WireNetwork& network) const;

    static double shape(double t, double t_f);

  private:
    std::vector<ScheduleStep> steps_;
};

}  // namespace kitnoise
