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

#include "kitnoise/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kitnoise {

Schedule::Schedule(std::vector<ScheduleStep> steps) {
    for (auto& s : steps) add_step(std::move(s));
}

void Schedule::add_step(ScheduleStep step) {
    if (!(step.duration > 0.0)) throw ParameterError("schedule step duration must be positive");
    steps_.push_back(std::move(step));
}

double Schedule::total_duration() const {
    double t = 0.0;
    for (const auto& s : steps_) t += s.duration;
    return t;
}

double Schedule::shape(double t, double t_f) {
    if (t <= 0.0) return 0.0;
    if (t >= t_f) return 1.0;
    const double s = std::sin(std::numbers::pi * t / (2.0 * t_f));
    return s * s;
}

std::vector<RampTarget> Schedule::targets() const {
    std::vector<RampTarget> out;
    for (const auto& s : steps_) {
        for (const auto& r : s.ramps) out.push_back(r.target);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<double> Schedule::offsets(double t) const {
    const std::vector<RampTarget> tg = targets();
    std::vector<double> value(tg.size(), 0.0);
    std::vector<bool> seen(tg.size(), false);
    auto index_of = [&](const RampTarget& r) {
        return static_cast<std::size_t>(std::lower_bound(tg.begin(), tg.end(), r) - tg.begin());
    };
    double t0 = 0.0;
    for (const auto& s : steps_) {
        for (const auto& r : s.ramps) {
            const std::size_t k = index_of(r.target);
            if (t < t0) {
                if (!seen[k]) value[k] = r.start;
            } else {
                value[k] = r.start + (r.end - r.start) * shape(t - t0, s.duration);
            }
            seen[k] = true;
        }
        t0 += s.duration;
    }
    return value;
}

std::vector<double> Schedule::max_offsets() const {
    const std::vector<RampTarget> tg = targets();
    std::vector<double> m(tg.size(), 0.0);
    for (const auto& s : steps_) {
        for (const auto& r : s.ramps) {
            const auto k = static_cast<std::size_t>(std::lower_bound(tg.begin(), tg.end(), r.target) - tg.begin());
            m[k] = std::max({m[k], std::abs(r.start), std::abs(r.end)});
        }
    }
    return m;
}

Schedule Schedule::reversed() const {
    Schedule out;
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
        ScheduleStep s = *it;
        for (auto& r : s.ramps) std::swap(r.start, r.end);
        out.steps_.push_back(std::move(s));
    }
    return out;
}

Schedule Schedule::then(const Schedule& other) const {
    Schedule out = *this;
    for (const auto& s : other.steps_) out.steps_.push_back(s);
    return out;
}

void Schedule::validate(const WireNetwork& network) const {
    for (const auto& s : steps_) {
        for (const auto& r : s.ramps) {
            if (r.target.kind == RampTarget::Kind::SitePotential) {
                if (r.target.i < 0 || r.target.i >= network.size()) {
                    throw GeometryError("schedule ramp refers to missing site " + std::to_string(r.target.i));
                }
            } else if (network.find_bond(r.target.i, r.target.j) < 0) {
                throw GeometryError("schedule ramp refers to missing bond (" + std::to_string(r.target.i) + ", " +
                                    std::to_string(r.target.j) + ")");
            }
        }
    }
}

}  // namespace kitnoise
