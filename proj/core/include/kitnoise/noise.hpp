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

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "kitnoise/common.hpp"

namespace kitnoise {

// Finite-state Markov jump process. generator(m, n) is the rate n -> m,
// so columns sum to zero and dp/dt = L p.
struct JumpNoise {
    std::vector<double> states;
    Matrix generator;
    bool stationary_start = false;
    int initial_index = 0;

    int size() const { return static_cast<int>(states.size()); }
    // Largest total escape rate max_m |L_mm|.
    double max_rate() const;
};

struct NoiseStatistics {
    double mean = 0.0;
    double variance = 0.0;
    double correlation_time = 0.0;
};

// Two states {a, b}, rate kappa each way. Starts in a.
JumpNoise telegraph(double a, double b, double kappa);

// Sum of n_r independent telegraph fluctuators, kappa = 1/(2 tau_c).
// States ascend: X_k = (n_r - k) a' + k b', k = 0..n_r, with
// a' = mean/n_r - sigma/sqrt(n_r), b' = mean/n_r + sigma/sqrt(n_r).
// Starts in state 0.
JumpNoise discretized_gaussian(double mean, double sigma, double tau_c, int n_r);

// Validates the generator (shape, nonnegative off-diagonals, zero column sums).
void validate(const JumpNoise& noise);

// Null vector of L normalized to unit sum. Throws ParameterError naming the
// closed classes when the chain is reducible.
Vector stationary_distribution(const JumpNoise& noise);

// Fixed-index or stationary start, as configured.
Vector initial_distribution(const JumpNoise& noise);

// <X(t+tau) X(t)> - <X>^2 in the stationary state, via expm(L |tau|).
double autocorrelation(const JumpNoise& noise, double tau);

// Stationary mean and variance; correlation time = int_0^inf C(tau) dtau / C(0).
NoiseStatistics statistics(const JumpNoise& noise);

// Deterministic stream keyed by (seed, stream): std::mt19937_64 seeded
// through std::seed_seq, so trajectory k never depends on other streams.
class StreamRng {
  public:
    StreamRng(std::uint64_t seed, std::uint64_t stream);
    // Uniform in [0, 1) with 53 random bits.
    double uniform();
    // Exponential holding time with the given rate.
    double exponential(double rate);
    // Index drawn from unnormalized nonnegative weights.
    int categorical(const Vector& weights);

  private:
    std::mt19937_64 engine_;
};

// Piecewise-constant path: state states[k] on [times[k], times[k+1]).
struct NoiseTrajectory {
    std::vector<double> times;
    std::vector<int> states;
    double t_max = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    int state_at(double t) const;
    int switches() const { return static_cast<int>(times.size()) - 1; }
};

// Exact continuous-time sample (exponential holding times).
NoiseTrajectory sample_trajectory(const JumpNoise& noise, double t_max, std::uint64_t seed,
                                  std::uint64_t stream = 0);

}  // namespace kitnoise
