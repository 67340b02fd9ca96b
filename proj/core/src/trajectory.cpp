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

#include <algorithm>
#include <cmath>

#include "internal.hpp"
#include "kitnoise/dynamics.hpp"
#include "kitnoise/parallel.hpp"

namespace kitnoise {

namespace {

constexpr std::size_t kBlock = 32;

struct BlockResult {
    Matrix gamma_sum;
    InvariantReport report;
};

// Per-state normal forms and rotated observables for static Hamiltonians.
struct StaticBases {
    std::vector<NormalForm> nf;
    std::vector<Matrix> gamma0;                  // Q_m^T G0 Q_m
    std::vector<std::vector<Matrix>> weights;    // [state][observable], empty when not cached
    std::vector<std::vector<Matrix>> transition; // [to][from] = Q_to^T Q_from, empty when not cached
};

StaticBases prepare_static(const JumpNoise& noise, const DrivenHamiltonian& H, const Matrix& gamma0,
                           const std::vector<Observable>& observables, double t0) {
    StaticBases b;
    const int M = noise.size();
    const double n2 = static_cast<double>(H.dim()) * H.dim() * sizeof(double);
    for (int m = 0; m < M; ++m) {
        b.nf.push_back(normal_form(H.at(noise.states[m], t0).h));
        b.gamma0.push_back(b.nf[m].q.transpose() * gamma0 * b.nf[m].q);
    }
    const std::size_t linear = static_cast<std::size_t>(
        std::count_if(observables.begin(), observables.end(), [](const Observable& o) { return o.linear(); }));
    if (linear > 0 && M * static_cast<double>(linear) * n2 < 512.0 * 1024 * 1024) {
        b.weights.resize(M);
        for (int m = 0; m < M; ++m) {
            for (const auto& o : observables) {
                if (o.linear()) {
                    if (o.weight.rows() != H.dim() || o.weight.cols() != H.dim()) {
                        throw ParameterError("observable '" + o.name + "' has the wrong dimension");
                    }
                    b.weights[m].push_back(b.nf[m].q.transpose() * o.weight * b.nf[m].q);
                } else {
                    b.weights[m].emplace_back();
                }
            }
        }
    }
    if (static_cast<double>(M) * M * n2 < 256.0 * 1024 * 1024) {
        b.transition.resize(M);
        for (int to = 0; to < M; ++to) {
            for (int from = 0; from < M; ++from) {
                b.transition[to].push_back(b.nf[to].q.transpose() * b.nf[from].q);
            }
        }
    }
    return b;
}

class ParityTracker {
  public:
    ParityTracker(bool enabled, const Matrix& gamma0, InvariantReport& report)
        : enabled_(enabled), report_(report) {
        if (enabled_) reference_ = trajectory_parity(gamma0);
    }

    bool enabled() const { return enabled_; }

    void check(const Matrix& gamma) {
        if (!enabled_) return;
        ++report_.parity_checked;
        try {
            if (trajectory_parity(gamma) != reference_) ++report_.parity_violations;
        } catch (const StateError&) {
            ++report_.parity_violations;
        }
    }

  private:
    bool enabled_;
    int reference_ = 1;
    InvariantReport& report_;
};

}  // namespace

TimeSeries evolve_trajectory_average(const JumpNoise& noise, const DrivenHamiltonian& H, const Matrix& gamma0,
                                     const std::vector<Observable>& observables, const EvolveOptions& options,
                                     const TrajectoryOptions& traj) {
    validate(noise);
    detail::check_times(options.times);
    if (traj.n_traj <= 0) throw ParameterError("number of trajectories must be positive");
    const int n = H.dim();
    if (gamma0.rows() != n || gamma0.cols() != n) throw ParameterError("initial covariance dimension mismatch");

    const std::vector<double>& times = options.times;
    const double t0 = times.front();
    const double span = std::max(times.back() - t0, 1e-12);
    const std::size_t n_obs = observables.size();
    const std::size_t n_t = times.size();
    const auto N = static_cast<std::size_t>(traj.n_traj);
    const bool pure = diagnose(gamma0).purity_defect < 1e-6;
    const double dt = options.dt > 0.0 ? options.dt : automatic_dt(noise, H, options.energy_scale);

    std::optional<StaticBases> bases;
    if (!H.time_dependent()) bases = prepare_static(noise, H, gamma0, observables, t0);

    // samples[o][k][i]
    std::vector<std::vector<std::vector<double>>> samples(n_obs, std::vector<std::vector<double>>(n_t, std::vector<double>(N)));
    const std::size_t n_blocks = (N + kBlock - 1) / kBlock;
    std::vector<BlockResult> blocks(n_blocks);

    auto run_static = [&](std::size_t i, BlockResult& out) {
        const StaticBases& b = *bases;
        const NoiseTrajectory path = sample_trajectory(noise, span, traj.seed, i);
        ParityTracker parity(pure && i < static_cast<std::size_t>(std::max(0, traj.parity_trajectories)), gamma0,
                             out.report);
        int m = path.states[0];
        Matrix g = b.gamma0[m];
        double tau = 0.0;
        std::size_t sw = 1;
        Matrix full;
        for (std::size_t k = 0; k < n_t; ++k) {
            const double target = times[k] - t0;
            while (sw < path.times.size() && path.times[sw] <= target) {
                detail::rotate_blocks(b.nf[m].eps, path.times[sw] - tau, g);
                tau = path.times[sw];
                const int next = path.states[sw];
                if (!b.transition.empty()) {
                    g = b.transition[next][m] * g * b.transition[next][m].transpose();
                } else {
                    const Matrix T = b.nf[next].q.transpose() * b.nf[m].q;
                    g = T * g * T.transpose();
                }
                m = next;
                ++sw;
                if (parity.enabled()) parity.check(b.nf[m].q * g * b.nf[m].q.transpose());
            }
            detail::rotate_blocks(b.nf[m].eps, target - tau, g);
            tau = target;
            bool have_full = false;
            for (std::size_t o = 0; o < n_obs; ++o) {
                const Observable& obs = observables[o];
                if (obs.linear() && !b.weights.empty()) {
                    samples[o][k][i] = b.weights[m][o].cwiseProduct(g).sum() + obs.offset;
                } else {
                    if (!have_full) {
                        full = b.nf[m].q * g * b.nf[m].q.transpose();
                        have_full = true;
                    }
                    samples[o][k][i] = obs.evaluate(k, times[k], full);
                }
            }
        }
        out.gamma_sum += b.nf[m].q * g * b.nf[m].q.transpose();
    };

    auto run_driven = [&](std::size_t i, BlockResult& out) {
        const NoiseTrajectory path = sample_trajectory(noise, span, traj.seed, i);
        ParityTracker parity(pure && i < static_cast<std::size_t>(std::max(0, traj.parity_trajectories)), gamma0,
                             out.report);
        Matrix g = gamma0;
        int m = path.states[0];
        double t = t0;
        auto advance = [&](double t1) {
            if (t1 <= t) return;
            const int steps = detail::substeps(t1 - t, dt);
            const double h = (t1 - t) / steps;
            const double x = noise.states[m];
            for (int s = 0; s < steps; ++s) {
                const Matrix u = detail::magnus_step(H, x, t + s * h, h);
                g = u * g * u.transpose();
            }
            t = t1;
        };
        std::size_t sw = 1;
        for (std::size_t k = 0; k < n_t; ++k) {
            while (sw < path.times.size() && t0 + path.times[sw] <= times[k]) {
                advance(t0 + path.times[sw]);
                m = path.states[sw];
                ++sw;
                parity.check(g);
            }
            advance(times[k]);
            if (!g.allFinite()) throw IntegrationError("trajectory covariance became non-finite");
            for (std::size_t o = 0; o < n_obs; ++o) samples[o][k][i] = observables[o].evaluate(k, times[k], g);
        }
        out.gamma_sum += g;
    };

    parallel_for(n_blocks, traj.threads, [&](std::size_t blk) {
        BlockResult& out = blocks[blk];
        out.gamma_sum = Matrix::Zero(n, n);
        const std::size_t end = std::min(N, (blk + 1) * kBlock);
        for (std::size_t i = blk * kBlock; i < end; ++i) {
            if (bases) {
                run_static(i, out);
            } else {
                run_driven(i, out);
            }
        }
    });

    TimeSeries ts = detail::make_series(observables, times);
    ts.dt_used = bases ? 0.0 : dt;
    ts.standard_errors.assign(n_obs, std::vector<double>(n_t, 0.0));
    for (std::size_t o = 0; o < n_obs; ++o) {
        for (std::size_t k = 0; k < n_t; ++k) {
            const std::vector<double>& v = samples[o][k];
            double mean = 0.0;
            for (double x : v) mean += x;
            mean /= static_cast<double>(N);
            double var = 0.0;
            for (double x : v) var += (x - mean) * (x - mean);
            ts.values[o][k] = mean;
            ts.standard_errors[o][k] = N > 1 ? std::sqrt(var / static_cast<double>(N - 1) / static_cast<double>(N)) : 0.0;
        }
    }
    Matrix total = Matrix::Zero(n, n);
    for (const BlockResult& b : blocks) {
        total += b.gamma_sum;
        ts.invariants.merge(b.report);
    }
    ts.final_gamma = total / static_cast<double>(N);
    if (options.check_invariants) {
        detail::record_diagnostics(ts.invariants, ts.final_gamma, true, pure && (N == 1 || noise.size() == 1));
    }
    if (detail::is_snapshot_time(options.snapshot_times, times.back())) ts.snapshots.emplace_back(times.back(), ts.final_gamma);
    return ts;
}

}  // namespace kitnoise
