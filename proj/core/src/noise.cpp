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

#include "kitnoise/noise.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace kitnoise {

namespace {

// Strongly connected components of the jump graph (edge n -> m when L(m, n) > 0).
std::vector<int> components(const Matrix& L, int& count) {
    const int m = static_cast<int>(L.rows());
    std::vector<std::vector<bool>> reach(m, std::vector<bool>(m, false));
    for (int i = 0; i < m; ++i) {
        reach[i][i] = true;
        for (int j = 0; j < m; ++j) {
            if (i != j && L(j, i) > 0.0) reach[i][j] = true;
        }
    }
    for (int k = 0; k < m; ++k) {
        for (int i = 0; i < m; ++i) {
            if (!reach[i][k]) continue;
            for (int j = 0; j < m; ++j) {
                if (reach[k][j]) reach[i][j] = true;
            }
        }
    }
    std::vector<int> comp(m, -1);
    count = 0;
    for (int i = 0; i < m; ++i) {
        if (comp[i] >= 0) continue;
        for (int j = 0; j < m; ++j) {
            if (reach[i][j] && reach[j][i]) comp[j] = count;
        }
        ++count;
    }
    return comp;
}

}  // namespace

double JumpNoise::max_rate() const {
    double r = 0.0;
    for (int m = 0; m < generator.rows(); ++m) r = std::max(r, std::abs(generator(m, m)));
    return r;
}

void validate(const JumpNoise& noise) {
    const int m = noise.size();
    if (m == 0) throw ParameterError("noise has no states");
    if (noise.generator.rows() != m || noise.generator.cols() != m) {
        throw ParameterError("generator must be " + std::to_string(m) + "x" + std::to_string(m));
    }
    for (int j = 0; j < m; ++j) {
        double col = 0.0;
        for (int i = 0; i < m; ++i) {
            const double v = noise.generator(i, j);
            if (!std::isfinite(v)) throw ParameterError("generator has non-finite entries");
            if (i != j && v < 0.0) throw ParameterError("generator has a negative off-diagonal rate");
            col += v;
        }
        const double scale = std::max(1.0, std::abs(noise.generator(j, j)));
        if (std::abs(col) > 1e-12 * scale) {
            throw ParameterError("generator column " + std::to_string(j) + " does not sum to zero");
        }
    }
    if (!noise.stationary_start && (noise.initial_index < 0 || noise.initial_index >= m)) {
        throw ParameterError("initial noise state index out of range");
    }
}

JumpNoise telegraph(double a, double b, double kappa) {
    if (!(kappa > 0.0)) throw ParameterError("telegraph rate kappa must be positive");
    JumpNoise n;
    n.states = {a, b};
    n.generator.resize(2, 2);
    n.generator << -kappa, kappa, kappa, -kappa;
    return n;
}

JumpNoise discretized_gaussian(double mean, double sigma, double tau_c, int n_r) {
    if (n_r < 1) throw ParameterError("lattice size N_r must be at least 1");
    if (sigma < 0.0) throw ParameterError("sigma must be nonnegative");
    if (!(tau_c > 0.0)) throw ParameterError("correlation time must be positive");
    const double kappa = 1.0 / (2.0 * tau_c);
    const double nr = static_cast<double>(n_r);
    const double ap = mean / nr - sigma / std::sqrt(nr);
    const double bp = mean / nr + sigma / std::sqrt(nr);
    JumpNoise n;
    n.states.resize(n_r + 1);
    n.generator = Matrix::Zero(n_r + 1, n_r + 1);
    for (int k = 0; k <= n_r; ++k) {
        n.states[k] = (n_r - k) * ap + k * bp;
        n.generator(k, k) = -kappa * nr;
        if (k + 1 <= n_r) n.generator(k, k + 1) = kappa * (k + 1);
        if (k - 1 >= 0) n.generator(k, k - 1) = kappa * (n_r - k + 1);
    }
    return n;
}

Vector stationary_distribution(const JumpNoise& noise) {
    validate(noise);
    const int m = noise.size();
    int count = 0;
    const std::vector<int> comp = components(noise.generator, count);
    if (count > 1) {
        std::ostringstream msg;
        msg << "generator is reducible; components:";
        for (int c = 0; c < count; ++c) {
            msg << " {";
            bool first = true;
            for (int i = 0; i < m; ++i) {
                if (comp[i] != c) continue;
                msg << (first ? "" : ",") << i;
                first = false;
            }
            msg << "}";
        }
        throw ParameterError(msg.str());
    }
    if (m == 1) return Vector::Ones(1);
    Matrix a(m + 1, m);
    a.topRows(m) = noise.generator;
    a.row(m).setOnes();
    Vector rhs = Vector::Zero(m + 1);
    rhs[m] = 1.0;
    Vector p = a.colPivHouseholderQr().solve(rhs);
    for (int i = 0; i < m; ++i) p[i] = std::max(p[i], 0.0);
    return p / p.sum();
}

Vector initial_distribution(const JumpNoise& noise) {
    validate(noise);
    if (noise.stationary_start) return stationary_distribution(noise);
    Vector p = Vector::Zero(noise.size());
    p[noise.initial_index] = 1.0;
    return p;
}

double autocorrelation(const JumpNoise& noise, double tau) {
    const Vector p = stationary_distribution(noise);
    const Eigen::Map<const Vector> x(noise.states.data(), noise.size());
    const Matrix e = (noise.generator * std::abs(tau)).exp();
    const double mean = x.dot(p);
    return x.dot(e * p.cwiseProduct(x)) - mean * mean;
}

NoiseStatistics statistics(const JumpNoise& noise) {
    const Vector p = stationary_distribution(noise);
    const int m = noise.size();
    const Eigen::Map<const Vector> x(noise.states.data(), m);
    NoiseStatistics s;
    s.mean = x.dot(p);
    const Vector dx = x.array() - s.mean;
    s.variance = p.dot(dx.cwiseProduct(dx));
    if (s.variance <= 0.0 || m == 1) return s;
    // int_0^inf expm(L t) y dt = z with L z = -y on the zero-sum subspace.
    const Vector y = p.cwiseProduct(dx);
    Matrix a(m + 1, m);
    a.topRows(m) = noise.generator;
    a.row(m).setOnes();
    Vector rhs = Vector::Zero(m + 1);
    rhs.head(m) = -y;
    const Vector z = a.colPivHouseholderQr().solve(rhs);
    s.correlation_time = dx.dot(z) / s.variance;
    return s;
}

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
}

double StreamRng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double StreamRng::exponential(double rate) {
    return -std::log1p(-uniform()) / rate;
}

int StreamRng::categorical(const Vector& weights) {
    const double total = weights.sum();
    double u = uniform() * total;
    int last = 0;
    for (int i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        last = i;
        if (u < weights[i]) return i;
        u -= weights[i];
    }
    return last;
}

int NoiseTrajectory::state_at(double t) const {
    auto it = std::upper_bound(times.begin(), times.end(), t);
    const auto k = std::max<std::ptrdiff_t>(0, std::distance(times.begin(), it) - 1);
    return states[static_cast<std::size_t>(k)];
}

NoiseTrajectory sample_trajectory(const JumpNoise& noise, double t_max, std::uint64_t seed, std::uint64_t stream) {
    if (!(t_max > 0.0)) throw ParameterError("trajectory horizon must be positive");
    validate(noise);
    StreamRng rng(seed, stream);
    NoiseTrajectory traj;
    traj.t_max = t_max;
    traj.seed = seed;
    traj.stream = stream;
    int state = noise.stationary_start ? rng.categorical(stationary_distribution(noise)) : noise.initial_index;
    double t = 0.0;
    traj.times.push_back(0.0);
    traj.states.push_back(state);
    for (;;) {
        const double rate = -noise.generator(state, state);
        if (rate <= 0.0) break;
        t += rng.exponential(rate);
        if (t >= t_max) break;
        Vector w = noise.generator.col(state);
        w[state] = 0.0;
        state = rng.categorical(w);
        traj.times.push_back(t);
        traj.states.push_back(state);
    }
    return traj;
}

}  // namespace kitnoise
