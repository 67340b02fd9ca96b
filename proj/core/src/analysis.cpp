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

#include "kitnoise/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kitnoise {

Dispersion dispersion(double J, double delta, double mu, int grid) {
    if (grid < 2) throw ParameterError("dispersion grid needs at least two points");
    Dispersion d;
    for (int k = 1; k <= grid; ++k) {
        const double p = -std::numbers::pi + 2.0 * std::numbers::pi * k / grid;
        const double a = 2.0 * J * std::cos(p) + mu;
        const double b = 2.0 * delta * std::sin(p);
        d.p.push_back(p);
        d.energy.push_back(std::sqrt(a * a + b * b));
    }
    d.gap = *std::min_element(d.energy.begin(), d.energy.end());
    d.bandwidth = *std::max_element(d.energy.begin(), d.energy.end());
    return d;
}

double heating_rate_analytic(double J, double delta, double mu, double sigma, double kappa, int n_k) {
    if (n_k < 1024) throw ParameterError("heating-rate quadrature needs n_k >= 1024");
    if (!(kappa > 0.0)) throw ParameterError("switching rate kappa must be positive");
    if (sigma == 0.0 || delta == 0.0) return 0.0;
    const double h = 2.0 * std::numbers::pi / n_k;
    double sum = 0.0;
    for (int j = 0; j < n_k; ++j) {
        const double k = -std::numbers::pi + (j + 0.5) * h;
        const double a = 2.0 * J * std::cos(k) + mu;
        const double s = std::sin(k);
        const double e = std::sqrt(a * a + 4.0 * delta * delta * s * s);
        if (e == 0.0) continue;
        sum += kappa / (kappa * kappa + e * e) * delta * delta * s * s / e;
    }
    return 4.0 * sigma * sigma * sum * h / (2.0 * std::numbers::pi);
}

HeatingResult heating_rate_fit(const std::vector<double>& t, const std::vector<double>& delta_e, double window_start,
                               double window_end, double residual_threshold) {
    if (t.size() != delta_e.size()) throw ParameterError("heating fit needs equally long series");
    HeatingResult r;
    r.t = t;
    r.delta_e = delta_e;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= window_start - 1e-12 && t[i] <= window_end + 1e-12) idx.push_back(i);
    }
    if (idx.size() < 4) throw ParameterError("heating fit window holds fewer than four points");
    r.window_start = t[idx.front()];
    r.window_end = t[idx.back()];

    const auto n = static_cast<int>(idx.size());
    Matrix A(n, 3);
    Vector y(n);
    for (int i = 0; i < n; ++i) {
        const double ti = t[idx[i]];
        A(i, 0) = 1.0;
        A(i, 1) = ti;
        A(i, 2) = ti * ti;
        y(i) = delta_e[idx[i]];
    }
    const Eigen::ColPivHouseholderQR<Matrix> qr(A);
    const Vector c = qr.solve(y);
    r.rate = c(1);
    r.curvature = c(2);
    const Vector res = y - A * c;
    if (n > 3) {
        const double s2 = res.squaredNorm() / (n - 3);
        const Matrix cov = s2 * (A.transpose() * A).inverse();
        r.rate_error = std::sqrt(std::max(0.0, cov(1, 1)));
    }

    const Matrix A1 = A.leftCols(2);
    const Vector c1 = A1.colPivHouseholderQr().solve(y);
    r.linear_slope = c1(1);
    const double range = y.maxCoeff() - y.minCoeff();
    const double rms = std::sqrt((y - A1 * c1).squaredNorm() / n);
    r.residual = range > 0.0 ? rms / range : 0.0;
    if (r.residual > residual_threshold) {
        r.linear_regime = false;
        r.diagnostic = "no linear regime: relative residual " + std::to_string(r.residual) + " exceeds " +
                       std::to_string(residual_threshold);
    }
    return r;
}

double quench_g_infinity(const MajoranaHamiltonian& h0, const MajoranaHamiltonian& hf, double tol) {
    const std::optional<EdgeModes> m0 = zero_modes(h0, tol);
    if (!m0) throw StateError("initial Hamiltonian is not topological (no Majorana zero modes)");
    const std::optional<EdgeModes> mf = zero_modes(hf, tol);
    if (!mf) return 0.0;
    const double l = m0->f_left.dot(mf->f_left);
    const double r = m0->f_right.dot(mf->f_right);
    return l * l * r * r;
}

std::vector<double> slow_noise_decay_model(double g_infinity, double kappa, const std::vector<double>& t) {
    std::vector<double> out;
    out.reserve(t.size());
    for (double ti : t) out.push_back(std::exp(-kappa * (1.0 - g_infinity) * ti));
    return out;
}

double fit_exponential_rate(const std::vector<double>& t, const std::vector<double>& y, double floor) {
    if (t.size() != y.size()) throw ParameterError("exponential fit needs equally long series");
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(y[i] > floor)) continue;
        const double ly = std::log(y[i]);
        st += t[i];
        sy += ly;
        stt += t[i] * t[i];
        sty += t[i] * ly;
        ++n;
    }
    if (n < 2) throw ParameterError("exponential fit needs two positive points");
    const double den = n * stt - st * st;
    if (den == 0.0) throw ParameterError("exponential fit needs distinct times");
    return -(n * sty - st * sy) / den;
}

}  // namespace kitnoise
