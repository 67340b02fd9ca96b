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

#include <limits>
#include <string>
#include <vector>

#include "kitnoise/gaussian.hpp"

namespace kitnoise {

struct Dispersion {
    std::vector<double> p;
    std::vector<double> energy;
    double gap = 0.0;
    double bandwidth = 0.0;
};

// E_p = sqrt((2J cos p + mu)^2 + 4 Delta^2 sin^2 p) on p_k = -pi + 2 pi k / grid, k = 1..grid.
Dispersion dispersion(double J, double delta, double mu, int grid);

// Energy-growth coefficient per site,
//     D = 4 sigma^2 int dk/(2 pi) kappa / (kappa^2 + E_k^2) Delta^2 sin^2 k / E_k,
// by the midpoint rule on n_k cells of (-pi, pi]. Midpoints never hit k = 0 or
// pi, so the integrable point at the critical mu = 2J is skipped.
double heating_rate_analytic(double J, double delta, double mu, double sigma, double kappa, int n_k = 4096);

struct HeatingResult {
    std::vector<double> t;
    std::vector<double> delta_e;
    // Linear coefficient of the quadratic fit c + D t + q t^2 over the window.
    double rate = 0.0;
    double rate_error = 0.0;
    double curvature = 0.0;
    // Slope of the straight-line fit over the same window.
    double linear_slope = 0.0;
    double window_start = 0.0;
    double window_end = 0.0;
    // RMS residual of the straight-line fit relative to the window range of delta_e.
    double residual = 0.0;
    bool linear_regime = true;
    std::string diagnostic;
};

HeatingResult heating_rate_fit(const std::vector<double>& t, const std::vector<double>& delta_e,
                               double window_start = 2.0,
                               double window_end = std::numeric_limits<double>::infinity(),
                               double residual_threshold = 0.05);

// (f_L . f_L0)^2 (f_R . f_R0)^2 over the Majorana edge modes of h0 and hf.
// 0 when hf has no zero mode; StateError when h0 has none.
double quench_g_infinity(const MajoranaHamiltonian& h0, const MajoranaHamiltonian& hf, double tol = 1e-6);

// exp(-kappa (1 - G_inf) t) on the given times.
std::vector<double> slow_noise_decay_model(double g_infinity, double kappa, const std::vector<double>& t);

// Least-squares rate r of y ~ a exp(-r t) over points with y > floor.
double fit_exponential_rate(const std::vector<double>& t, const std::vector<double>& y, double floor = 1e-12);

}  // namespace kitnoise
