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

#include <optional>
#include <vector>

#include "kitnoise/dynamics.hpp"

namespace kitnoise {

// One step per site, ramping 0 -> V with the sin^2 shape over t_f.
// Consecutive sites must share a bond. Warns when V < 10 J.
Schedule build_transport_schedule(const WireNetwork& network, const std::vector<int>& sites, double t_f,
                                  double V = 20.0);

// Edge modes of h(x, t) on a time grid, continued smoothly from the initial
// pair: at each time the lowest normal-form pair is rotated onto the previous
// modes (orthogonal Procrustes). Thread-safe to read from observables.
std::vector<EdgeModes> track_modes(const DrivenHamiltonian& H, double x, const std::vector<double>& times,
                                   double tol = 1e-6);

// -i <gamma_1(t) gamma_2(t)> against modes tracked on the same grid.
Observable tracked_edge_observable(std::vector<EdgeModes> modes, std::string name = "edge");

struct TransportSweep {
    WireNetwork network;
    std::vector<int> sites;
    double V = 20.0;
    std::vector<double> t_f;
    JumpNoise noise;
    // Site carrying the noise as + X a_d^dag a_d.
    int noise_site = 0;
    double dt = 0.0;
    int threads = 0;
};

struct TransportPoint {
    double t_f = 0.0;
    // -i <gamma_L gamma_R> against the zero modes of the final noise-free Hamiltonian.
    double final_correlation = 0.0;
};

std::vector<TransportPoint> transport_fidelity_sweep(const TransportSweep& sweep);

// T-shaped network: a horizontal wire (left leg, junction site, right leg)
// and a vertical leg hanging from the junction site.
struct TJunction {
    WireNetwork network;
    std::vector<int> left;      // outermost first
    int center = 0;
    std::vector<int> right;     // innermost first
    std::vector<int> vertical;  // nearest to the junction first
    double mu_topological = 0.0;
    double mu_nontopological = 0.0;
};

// Horizontal bonds (a, a+1) along +x carry delta_x; vertical bonds are stored
// as (lower, upper) and carry delta_y, which must equal -i delta_x.
TJunction build_tjunction(int left, int right, int vertical, double J, Complex delta_x, Complex delta_y,
                          double mu_topological, double mu_nontopological);

// Exchange of the two horizontal-end Majoranas by single-site potential
// ramps of length t_f each, with U = mu_topological - mu_nontopological:
//   left leg pushed out (outer to inner), vertical leg pulled in (top to bottom);
//   right leg pushed out (outer to inner), left leg released (inner to outer);
//   vertical leg released (bottom to top), right leg released (inner to outer).
Schedule build_braiding_schedule(const TJunction& junction, double t_f);

struct BraidResult {
    TimeSeries series;
    double final_correlation = 0.0;
    // Noise-free transfer amplitudes t_ab = f_b . (O f_a), gamma_a -> t_ab gamma_b.
    double t11 = 0.0;
    double t12 = 0.0;
    double t21 = 0.0;
    double t22 = 0.0;
    // gamma_1 -> gamma_2, gamma_2 -> -gamma_1.
    bool exchange_signs = false;
    // gamma_i -> -gamma_i.
    bool double_exchange_signs = false;
};

// Compares the evolved covariance with the initial modes and extracts the
// noise-free transform. StateError when h(0, T) differs from h(0, 0).
BraidResult braid_outcome(const DrivenHamiltonian& H, const Matrix& gamma_final, const EdgeModes& initial);

struct BraidRun {
    double t_f = 18.0;
    // Exchanges executed back to back.
    int exchanges = 1;
    std::optional<JumpNoise> noise;
    // Noisy site (+ X a^dag a); -1 selects the junction site.
    int noise_site = -1;
    double output_step = 0.5;
    double dt = 0.0;
};

BraidResult run_braid(const TJunction& junction, const BraidRun& run);

struct DropEvent {
    double t_start = 0.0;
    double t_end = 0.0;
    double depth = 0.0;
};

// d_i = max(c over [t_i - window, t_i]) - c_i; an event is a maximal run with
// d_i > threshold, and runs closer than window are merged.
std::vector<DropEvent> detect_drops(const std::vector<double>& t, const std::vector<double>& c, double window,
                                    double threshold = 0.05);

// Joint (J, Delta) noise on bond (i, j): use with states {0, -1}.
// Warns when the bond touches a dangling site.
ParameterBinding build_split_binding(const WireNetwork& network, int i, int j);

}  // namespace kitnoise
