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

#include "kitnoise/network.hpp"

namespace kitnoise {

// h = Q B Q^T with Q orthogonal and B block diagonal; block k occupies
// columns (2k, 2k+1) and equals [[0, -eps_k], [eps_k, 0]].
// Quasiparticle energies eps are >= 0 and ascending.
struct NormalForm {
    Matrix q;
    Vector eps;
};

NormalForm normal_form(const Matrix& h);

// Covariance Gamma_il = <(i/2)[c_i, c_l]>, real antisymmetric.
using Covariance = Matrix;

struct EdgeModes {
    Vector f_left;
    Vector f_right;
    double eps_left = 0.0;
    double eps_right = 0.0;
    // Decay length in lattice units; 0 for single-site support.
    double localization_length = 0.0;
};

struct GroundStateOptions {
    // +1 even, -1 odd. Unset: fill the zero mode so that edge_correlation = +1.
    std::optional<int> parity;
    // h = 0 has no ground state; with this flag Gamma = 0 is returned instead.
    bool allow_zero_hamiltonian = false;
    double zero_tol = 1e-6;
};

Covariance ground_state_covariance(const MajoranaHamiltonian& H, const GroundStateOptions& options = {});

// Two lowest-|eps| Majorana modes localized on the low-x and high-x ends.
// Empty when the lowest |eps| exceeds tol; StateError when more than one
// mode pair lies below tol.
std::optional<EdgeModes> zero_modes(const MajoranaHamiltonian& H, double tol = 1e-6);

// Same, from an already computed normal form.
std::optional<EdgeModes> zero_modes(const NormalForm& nf, const std::vector<double>& site_x, double tol = 1e-6);

// Log-envelope fit over the first half of the sites, skipping |f| < 1e-12.
double localization_length(const Vector& f, const std::vector<double>& site_x);

// -i <gamma_L gamma_R> = -f_L^T Gamma f_R.
double edge_correlation(const Covariance& gamma, const EdgeModes& modes);

// <H> = (1/4) sum_il h_il Gamma_il + constant.
double energy_expectation(const MajoranaHamiltonian& H, const Covariance& gamma);

// Pfaffian of a real antisymmetric matrix (Parlett-Reid with pivoting).
double pfaffian(Matrix a);

// Fermion parity (-1)^N sign Pf(Gamma): +1 even, -1 odd. StateError on mixed input.
int trajectory_parity(const Covariance& gamma, double purity_tol = 1e-6);

struct CovarianceDiagnostics {
    double antisymmetry = 0.0;    // max |G + G^T|
    double max_singular = 0.0;    // largest singular value
    double purity_defect = 0.0;   // max |G G^T - I|
};

CovarianceDiagnostics diagnose(const Covariance& gamma);

}  // namespace kitnoise
