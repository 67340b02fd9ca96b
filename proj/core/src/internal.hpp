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

#include "kitnoise/dynamics.hpp"

namespace kitnoise::detail {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_times(const std::vector<double>& times);

TimeSeries make_series(const std::vector<Observable>& observables, const std::vector<double>& times);

// Output indices that receive the exact spectral checks.
std::vector<bool> sampled_indices(std::size_t count, int samples);

// out = A G - (A G)^T, exact for antisymmetric A and G.
void commutator(const SparseMatrix& a, const Matrix& g, Matrix& out);

bool is_snapshot_time(const std::vector<double>& snapshot_times, double t);

double max_abs(const Matrix& m);

// Antisymmetry always; singular values when spectral is set, and the purity
// defect as well when the state is expected to stay pure.
void record_diagnostics(InvariantReport& rep, const Matrix& g, bool spectral, bool pure);

bool is_pure(const Matrix& g);

// Number of equal substeps of size <= dt covering interval.
int substeps(double interval, double dt);

// g -> R g R^T with R = exp(B t) for the normal-form blocks of eps.
void rotate_blocks(const Vector& eps, double t, Matrix& g);

// Fourth-order Magnus step: orthogonal U with U ~ T exp(int_t^{t+h} h(s) ds).
Matrix magnus_step(const DrivenHamiltonian& H, double x, double t, double h);

}  // namespace kitnoise::detail
