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

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace kitnoise {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Complex = std::complex<double>;

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Bad physical or numerical parameter (negative rate, N_r = 0, ...).
class ParameterError : public Error {
  public:
    using Error::Error;
};

// Inconsistent geometry: missing sites, duplicate bonds, wrong pairing phase.
class GeometryError : public Error {
  public:
    using Error::Error;
};

// State-level failure: mixed input where a pure state is required, degenerate spectra.
class StateError : public Error {
  public:
    using Error::Error;
};

// Integration failure (non-finite values, invariant blow-up).
class IntegrationError : public Error {
  public:
    using Error::Error;
};

using WarningHandler = std::function<void(const std::string&)>;

// Installs a process-wide warning sink; returns the previous one.
// The default handler writes "warning: <msg>" to stderr.
WarningHandler set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

}  // namespace kitnoise
