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

#include "kitnoise/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace kitnoise {

namespace {

void check_square_even(const Matrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() % 2 != 0) {
        throw ParameterError(std::string(what) + " must be square with even dimension");
    }
}

int first_abs_max(const Vector& f) {
    int best = 0;
    for (int i = 1; i < f.size(); ++i) {
        if (std::abs(f[i]) > std::abs(f[best])) best = i;
    }
    return best;
}

void fix_gauge(Vector& f) {
    if (f.size() > 0 && f[first_abs_max(f)] < 0.0) f = -f;
}

// Splits a two-column span into low-x and high-x vectors via the position operator.
std::pair<Vector, Vector> localize_pair(const Matrix& u, const std::vector<double>& site_x) {
    const int n = static_cast<int>(u.rows());
    Vector x(n);
    for (int i = 0; i < n; ++i) {
        x[i] = site_x.empty() ? static_cast<double>(i / 2) : site_x[i / 2];
    }
    Eigen::Matrix2d m = u.transpose() * x.asDiagonal() * u;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
    Vector left = u * es.eigenvectors().col(0);
    Vector right = u * es.eigenvectors().col(1);
    left.normalize();
    right.normalize();
    fix_gauge(left);
    fix_gauge(right);
    return {left, right};
}

}  // namespace

NormalForm normal_form(const Matrix& h) {
    check_square_even(h, "Hamiltonian matrix");
    const int n = static_cast<int>(h.rows());
    const int half = n / 2;
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    // Eigenvectors of +-lambda mix when 2 lambda approaches the solver accuracy,
    // so the near-zero cluster is block-diagonalized separately in a real basis.
    const double zero_thr = 1e-5 * scale;

    Eigen::MatrixXcd herm = Complex(0.0, 1.0) * h.cast<Complex>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
    const Vector& lam = es.eigenvalues();
    const Eigen::MatrixXcd& vec = es.eigenvectors();

    std::vector<int> positive;
    std::vector<int> near_zero;
    for (int k = 0; k < n; ++k) {
        if (lam[k] > zero_thr) positive.push_back(k);
        else if (lam[k] >= -zero_thr) near_zero.push_back(k);
    }
    const int n_zero_blocks = half - static_cast<int>(positive.size());

    NormalForm nf;
    nf.q = Matrix::Zero(n, n);
    nf.eps = Vector::Zero(half);

    int col = 0;
    if (n_zero_blocks > 0) {
        Matrix z(n, 2 * near_zero.size());
        for (std::size_t k = 0; k < near_zero.size(); ++k) {
            z.col(2 * k) = vec.col(near_zero[k]).real();
            z.col(2 * k + 1) = vec.col(near_zero[k]).imag();
        }
        Eigen::JacobiSVD<Matrix> svd(z, Eigen::ComputeThinU);
        const Matrix basis = svd.matrixU().leftCols(2 * n_zero_blocks);
        Matrix p = basis.transpose() * h * basis;
        p = 0.5 * (p - p.transpose()).eval();
        Eigen::RealSchur<Matrix> schur(p);
        const Matrix u = basis * schur.matrixU();
        const Matrix& t = schur.matrixT();
        std::vector<std::pair<double, int>> blocks;  // (eps, first column), with sign
        for (int k = 0; k < 2 * n_zero_blocks;) {
            if (k + 1 < 2 * n_zero_blocks && t(k + 1, k) != 0.0) {
                blocks.emplace_back(t(k + 1, k), k);
                k += 2;
            } else {
                // Exact zero eigenvalues come as real 1x1 blocks; pair them up.
                blocks.emplace_back(0.0, k);
                blocks.back().second = -1 - k;
                k += 1;
            }
        }
        std::vector<int> singles;
        std::vector<std::pair<double, std::pair<int, int>>> pairs;
        for (const auto& [e, k] : blocks) {
            if (k < 0) {
                singles.push_back(-1 - k);
            } else if (e >= 0.0) {
                pairs.push_back({e, {k, k + 1}});
            } else {
                pairs.push_back({-e, {k + 1, k}});
            }
        }
        for (std::size_t k = 0; k + 1 < singles.size(); k += 2) pairs.push_back({0.0, {singles[k], singles[k + 1]}});
        std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            nf.q.col(2 * k) = u.col(pairs[k].second.first);
            nf.q.col(2 * k + 1) = u.col(pairs[k].second.second);
            nf.eps[static_cast<int>(k)] = pairs[k].first;
        }
        col = 2 * n_zero_blocks;
    }
    const double r2 = std::sqrt(2.0);
    for (std::size_t k = 0; k < positive.size(); ++k) {
        const int idx = positive[k];
        nf.q.col(col) = r2 * vec.col(idx).real();
        nf.q.col(col + 1) = r2 * vec.col(idx).imag();
        nf.eps[n_zero_blocks + static_cast<int>(k)] = lam[idx];
        col += 2;
    }
    return nf;
}

Covariance ground_state_covariance(const MajoranaHamiltonian& H, const GroundStateOptions& options) {
    check_square_even(H.h, "Hamiltonian matrix");
    const int n = H.dim();
    if (n == 0) return Covariance(0, 0);
    if (H.h.cwiseAbs().maxCoeff() == 0.0) {
        if (options.allow_zero_hamiltonian) return Covariance::Zero(n, n);
        throw StateError("ground state of h = 0 is fully degenerate; set allow_zero_hamiltonian for Gamma = 0");
    }
    const NormalForm nf = normal_form(H.h);
    Covariance g = Covariance::Zero(n, n);
    int n_zero = 0;
    for (int k = 0; k < nf.eps.size(); ++k) {
        if (nf.eps[k] <= options.zero_tol) {
            ++n_zero;
            continue;
        }
        const auto q1 = nf.q.col(2 * k);
        const auto q2 = nf.q.col(2 * k + 1);
        g += q1 * q2.transpose() - q2 * q1.transpose();
    }
    if (n_zero > 1) {
        throw StateError("zero-energy space has dimension " + std::to_string(2 * n_zero) +
                         "; ground state is not unique up to the edge-mode filling");
    }
    Vector flip_a, flip_b;
    if (n_zero == 1) {
        auto [fl, fr] = localize_pair(nf.q.leftCols(2), H.site_x);
        g -= fl * fr.transpose() - fr * fl.transpose();
        flip_a = fl;
        flip_b = fr;
    } else {
        flip_a = nf.q.col(0);
        flip_b = nf.q.col(1);
    }
    if (options.parity) {
        const int want = *options.parity;
        if (want != 1 && want != -1) throw ParameterError("parity sector must be +1 or -1");
        if (trajectory_parity(g) != want) {
            // Flipping the occupation of the lowest mode reverses the parity.
            const Matrix block = flip_a * flip_b.transpose() - flip_b * flip_a.transpose();
            const double s = (flip_a.transpose() * g * flip_b)(0, 0);
            g -= 2.0 * s * block;
        }
    }
    return g;
}

std::optional<EdgeModes> zero_modes(const NormalForm& nf, const std::vector<double>& site_x, double tol) {
    int n_zero = 0;
    for (int k = 0; k < nf.eps.size(); ++k) {
        if (nf.eps[k] <= tol) ++n_zero;
    }
    if (n_zero == 0) return std::nullopt;
    if (n_zero > 1) {
        throw StateError("found " + std::to_string(n_zero) + " mode pairs below the zero-mode tolerance");
    }
    auto [fl, fr] = localize_pair(nf.q.leftCols(2), site_x);
    EdgeModes m;
    m.f_left = fl;
    m.f_right = fr;
    m.eps_left = nf.eps[0];
    m.eps_right = nf.eps[0];
    m.localization_length = localization_length(fl, site_x);
    return m;
}

std::optional<EdgeModes> zero_modes(const MajoranaHamiltonian& H, double tol) {
    return zero_modes(normal_form(H.h), H.site_x, tol);
}

double localization_length(const Vector& f, const std::vector<double>& site_x) {
    const int n_sites = static_cast<int>(f.size() / 2);
    std::vector<int> order(n_sites);
    std::iota(order.begin(), order.end(), 0);
    auto xpos = [&](int j) { return site_x.empty() ? static_cast<double>(j) : site_x[j]; };
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return xpos(a) < xpos(b); });

    std::vector<double> xs, ys;
    for (int k = 0; k < n_sites / 2; ++k) {
        const int j = order[k];
        const double env = std::hypot(f[2 * j], f[2 * j + 1]);
        if (env < 1e-12) continue;
        xs.push_back(xpos(j));
        ys.push_back(std::log(env));
    }
    if (xs.size() < 2) return 0.0;
    const double m = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) return 0.0;
    const double slope = sxy / sxx;
    if (slope >= 0.0) return std::numeric_limits<double>::infinity();
    return -1.0 / slope;
}

double edge_correlation(const Covariance& gamma, const EdgeModes& modes) {
    if (gamma.rows() != modes.f_left.size() || gamma.cols() != modes.f_right.size()) {
        throw ParameterError("edge_correlation: covariance and mode dimensions differ");
    }
    return -modes.f_left.dot(gamma * modes.f_right);
}

double energy_expectation(const MajoranaHamiltonian& H, const Covariance& gamma) {
    if (gamma.rows() != H.h.rows() || gamma.cols() != H.h.cols()) {
        throw ParameterError("energy_expectation: dimension mismatch");
    }
    return 0.25 * H.h.cwiseProduct(gamma).sum() + H.constant;
}

double pfaffian(Matrix a) {
    if (a.rows() != a.cols()) throw ParameterError("pfaffian needs a square matrix");
    const int n = static_cast<int>(a.rows());
    if (n % 2 == 1) return 0.0;
    double pf = 1.0;
    for (int k = 0; k + 1 < n; k += 2) {
        int kp = k + 1;
        for (int i = k + 2; i < n; ++i) {
            if (std::abs(a(i, k)) > std::abs(a(kp, k))) kp = i;
        }
        if (kp != k + 1) {
            a.row(k + 1).swap(a.row(kp));
            a.col(k + 1).swap(a.col(kp));
            pf = -pf;
        }
        if (a(k + 1, k) == 0.0) return 0.0;
        pf *= a(k, k + 1);
        const int rest = n - k - 2;
        if (rest > 0) {
            const Vector tau = a.row(k).segment(k + 2, rest).transpose() / a(k, k + 1);
            const Vector col = a.col(k + 1).segment(k + 2, rest);
            a.block(k + 2, k + 2, rest, rest) += tau * col.transpose() - col * tau.transpose();
        }
    }
    return pf;
}

int trajectory_parity(const Covariance& gamma, double purity_tol) {
    check_square_even(gamma, "covariance");
    const int n = static_cast<int>(gamma.rows());
    const double defect = (gamma * gamma.transpose() - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
    if (defect > purity_tol) {
        throw StateError("parity undefined for a mixed covariance (purity defect " + std::to_string(defect) + ")");
    }
    const double pf = pfaffian(gamma);
    const int sign_pf = pf >= 0.0 ? 1 : -1;
    return ((n / 2) % 2 == 0 ? 1 : -1) * sign_pf;
}

CovarianceDiagnostics diagnose(const Covariance& gamma) {
    CovarianceDiagnostics d;
    if (gamma.size() == 0) return d;
    d.antisymmetry = (gamma + gamma.transpose()).cwiseAbs().maxCoeff();
    const Matrix ggt = gamma * gamma.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> es(ggt, Eigen::EigenvaluesOnly);
    d.max_singular = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
    d.purity_defect = (ggt - Matrix::Identity(gamma.rows(), gamma.cols())).cwiseAbs().maxCoeff();
    return d;
}

}  // namespace kitnoise
