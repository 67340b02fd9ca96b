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

#include "kitnoise/network.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>

namespace kitnoise {

namespace {

std::mutex& warning_mutex() {
    static std::mutex m;
    return m;
}

WarningHandler& warning_handler() {
    static WarningHandler handler = [](const std::string& msg) {
        std::cerr << "warning: " << msg << "\n";
    };
    return handler;
}

using Triplets = std::vector<Eigen::Triplet<double>>;

// Upper-triangle accumulation; antisymmetrized once at the end.
void onsite_entries(Triplets& t, int site, double value) {
    t.emplace_back(2 * site, 2 * site + 1, value);
}

void bond_entries(Triplets& t, const Bond& b, double scale) {
    const int xi = 2 * b.i, yi = 2 * b.i + 1;
    const int xj = 2 * b.j, yj = 2 * b.j + 1;
    const double J = b.hopping * scale;
    const double dr = b.pairing.real() * scale;
    const double di = b.pairing.imag() * scale;
    t.emplace_back(xi, yj, -J + dr);
    t.emplace_back(xj, yi, -J - dr);
    t.emplace_back(xi, xj, di);
    t.emplace_back(yi, yj, -di);
}

SparseMatrix antisymmetrized(int dim, const Triplets& t) {
    SparseMatrix upper(dim, dim);
    upper.setFromTriplets(t.begin(), t.end());
    SparseMatrix result = upper - SparseMatrix(upper.transpose());
    result.prune(0.0);
    return result;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
    std::lock_guard<std::mutex> lock(warning_mutex());
    WarningHandler previous = warning_handler();
    warning_handler() = std::move(handler);
    return previous;
}

void warn(const std::string& message) {
    std::lock_guard<std::mutex> lock(warning_mutex());
    if (warning_handler()) warning_handler()(message);
}

int WireNetwork::add_site(double mu, double x, double y, std::string label) {
    if (label.empty()) label = "s" + std::to_string(sites_.size());
    sites_.push_back(Site{std::move(label), mu, x, y});
    return size() - 1;
}

void WireNetwork::check_site(int site) const {
    if (site < 0 || site >= size()) {
        throw GeometryError("site index " + std::to_string(site) + " does not exist (network has " +
                            std::to_string(size()) + " sites)");
    }
}

int WireNetwork::add_bond(int i, int j, double hopping, Complex pairing) {
    check_site(i);
    check_site(j);
    if (i == j) throw GeometryError("self-bond on site " + std::to_string(i));
    if (find_bond(i, j) >= 0) {
        throw GeometryError("duplicate bond between sites " + std::to_string(i) + " and " + std::to_string(j));
    }
    if (!std::isfinite(hopping) || !std::isfinite(pairing.real()) || !std::isfinite(pairing.imag())) {
        throw GeometryError("non-finite bond amplitude");
    }
    bonds_.push_back(Bond{i, j, hopping, pairing});
    return static_cast<int>(bonds_.size()) - 1;
}

void WireNetwork::set_mu(int site, double mu) {
    check_site(site);
    sites_[site].mu = mu;
}

void WireNetwork::set_bond(int index, double hopping, Complex pairing) {
    if (index < 0 || index >= static_cast<int>(bonds_.size())) {
        throw GeometryError("bond index " + std::to_string(index) + " does not exist");
    }
    bonds_[index].hopping = hopping;
    bonds_[index].pairing = pairing;
}

int WireNetwork::find_bond(int i, int j) const {
    for (std::size_t k = 0; k < bonds_.size(); ++k) {
        const Bond& b = bonds_[k];
        if ((b.i == i && b.j == j) || (b.i == j && b.j == i)) return static_cast<int>(k);
    }
    return -1;
}

double WireNetwork::energy_scale() const {
    double s = 0.0;
    for (const Bond& b : bonds_) s = std::max(s, std::abs(b.hopping));
    return s > 0.0 ? s : 1.0;
}

WireNetwork WireNetwork::chain(int n, double hopping, Complex pairing, double mu) {
    if (n < 1) throw ParameterError("chain needs at least one site");
    WireNetwork net;
    for (int j = 0; j < n; ++j) net.add_site(mu, static_cast<double>(j), 0.0);
    for (int j = 0; j + 1 < n; ++j) net.add_bond(j, j + 1, hopping, pairing);
    return net;
}

WireNetwork WireNetwork::ring(int n, double hopping, Complex pairing, double mu) {
    if (n < 3) throw ParameterError("ring needs at least three sites");
    WireNetwork net = chain(n, hopping, pairing, mu);
    net.add_bond(n - 1, 0, hopping, pairing);
    return net;
}

MajoranaHamiltonian build_hamiltonian(const WireNetwork& network) {
    const int n = network.size();
    MajoranaHamiltonian H;
    H.h = Matrix::Zero(2 * n, 2 * n);
    H.site_x.reserve(n);
    for (int j = 0; j < n; ++j) {
        const double mu = network.sites()[j].mu;
        H.h(2 * j, 2 * j + 1) += -mu;
        H.constant += -0.5 * mu;
        H.site_x.push_back(network.sites()[j].x);
    }
    for (const Bond& b : network.bonds()) {
        Triplets t;
        bond_entries(t, b, 1.0);
        for (const auto& e : t) H.h(e.row(), e.col()) += e.value();
    }
    H.h = (H.h - H.h.transpose()).eval();
    return H;
}

HamiltonianTerm site_potential_term(int n_sites, int site) {
    if (site < 0 || site >= n_sites) throw GeometryError("site index " + std::to_string(site) + " out of range");
    Triplets t;
    onsite_entries(t, site, 1.0);
    return HamiltonianTerm{antisymmetrized(2 * n_sites, t), 0.5};
}

HamiltonianTerm bond_term(int n_sites, const Bond& bond) {
    if (bond.i < 0 || bond.i >= n_sites || bond.j < 0 || bond.j >= n_sites) {
        throw GeometryError("bond references a missing site");
    }
    Triplets t;
    bond_entries(t, bond, 1.0);
    return HamiltonianTerm{antisymmetrized(2 * n_sites, t), 0.0};
}

}  // namespace kitnoise
