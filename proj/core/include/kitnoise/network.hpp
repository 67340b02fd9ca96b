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

#include <string>
#include <vector>

#include "kitnoise/common.hpp"

namespace kitnoise {

struct Site {
    std::string label;
    double mu = 0.0;
    double x = 0.0;
    double y = 0.0;
};

// Hopping -J (a_i^dag a_j + h.c.) and pairing (delta a_i a_j + h.c.).
struct Bond {
    int i = 0;
    int j = 0;
    double hopping = 0.0;
    Complex pairing{0.0, 0.0};
};

// Site/bond graph of a Kitaev-type network. Sites are indexed from 0.
class WireNetwork {
  public:
    int add_site(double mu, double x = 0.0, double y = 0.0, std::string label = {});
    int add_bond(int i, int j, double hopping, Complex pairing);

    void set_mu(int site, double mu);
    void set_bond(int index, double hopping, Complex pairing);

    int size() const { return static_cast<int>(sites_.size()); }
    const std::vector<Site>& sites() const { return sites_; }
    const std::vector<Bond>& bonds() const { return bonds_; }

    // Index into bonds() for the unordered pair (i, j), or -1.
    int find_bond(int i, int j) const;
    // Largest |J| over all bonds, 1 for bond-free networks.
    double energy_scale() const;

    static WireNetwork chain(int n, double hopping, Complex pairing, double mu);
    // Chain plus the closing bond (n-1, 0).
    static WireNetwork ring(int n, double hopping, Complex pairing, double mu);

  private:
    void check_site(int site) const;

    std::vector<Site> sites_;
    std::vector<Bond> bonds_;
};

// Quadratic Hamiltonian in the Majorana basis,
//     H = (i/4) sum_il h_il c_i c_l + constant,
// with c_{2j} = a_j + a_j^dag and c_{2j+1} = -i (a_j - a_j^dag).
// Noise-free covariance evolution is dG/dt = h G - G h.
struct MajoranaHamiltonian {
    Matrix h;
    double constant = 0.0;
    // Per-site coordinates copied from the network; used to orient edge modes.
    std::vector<double> site_x;

    int dim() const { return static_cast<int>(h.rows()); }
    int sites() const { return static_cast<int>(h.rows() / 2); }
};

MajoranaHamiltonian build_hamiltonian(const WireNetwork& network);

// Coefficient of a single parameter in h, as a sparse antisymmetric matrix
// plus its constant shift. Adding value * term to a Hamiltonian adds the
// corresponding operator with that prefactor.
struct HamiltonianTerm {
    SparseMatrix h;
    double constant = 0.0;
};

// +U a_j^dag a_j per unit U.
HamiltonianTerm site_potential_term(int n_sites, int site);
// Bond (i, j) with the given amplitudes per unit multiplier.
HamiltonianTerm bond_term(int n_sites, const Bond& bond);

}  // namespace kitnoise
