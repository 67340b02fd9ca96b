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

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kitnoise/gaussian.hpp"
#include "kitnoise/noise.hpp"
#include "kitnoise/schedule.hpp"

namespace kitnoise {

// Which Hamiltonian parameter a scalar noise X drives, as the h-term per unit X.
struct ParameterBinding {
    enum class Kind { GlobalMu, SiteMu, SitePotential, BondScale, Custom };
    Kind kind = Kind::Custom;
    int site = -1;
    int bond_i = -1;
    int bond_j = -1;
    HamiltonianTerm term;

    std::string describe() const;
};

// mu_j -> mu_j + X on every site.
ParameterBinding bind_global_mu(const WireNetwork& network);
// mu_d -> mu_d + X.
ParameterBinding bind_site_mu(const WireNetwork& network, int site);
// + X a_d^dag a_d.
ParameterBinding bind_site_potential(const WireNetwork& network, int site);
// (J_ij, Delta_ij) -> (1 + X) (J_ij, Delta_ij).
ParameterBinding bind_bond_scale(const WireNetwork& network, int i, int j);
ParameterBinding bind_custom(HamiltonianTerm term);

// h(X, t) = h_base + X * binding + sum_r u_r(t) * ramp_r.
class DrivenHamiltonian {
  public:
    DrivenHamiltonian(const WireNetwork& network, ParameterBinding binding, Schedule schedule = {});
    DrivenHamiltonian(MajoranaHamiltonian base, ParameterBinding binding);

    int dim() const { return base_.dim(); }
    bool time_dependent() const { return !schedule_.empty(); }

    MajoranaHamiltonian at(double x, double t) const;
    SparseMatrix sparse_at(double x, double t) const;
    // Gershgorin bound on the spectral radius of h over the given noise values
    // and every schedule offset.
    double spectral_bound(const std::vector<double>& xs) const;
    // Largest rate of change of h over the schedule (sin^2 ramp slopes times
    // the row bound of each ramped term); 0 without a schedule.
    double ramp_rate() const;

    const MajoranaHamiltonian& base() const { return base_; }
    const ParameterBinding& binding() const { return binding_; }
    const Schedule& schedule() const { return schedule_; }

  private:
    void build_pattern();

    MajoranaHamiltonian base_;
    SparseMatrix base_sparse_;
    ParameterBinding binding_;
    Schedule schedule_;
    std::vector<HamiltonianTerm> ramp_terms_;
    // Union sparsity pattern of all terms, with each term's values scattered into it.
    SparseMatrix pattern_;
    Vector base_values_;
    Vector binding_values_;
    std::vector<std::vector<std::pair<int, double>>> ramp_values_;
};

// Observable on a covariance: sum_ij weight_ij G_ij + offset, or a custom
// callback receiving (grid index, t, G).
struct Observable {
    std::string name;
    Matrix weight;
    double offset = 0.0;
    std::function<double(std::size_t, double, const Matrix&)> custom;

    bool linear() const { return !custom; }
    double evaluate(std::size_t k, double t, const Matrix& g) const;
};

Observable edge_observable(const EdgeModes& modes, std::string name = "edge");
Observable energy_observable(const MajoranaHamiltonian& H, std::string name = "energy");
Observable entry_observable(int i, int l);

struct EvolveOptions {
    // Output grid, strictly increasing; integration starts at times.front().
    std::vector<double> times;
    // Fixed RK4 step; 0 selects min(0.01/J, 0.1/rate_max, 0.1/h_bound).
    double dt = 0.0;
    double energy_scale = 1.0;
    std::vector<double> snapshot_times;
    bool check_invariants = true;
    // Exact spectral checks are spread over at most this many output times.
    int invariant_samples = 21;
    // Repeat with dt/2 and report the largest observable change.
    bool convergence_check = false;
};

std::vector<double> uniform_grid(double t_max, double step, double t0 = 0.0);

struct InvariantReport {
    double max_antisymmetry = 0.0;
    double max_singular = 0.0;
    double max_purity_defect = 0.0;
    double max_probability_error = 0.0;  // |sum_m p_m - 1|
    double max_chapman_error = 0.0;      // |p(t) - expm(L t) p0|
    int parity_checked = 0;
    int parity_violations = 0;

    void merge(const InvariantReport& other);
};

struct TimeSeries {
    std::vector<double> t;
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;           // [observable][time]
    std::vector<std::vector<double>> standard_errors;  // trajectory backend only
    std::vector<std::pair<double, Matrix>> snapshots;
    Matrix final_gamma;
    double dt_used = 0.0;
    double convergence_delta = -1.0;
    InvariantReport invariants;

    const std::vector<double>& column(const std::string& name) const;
};

// Unnormalized marginals G_m = Tr[rho(X_m) G] and probabilities p_m.
struct MarginalEnsemble {
    std::vector<Matrix> gamma;
    Vector p;

    Matrix averaged() const;
};

MarginalEnsemble make_ensemble(const JumpNoise& noise, const Matrix& gamma0);

// dG_m/dt = h_m G_m - G_m h_m + sum_n L_mn G_n, integrated with a fixed-step
// integrating-factor RK4 (the generator part is applied exactly).
TimeSeries evolve_marginal(const JumpNoise& noise, const DrivenHamiltonian& H, const Matrix& gamma0,
                           const std::vector<Observable>& observables, const EvolveOptions& options);
TimeSeries evolve_marginal(MarginalEnsemble& ensemble, const JumpNoise& noise, const DrivenHamiltonian& H,
                           const std::vector<Observable>& observables, const EvolveOptions& options);

// Noise-free evolution under h(x, t).
TimeSeries evolve_unitary(const DrivenHamiltonian& H, double x, const Matrix& gamma0,
                          const std::vector<Observable>& observables, const EvolveOptions& options);

struct FastLimitSpec {
    DrivenHamiltonian hamiltonian;  // evaluated at x = mean
    double mean = 0.0;
    // Damping prefactor sigma^2 tau_c, equal to sigma^2 / (2 kappa) for telegraph noise.
    double rate = 0.0;
};

FastLimitSpec fast_limit_spec(const JumpNoise& noise, const DrivenHamiltonian& H);

// dG/dt = [h+, G] + rate [M, [M, G]] with M the binding term. In this real
// convention the double commutator is negative semidefinite, so the sign is +.
TimeSeries evolve_lindblad_fast(const FastLimitSpec& spec, const Matrix& gamma0,
                                const std::vector<Observable>& observables, const EvolveOptions& options);

// Frozen-noise average sum_m w_m O_m G0 O_m^T with w the initial distribution.
TimeSeries evolve_quasi_static(const JumpNoise& noise, const DrivenHamiltonian& H, const Matrix& gamma0,
                               const std::vector<Observable>& observables, const EvolveOptions& options);

struct TrajectoryOptions {
    int n_traj = 1000;
    std::uint64_t seed = 1;
    // Pfaffian parity is tracked along the first parity_trajectories samples.
    int parity_trajectories = 8;
    int threads = 0;
};

// Monte Carlo over sampled noise paths; exact propagation between switches
// for static Hamiltonians, RK4 otherwise. Reports per-time standard errors.
TimeSeries evolve_trajectory_average(const JumpNoise& noise, const DrivenHamiltonian& H, const Matrix& gamma0,
                                     const std::vector<Observable>& observables, const EvolveOptions& options,
                                     const TrajectoryOptions& traj);

// Noise-free single-particle propagator O(t1, t0): G(t1) = O G(t0) O^T.
Matrix propagator(const DrivenHamiltonian& H, double x, double t0, double t1, double dt = 0.0);
// O(t1, t0) v without forming O.
Matrix propagate(const DrivenHamiltonian& H, double x, double t0, double t1, const Matrix& v, double dt = 0.0);

// Step size picked by the automatic rule.
double automatic_dt(const JumpNoise& noise, const DrivenHamiltonian& H, double energy_scale);

}  // namespace kitnoise
