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

#include "kitnoise/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "internal.hpp"

namespace kitnoise {

namespace detail {

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void check_times(const std::vector<double>& times) {
    if (times.empty()) throw ParameterError("output time grid is empty");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!std::isfinite(times[k])) throw ParameterError("output time grid contains a non-finite value");
        if (k > 0 && !(times[k] > times[k - 1])) throw ParameterError("output time grid must be strictly increasing");
    }
}

TimeSeries make_series(const std::vector<Observable>& observables, const std::vector<double>& times) {
    TimeSeries ts;
    ts.t = times;
    for (const auto& o : observables) {
        ts.names.push_back(o.name);
        ts.values.emplace_back(times.size(), 0.0);
    }
    return ts;
}

std::vector<bool> sampled_indices(std::size_t count, int samples) {
    std::vector<bool> out(count, false);
    if (count == 0 || samples <= 0) return out;
    if (static_cast<std::size_t>(samples) >= count || samples == 1) {
        if (samples == 1) {
            out.back() = true;
        } else {
            std::fill(out.begin(), out.end(), true);
        }
        return out;
    }
    for (int j = 0; j < samples; ++j) {
        const double r = static_cast<double>(j) * static_cast<double>(count - 1) / (samples - 1);
        out[static_cast<std::size_t>(std::lround(r))] = true;
    }
    return out;
}

void commutator(const SparseMatrix& a, const Matrix& g, Matrix& out) {
    // Row-major operands take Eigen's fast sparse-dense kernel.
    thread_local RowMatrix gr;
    thread_local RowMatrix p;
    gr = g;
    p.noalias() = a * gr;
    out = p - p.transpose();
}

bool is_snapshot_time(const std::vector<double>& snapshot_times, double t) {
    return std::any_of(snapshot_times.begin(), snapshot_times.end(),
                       [&](double s) { return std::abs(s - t) <= 1e-9 * std::max(1.0, std::abs(t)); });
}

void record_diagnostics(InvariantReport& rep, const Matrix& g, bool spectral, bool pure) {
    rep.max_antisymmetry = std::max(rep.max_antisymmetry, max_abs(g + g.transpose()));
    if (spectral) {
        const CovarianceDiagnostics d = diagnose(g);
        rep.max_singular = std::max(rep.max_singular, d.max_singular);
        if (pure) rep.max_purity_defect = std::max(rep.max_purity_defect, d.purity_defect);
    }
}

bool is_pure(const Matrix& g) { return g.size() > 0 && diagnose(g).purity_defect < 1e-6; }

int substeps(double interval, double dt) {
    return std::max(1, static_cast<int>(std::ceil(interval / dt - 1e-9)));
}

// Rotates block-diagonal coordinates by exp(B t): block k becomes
// [[cos, -sin], [sin, cos]] (eps_k t) on both sides.
void rotate_blocks(const Vector& eps, double t, Matrix& g) {
    const int pairs = static_cast<int>(eps.size());
    for (int k = 0; k < pairs; ++k) {
        if (eps(k) == 0.0) continue;
        const double c = std::cos(eps(k) * t);
        const double s = std::sin(eps(k) * t);
        const int a = 2 * k;
        const int b = 2 * k + 1;
        const Eigen::RowVectorXd ra = g.row(a);
        const Eigen::RowVectorXd rb = g.row(b);
        g.row(a) = c * ra - s * rb;
        g.row(b) = s * ra + c * rb;
        const Vector ca = g.col(a);
        const Vector cb = g.col(b);
        g.col(a) = c * ca - s * cb;
        g.col(b) = s * ca + c * cb;
    }
}

Matrix magnus_step(const DrivenHamiltonian& H, double x, double t, double h) {
    constexpr double kNode = 0.28867513459481287;  // sqrt(3) / 6
    constexpr double kComm = 0.14433756729740643;  // sqrt(3) / 12
    const Matrix a1 = H.sparse_at(x, t + (0.5 - kNode) * h);
    const Matrix a2 = H.sparse_at(x, t + (0.5 + kNode) * h);
    const Matrix omega = (0.5 * h) * (a1 + a2) + (kComm * h * h) * (a2 * a1 - a1 * a2);
    return omega.exp();
}

}  // namespace detail

namespace {

using detail::commutator;
using detail::RowMatrix;
using detail::record_diagnostics;
using detail::rotate_blocks;
using detail::substeps;

Vector row_abs_sums(const SparseMatrix& m) {
    Vector s = Vector::Zero(m.rows());
    for (int r = 0; r < m.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(m, r); it; ++it) s(r) += std::abs(it.value());
    }
    return s;
}

// Row-sparse form of a nonnegative mixing matrix; entries below 1e-18 are dropped.
struct Mixer {
    std::vector<std::vector<std::pair<int, double>>> rows;

    explicit Mixer(const Matrix& a) : rows(static_cast<std::size_t>(a.rows())) {
        for (int m = 0; m < a.rows(); ++m) {
            for (int n = 0; n < a.cols(); ++n) {
                if (std::abs(a(m, n)) > 1e-18) rows[m].emplace_back(n, a(m, n));
            }
        }
    }

    void apply(const std::vector<Matrix>& in, std::vector<Matrix>& out) const {
        for (std::size_t m = 0; m < rows.size(); ++m) {
            out[m].setZero();
            for (const auto& [n, w] : rows[m]) out[m].noalias() += w * in[n];
        }
    }
};

void axpy(std::vector<Matrix>& y, double s, const std::vector<Matrix>& x) {
    for (std::size_t m = 0; m < y.size(); ++m) y[m].noalias() += s * x[m];
}

// Coherent parts h_m(t) G_m - G_m h_m(t) for every noise state.
class CoherentOperator {
  public:
    CoherentOperator(const DrivenHamiltonian& H, const std::vector<double>& xs) : H_(H), xs_(xs) {
        if (!H.time_dependent()) {
            for (double x : xs) fixed_.push_back(H.sparse_at(x, 0.0));
        }
    }

    void apply(double t, const std::vector<Matrix>& in, std::vector<Matrix>& out) {
        if (H_.time_dependent()) {
            const SparseMatrix base = H_.sparse_at(0.0, t);
            const SparseMatrix& b = H_.binding().term.h;
            for (std::size_t m = 0; m < in.size(); ++m) {
                in_ = in[m];
                scratch_.noalias() = base * in_;
                if (xs_[m] != 0.0) scratch_.noalias() += xs_[m] * (b * in_);
                out[m] = scratch_ - scratch_.transpose();
            }
        } else {
            for (std::size_t m = 0; m < in.size(); ++m) commutator(fixed_[m], in[m], out[m]);
        }
    }

  private:
    const DrivenHamiltonian& H_;
    std::vector<double> xs_;
    std::vector<SparseMatrix> fixed_;
    RowMatrix in_;
    RowMatrix scratch_;
};

double max_series_delta(const TimeSeries& a, const TimeSeries& b) {
    double d = 0.0;
    for (std::size_t o = 0; o < a.values.size(); ++o) {
        for (std::size_t k = 0; k < a.values[o].size(); ++k) d = std::max(d, std::abs(a.values[o][k] - b.values[o][k]));
    }
    return d;
}

}  // namespace

// -- bindings ---------------------------------------------------------------

std::string ParameterBinding::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::GlobalMu: os << "global_mu"; break;
        case Kind::SiteMu: os << "site_mu(" << site << ")"; break;
        case Kind::SitePotential: os << "site_potential(" << site << ")"; break;
        case Kind::BondScale: os << "bond_scale(" << bond_i << "," << bond_j << ")"; break;
        case Kind::Custom: os << "custom"; break;
    }
    return os.str();
}

ParameterBinding bind_global_mu(const WireNetwork& network) {
    ParameterBinding b;
    b.kind = ParameterBinding::Kind::GlobalMu;
    const int n = network.size();
    b.term.h = SparseMatrix(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        const HamiltonianTerm t = site_potential_term(n, j);
        b.term.h -= t.h;
        b.term.constant -= t.constant;
    }
    return b;
}

ParameterBinding bind_site_mu(const WireNetwork& network, int site) {
    if (site < 0 || site >= network.size()) throw GeometryError("site_mu binding refers to missing site " + std::to_string(site));
    ParameterBinding b;
    b.kind = ParameterBinding::Kind::SiteMu;
    b.site = site;
    const HamiltonianTerm t = site_potential_term(network.size(), site);
    b.term.h = -t.h;
    b.term.constant = -t.constant;
    return b;
}

ParameterBinding bind_site_potential(const WireNetwork& network, int site) {
    if (site < 0 || site >= network.size()) {
        throw GeometryError("site_potential binding refers to missing site " + std::to_string(site));
    }
    ParameterBinding b;
    b.kind = ParameterBinding::Kind::SitePotential;
    b.site = site;
    b.term = site_potential_term(network.size(), site);
    return b;
}

ParameterBinding bind_bond_scale(const WireNetwork& network, int i, int j) {
    const int k = network.find_bond(i, j);
    if (k < 0) throw GeometryError("bond_scale binding refers to missing bond (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    ParameterBinding b;
    b.kind = ParameterBinding::Kind::BondScale;
    b.bond_i = i;
    b.bond_j = j;
    b.term = bond_term(network.size(), network.bonds()[k]);
    return b;
}

ParameterBinding bind_custom(HamiltonianTerm term) {
    ParameterBinding b;
    b.kind = ParameterBinding::Kind::Custom;
    b.term = std::move(term);
    return b;
}

// -- driven Hamiltonian -----------------------------------------------------

DrivenHamiltonian::DrivenHamiltonian(const WireNetwork& network, ParameterBinding binding, Schedule schedule)
    : base_(build_hamiltonian(network)), binding_(std::move(binding)), schedule_(std::move(schedule)) {
    if (binding_.term.h.rows() != base_.dim() || binding_.term.h.cols() != base_.dim()) {
        throw ParameterError("binding term dimension does not match the network");
    }
    base_sparse_ = base_.h.sparseView();
    schedule_.validate(network);
    for (const RampTarget& r : schedule_.targets()) {
        if (r.kind == RampTarget::Kind::SitePotential) {
            ramp_terms_.push_back(site_potential_term(network.size(), r.i));
        } else {
            ramp_terms_.push_back(bond_term(network.size(), network.bonds()[network.find_bond(r.i, r.j)]));
        }
    }
    build_pattern();
}

DrivenHamiltonian::DrivenHamiltonian(MajoranaHamiltonian base, ParameterBinding binding)
    : base_(std::move(base)), binding_(std::move(binding)) {
    if (binding_.term.h.rows() != base_.dim() || binding_.term.h.cols() != base_.dim()) {
        throw ParameterError("binding term dimension does not match the Hamiltonian");
    }
    base_sparse_ = base_.h.sparseView();
    build_pattern();
}

void DrivenHamiltonian::build_pattern() {
    SparseMatrix mask = base_sparse_.cwiseAbs() + binding_.term.h.cwiseAbs();
    for (const auto& r : ramp_terms_) mask += r.h.cwiseAbs();
    mask.makeCompressed();
    pattern_ = mask;
    std::fill(pattern_.valuePtr(), pattern_.valuePtr() + pattern_.nonZeros(), 0.0);
    auto scatter = [&](const SparseMatrix& term) {
        std::vector<std::pair<int, double>> out;
        for (int r = 0; r < term.outerSize(); ++r) {
            const int* begin = pattern_.innerIndexPtr() + pattern_.outerIndexPtr()[r];
            const int* end = pattern_.innerIndexPtr() + pattern_.outerIndexPtr()[r + 1];
            for (SparseMatrix::InnerIterator it(term, r); it; ++it) {
                const int* pos = std::lower_bound(begin, end, static_cast<int>(it.col()));
                out.emplace_back(static_cast<int>(pos - pattern_.innerIndexPtr()), it.value());
            }
        }
        return out;
    };
    auto dense_values = [&](const SparseMatrix& term) {
        Vector v = Vector::Zero(pattern_.nonZeros());
        for (const auto& [pos, val] : scatter(term)) v(pos) += val;
        return v;
    };
    base_values_ = dense_values(base_sparse_);
    binding_values_ = dense_values(binding_.term.h);
    ramp_values_.clear();
    for (const auto& r : ramp_terms_) ramp_values_.push_back(scatter(r.h));
}

SparseMatrix DrivenHamiltonian::sparse_at(double x, double t) const {
    SparseMatrix h = pattern_;
    Eigen::Map<Vector> v(h.valuePtr(), h.nonZeros());
    v = base_values_;
    if (x != 0.0) v += x * binding_values_;
    if (!ramp_terms_.empty()) {
        const std::vector<double> u = schedule_.offsets(t);
        for (std::size_t r = 0; r < u.size(); ++r) {
            if (u[r] == 0.0) continue;
            for (const auto& [pos, val] : ramp_values_[r]) v(pos) += u[r] * val;
        }
    }
    return h;
}

MajoranaHamiltonian DrivenHamiltonian::at(double x, double t) const {
    MajoranaHamiltonian out;
    out.h = Matrix(sparse_at(x, t));
    out.constant = base_.constant + x * binding_.term.constant;
    out.site_x = base_.site_x;
    if (!ramp_terms_.empty()) {
        const std::vector<double> u = schedule_.offsets(t);
        for (std::size_t r = 0; r < u.size(); ++r) out.constant += u[r] * ramp_terms_[r].constant;
    }
    return out;
}

double DrivenHamiltonian::ramp_rate() const {
    const std::vector<RampTarget> targets = schedule_.targets();
    std::vector<double> scale;
    for (const auto& r : ramp_terms_) scale.push_back(row_abs_sums(r.h).maxCoeff());
    double rate = 0.0;
    for (const ScheduleStep& step : schedule_.steps()) {
        if (!(step.duration > 0.0)) continue;
        double s = 0.0;
        for (const Ramp& r : step.ramps) {
            const auto it = std::find_if(targets.begin(), targets.end(), [&](const RampTarget& t) {
                return t.kind == r.target.kind && t.i == r.target.i && t.j == r.target.j;
            });
            s += std::abs(r.end - r.start) * scale[static_cast<std::size_t>(it - targets.begin())];
        }
        rate = std::max(rate, 0.5 * std::numbers::pi * s / step.duration);
    }
    return rate;
}

double DrivenHamiltonian::spectral_bound(const std::vector<double>& xs) const {
    double xmax = 0.0;
    for (double x : xs) xmax = std::max(xmax, std::abs(x));
    Vector rows = row_abs_sums(base_sparse_) + xmax * row_abs_sums(binding_.term.h);
    const std::vector<double> m = schedule_.max_offsets();
    for (std::size_t r = 0; r < ramp_terms_.size(); ++r) rows += m[r] * row_abs_sums(ramp_terms_[r].h);
    return rows.size() == 0 ? 0.0 : rows.maxCoeff();
}

// -- observables ------------------------------------------------------------

double Observable::evaluate(std::size_t k, double t, const Matrix& g) const {
    if (custom) return custom(k, t, g);
    if (weight.rows() != g.rows() || weight.cols() != g.cols()) {
        throw ParameterError("observable '" + name + "' has the wrong dimension");
    }
    return weight.cwiseProduct(g).sum() + offset;
}

Observable edge_observable(const EdgeModes& modes, std::string name) {
    Observable o;
    o.name = std::move(name);
    o.weight = -modes.f_left * modes.f_right.transpose();
    return o;
}

Observable energy_observable(const MajoranaHamiltonian& H, std::string name) {
    Observable o;
    o.name = std::move(name);
    o.weight = 0.25 * H.h;
    o.offset = H.constant;
    return o;
}

Observable entry_observable(int i, int l) {
    Observable o;
    o.name = "G_" + std::to_string(i) + "_" + std::to_string(l);
    o.custom = [i, l](std::size_t, double, const Matrix& g) {
        if (i < 0 || l < 0 || i >= g.rows() || l >= g.cols()) throw ParameterError("entry observable out of range");
        return g(i, l);
    };
    return o;
}

std::vector<double> uniform_grid(double t_max, double step, double t0) {
    if (!(step > 0.0)) throw ParameterError("grid step must be positive");
    if (!(t_max > t0)) throw ParameterError("grid end must exceed its start");
    const int n = static_cast<int>(std::floor((t_max - t0) / step + 1e-9));
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n) + 2);
    for (int k = 0; k <= n; ++k) out.push_back(t0 + k * step);
    if (t_max - out.back() > 1e-9 * step) out.push_back(t_max);
    return out;
}

void InvariantReport::merge(const InvariantReport& other) {
    max_antisymmetry = std::max(max_antisymmetry, other.max_antisymmetry);
    max_singular = std::max(max_singular, other.max_singular);
    max_purity_defect = std::max(max_purity_defect, other.max_purity_defect);
    max_probability_error = std::max(max_probability_error, other.max_probability_error);
    max_chapman_error = std::max(max_chapman_error, other.max_chapman_error);
    parity_checked += other.parity_checked;
    parity_violations += other.parity_violations;
}

const std::vector<double>& TimeSeries::column(const std::string& name) const {
    for (std::size_t o = 0; o < names.size(); ++o) {
        if (names[o] == name) return values[o];
    }
    throw ParameterError("no observable named '" + name + "'");
}

// -- marginal evolution ----------------------------------------------------

Matrix MarginalEnsemble::averaged() const {
    if (gamma.empty()) return Matrix();
    Matrix s = gamma.front();
    for (std::size_t m = 1; m < gamma.size(); ++m) s += gamma[m];
    return s;
}

MarginalEnsemble make_ensemble(const JumpNoise& noise, const Matrix& gamma0) {
    MarginalEnsemble e;
    e.p = initial_distribution(noise);
    for (int m = 0; m < noise.size(); ++m) e.gamma.push_back(e.p(m) * gamma0);
    return e;
}

double automatic_dt(const JumpNoise& noise, const DrivenHamiltonian& H, double energy_scale) {
    double dt = 0.01 / (energy_scale > 0.0 ? energy_scale : 1.0);
    const double rate = noise.max_rate();
    if (rate > 0.0) dt = std::min(dt, 0.1 / rate);
    const double bound = H.spectral_bound(noise.states);
    if (bound > 0.0) dt = std::min(dt, 0.1 / bound);
    const double ramp = H.ramp_rate();
    if (ramp > 0.0) dt = std::min(dt, 0.01 / ramp);
    return dt;
}

TimeSeries evolve_marginal(const JumpNoise& noise, const DrivenHamiltonian& H, const Matrix& gamma0,
                           const std::vector<Observable>& observables, const EvolveOptions& options) {
    if (gamma0.rows() != H.dim() || gamma0.cols() != H.dim()) {
        throw ParameterError("initial covariance dimension does not match the Hamiltonian");
    }
    MarginalEnsemble e = make_ensemble(noise, gamma0);
    return evolve_marginal(e, noise, H, observables, options);
}

TimeSeries evolve_marginal(MarginalEnsemble& ens, const JumpNoise& noise, const DrivenHamiltonian& H,
                           const std::vector<Observable>& observables, const EvolveOptions& options) {
    validate(noise);
    detail::check_times(options.times);
    const int M = noise.size();
    const int n = H.dim();
    if (static_cast<int>(ens.gamma.size()) != M || ens.p.size() != M) {
        throw ParameterError("ensemble size does not match the number of noise states");
    }
    for (const auto& g : ens.gamma) {
        if (g.rows() != n || g.cols() != n) throw ParameterError("ensemble covariance dimension mismatch");
    }
    const bool single = M == 1 || (noise.generator.cwiseAbs().maxCoeff() == 0.0 && (ens.p.array() != 0.0).count() == 1);
    const bool expect_pure = single && detail::is_pure(ens.averaged());
    const double dt = options.dt > 0.0 ? options.dt : automatic_dt(noise, H, options.energy_scale);

    std::optional<MarginalEnsemble> initial;
    if (options.convergence_check) initial = ens;

    TimeSeries ts = detail::make_series(observables, options.times);
    ts.dt_used = dt;
    const std::vector<bool> sampled = detail::sampled_indices(options.times.size(), options.invariant_samples);
    const Vector p0 = ens.p;
    const Matrix& L = noise.generator;
    const double t0 = options.times.front();

    auto record = [&](std::size_t k) {
        const double t = options.times[k];
        const Matrix avg = ens.averaged();
        if (!avg.allFinite()) throw IntegrationError("covariance became non-finite at t = " + std::to_string(t));
        for (std::size_t o = 0; o < observables.size(); ++o) ts.values[o][k] = observables[o].evaluate(k, t, avg);
        if (detail::is_snapshot_time(options.snapshot_times, t)) ts.snapshots.emplace_back(t, avg);
        if (options.check_invariants) {
            record_diagnostics(ts.invariants, avg, sampled[k], expect_pure);
            ts.invariants.max_probability_error =
                std::max(ts.invariants.max_probability_error, std::abs(ens.p.sum() - 1.0));
            if (sampled[k]) {
                const Vector exact = (L * (t - t0)).exp() * p0;
                ts.invariants.max_chapman_error =
                    std::max(ts.invariants.max_chapman_error, (exact - ens.p).cwiseAbs().maxCoeff());
            }
        }
        if (k + 1 == options.times.size()) ts.final_gamma = avg;
    };

    CoherentOperator coherent(H, noise.states);
    std::vector<Matrix> ay(M, Matrix(n, n)), tb(M, Matrix(n, n)), kb(M, Matrix(n, n)), xb(M, Matrix(n, n));
    std::vector<Matrix>& y = ens.gamma;

    double cached_h = -1.0;
    Matrix half;
    std::optional<Mixer> mix;

    record(0);
    for (std::size_t k = 1; k < options.times.size(); ++k) {
        const double interval = options.times[k] - options.times[k - 1];
        const int steps = substeps(interval, dt);
        const double h = interval / steps;
        if (std::abs(h - cached_h) > 1e-15 * h) {
            half = (L * (0.5 * h)).exp();
            mix.emplace(half);
            cached_h = h;
        }
        for (int s = 0; s < steps; ++s) {
            const double t = options.times[k - 1] + s * h;
            // Integrating-factor RK4 with a = exp(L h / 2):
            // y' = a (a (y + h/6 K1) + h/3 (N2 + N3)) + h/6 N4.
            coherent.apply(t, y, kb);                       // K1
            mix->apply(y, ay);                              // a y
            for (int m = 0; m < M; ++m) tb[m] = y[m] + 0.5 * h * kb[m];
            axpy(y, h / 6.0, kb);                           // y + h/6 K1
            mix->apply(tb, kb);                             // a (y + h/2 K1)
            coherent.apply(t + 0.5 * h, kb, tb);            // N2
            for (int m = 0; m < M; ++m) kb[m] = ay[m] + 0.5 * h * tb[m];
            coherent.apply(t + 0.5 * h, kb, xb);            // N3
            axpy(tb, 1.0, xb);                              // N2 + N3
            axpy(ay, h, xb);                                // a y + h N3
            mix->apply(ay, kb);
            coherent.apply(t + h, kb, xb);                  // N4
            mix->apply(y, ay);
            axpy(ay, h / 3.0, tb);
            mix->apply(ay, y);
            axpy(y, h / 6.0, xb);
            ens.p = half * (half * ens.p).eval();
        }
        record(k);
    }

    if (options.convergence_check) {
        EvolveOptions fine = options;
        fine.dt = 0.5 * dt;
        fine.convergence_check = false;
        fine.check_invariants = false;
        fine.snapshot_times.clear();
        const TimeSeries other = evolve_marginal(*initial, noise, H, observables, fine);
        ts.convergence_delta = max_series_delta(ts, other);
    }
    return ts;
}

TimeSeries evolve_unitary(const DrivenHamiltonian& H, double x, const Matrix& gamma0,
                          const std::vector<Observable>& observables, const EvolveOptions& options) {
    detail::check_times(options.times);
    const int n = H.dim();
    if (gamma0.rows() != n || gamma0.cols() != n) throw ParameterError("initial covariance dimension mismatch");
    JumpNoise single;
    single.states = {x};
    single.generator = Matrix::Zero(1, 1);
    const double dt = options.dt > 0.0 ? options.dt : automatic_dt(single, H, options.energy_scale);
    const bool expect_pure = detail::is_pure(gamma0);
    const std::vector<bool> sampled = detail::sampled_indices(options.times.size(), options.invariant_samples);

    TimeSeries ts = detail::make_series(observables, options.times);
    Matrix g = gamma0;
    auto record = [&](std::size_t k) {
        const double t = options.times[k];
        if (!g.allFinite()) throw IntegrationError("covariance became non-finite at t = " + std::to_string(t));
        for (std::size_t o = 0; o < observables.size(); ++o) ts.values[o][k] = observables[o].evaluate(k, t, g);
        if (detail::is_snapshot_time(options.snapshot_times, t)) ts.snapshots.emplace_back(t, g);
        if (options.check_invariants) record_diagnostics(ts.invariants, g, sampled[k], expect_pure);
    };

    record(0);
    if (!H.time_dependent()) {
        // Exact rotation in the normal-form basis.
        const NormalForm nf = normal_form(H.at(x, 0.0).h);
        Matrix b = nf.q.transpose() * gamma0 * nf.q;
        for (std::size_t k = 1; k < options.times.size(); ++k) {
            rotate_blocks(nf.eps, options.times[k] - options.times[k - 1], b);
            g = nf.q * b * nf.q.transpose();
            record(k);
        }
        if (options.convergence_check) ts.convergence_delta = 0.0;
    } else {
        ts.dt_used = dt;
        for (std::size_t k = 1; k < options.times.size(); ++k) {
            const double interval = options.times[k] - options.times[k - 1];
            const int steps = substeps(interval, dt);
            const double h = interval / steps;
            for (int s = 0; s < steps; ++s) {
                const Matrix u = detail::magnus_step(H, x, options.times[k - 1] + s * h, h);
                g = u * g * u.transpose();
            }
            record(k);
        }
        if (options.convergence_check) {
            EvolveOptions fine = options;
            fine.dt = 0.5 * dt;
            fine.convergence_check = false;
            fine.check_invariants = false;
            fine.snapshot_times.clear();
            ts.convergence_delta = max_series_delta(ts, evolve_unitary(H, x, gamma0, observables, fine));
        }
    }
    ts.final_gamma = g;
    return ts;
}

// -- fast-noise limit ------------------------------------------------------

FastLimitSpec fast_limit_spec(const JumpNoise& noise, const DrivenHamiltonian& H) {
    const NoiseStatistics s = statistics(noise);
    return FastLimitSpec{H, s.mean, s.variance * s.correlation_time};
}

TimeSeries evolve_lindblad_fast(const FastLimitSpec& spec, const Matrix& gamma0,
                                const std::vector<Observable>& observables, const EvolveOptions& options) {
    detail::check_times(options.times);
    const DrivenHamiltonian& H = spec.hamiltonian;
    const int n = H.dim();
    if (gamma0.rows() != n || gamma0.cols() != n) throw ParameterError("initial covariance dimension mismatch");
    if (spec.rate < 0.0) throw ParameterError("fast-limit damping rate must be nonnegative");

    double dt = options.dt;
    if (!(dt > 0.0)) {
        dt = 0.01 / (options.energy_scale > 0.0 ? options.energy_scale : 1.0);
        const double bound = H.spectral_bound({spec.mean});
        if (bound > 0.0) dt = std::min(dt, 0.1 / bound);
        const double mb = row_abs_sums(H.binding().term.h).maxCoeff();
        if (spec.rate * mb * mb > 0.0) dt = std::min(dt, 0.1 / (spec.rate * mb * mb));
        if (H.ramp_rate() > 0.0) dt = std::min(dt, 0.01 / H.ramp_rate());
    }
    TimeSeries ts = detail::make_series(observables, options.times);
    ts.dt_used = dt;
    const std::vector<bool> sampled = detail::sampled_indices(options.times.size(), options.invariant_samples);
    const SparseMatrix& B = H.binding().term.h;
    const bool expect_pure = spec.rate == 0.0 && detail::is_pure(gamma0);
    Matrix inner(n, n), outer(n, n);

    auto rhs = [&](double t, const Matrix& g, Matrix& out) {
        commutator(H.sparse_at(spec.mean, t), g, out);
        if (spec.rate > 0.0) {
            commutator(B, g, inner);
            commutator(B, inner, outer);
            out.noalias() += spec.rate * outer;
        }
    };

    Matrix g = gamma0, k1(n, n), k2(n, n), k3(n, n), k4(n, n);
    auto record = [&](std::size_t k) {
        const double t = options.times[k];
        if (!g.allFinite()) throw IntegrationError("covariance became non-finite at t = " + std::to_string(t));
        for (std::size_t o = 0; o < observables.size(); ++o) ts.values[o][k] = observables[o].evaluate(k, t, g);
        if (detail::is_snapshot_time(options.snapshot_times, t)) ts.snapshots.emplace_back(t, g);
        if (options.check_invariants) record_diagnostics(ts.invariants, g, sampled[k], expect_pure);
    };
    record(0);
    for (std::size_t k = 1; k < options.times.size(); ++k) {
        const double interval = options.times[k] - options.times[k - 1];
        const int steps = substeps(interval, dt);
        const double h = interval / steps;
        for (int s = 0; s < steps; ++s) {
            const double t = options.times[k - 1] + s * h;
            rhs(t, g, k1);
            rhs(t + 0.5 * h, g + 0.5 * h * k1, k2);
            rhs(t + 0.5 * h, g + 0.5 * h * k2, k3);
            rhs(t + h, g + h * k3, k4);
            g += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        record(k);
    }
    ts.final_gamma = g;
    return ts;
}

// -- quasi-static limit ----------------------------------------------------

TimeSeries evolve_quasi_static(const JumpNoise& noise, const DrivenHamiltonian& H, const Matrix& gamma0,
                               const std::vector<Observable>& observables, const EvolveOptions& options) {
    validate(noise);
    detail::check_times(options.times);
    const int n = H.dim();
    if (gamma0.rows() != n || gamma0.cols() != n) throw ParameterError("initial covariance dimension mismatch");
    if (noise.max_rate() > 0.0) {
        const double tau = statistics(noise).correlation_time;
        if (options.times.back() - options.times.front() > tau) {
            warn("quasi-static evolution over " + std::to_string(options.times.back() - options.times.front()) +
                 " exceeds the noise correlation time " + std::to_string(tau));
        }
    }

    if (H.time_dependent()) {
        JumpNoise frozen = noise;
        frozen.generator = Matrix::Zero(noise.size(), noise.size());
        MarginalEnsemble e;
        e.p = initial_distribution(noise);
        for (int m = 0; m < noise.size(); ++m) e.gamma.push_back(e.p(m) * gamma0);
        frozen.stationary_start = false;
        return evolve_marginal(e, frozen, H, observables, options);
    }

    const Vector w = initial_distribution(noise);
    TimeSeries ts = detail::make_series(observables, options.times);
    const bool expect_pure = (w.array() != 0.0).count() == 1 && detail::is_pure(gamma0);
    const std::vector<bool> sampled = detail::sampled_indices(options.times.size(), options.invariant_samples);
    std::vector<Matrix> avg(options.times.size(), Matrix::Zero(n, n));
    const double t0 = options.times.front();
    for (int m = 0; m < noise.size(); ++m) {
        if (w(m) == 0.0) continue;
        const NormalForm nf = normal_form(H.at(noise.states[m], t0).h);
        const Matrix g0 = nf.q.transpose() * gamma0 * nf.q;
        for (std::size_t k = 0; k < options.times.size(); ++k) {
            Matrix g = g0;
            rotate_blocks(nf.eps, options.times[k] - t0, g);
            avg[k].noalias() += w(m) * (nf.q * g * nf.q.transpose());
        }
    }
    for (std::size_t k = 0; k < options.times.size(); ++k) {
        const double t = options.times[k];
        for (std::size_t o = 0; o < observables.size(); ++o) ts.values[o][k] = observables[o].evaluate(k, t, avg[k]);
        if (detail::is_snapshot_time(options.snapshot_times, t)) ts.snapshots.emplace_back(t, avg[k]);
        if (options.check_invariants) record_diagnostics(ts.invariants, avg[k], sampled[k], expect_pure);
    }
    ts.final_gamma = avg.back();
    return ts;
}

// -- propagator ------------------------------------------------------------

Matrix propagate(const DrivenHamiltonian& H, double x, double t0, double t1, const Matrix& v, double dt) {
    const int n = H.dim();
    if (v.rows() != n) throw ParameterError("propagated vectors have the wrong dimension");
    if (!H.time_dependent()) {
        const NormalForm nf = normal_form(H.at(x, t0).h);
        Matrix w = nf.q.transpose() * v;
        for (int k = 0; k < nf.eps.size(); ++k) {
            const double c = std::cos(nf.eps(k) * (t1 - t0));
            const double s = std::sin(nf.eps(k) * (t1 - t0));
            const Eigen::RowVectorXd a = w.row(2 * k);
            const Eigen::RowVectorXd b = w.row(2 * k + 1);
            w.row(2 * k) = c * a - s * b;
            w.row(2 * k + 1) = s * a + c * b;
        }
        return nf.q * w;
    }
    if (!(dt > 0.0)) {
        dt = 0.01;
        const double bound = H.spectral_bound({x});
        if (bound > 0.0) dt = std::min(dt, 0.1 / bound);
        const double ramp = H.ramp_rate();
        if (ramp > 0.0) dt = std::min(dt, 0.01 / ramp);
    }
    Matrix o = v;
    if (t1 == t0) return o;
    const int steps = substeps(std::abs(t1 - t0), dt);
    const double h = (t1 - t0) / steps;
    for (int s = 0; s < steps; ++s) o = detail::magnus_step(H, x, t0 + s * h, h) * o;
    return o;
}

Matrix propagator(const DrivenHamiltonian& H, double x, double t0, double t1, double dt) {
    return propagate(H, x, t0, t1, Matrix::Identity(H.dim(), H.dim()), dt);
}

}  // namespace kitnoise
