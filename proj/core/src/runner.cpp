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

#include "kitnoise/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numeric>

#include "kitnoise/analysis.hpp"
#include "kitnoise/parallel.hpp"
#include "kitnoise/protocols.hpp"

#ifndef KITNOISE_VERSION
#define KITNOISE_VERSION "0.0.0"
#endif

namespace kitnoise {

std::string version() { return KITNOISE_VERSION; }

namespace {

// Edge-mode and ground-state tolerance; finite-size splittings of the shorter
// smoke-profile wires sit well above 1e-6.
constexpr double kModeTol = 1e-2;

double num(const Json& c, const std::string& path) {
    const Json* v = find_path(c, path);
    if (!v || !v->is_number()) throw ParameterError(path + ": must be a number");
    return v->get<double>();
}

int integer(const Json& c, const std::string& path) {
    const Json* v = find_path(c, path);
    if (!v || !v->is_number_integer()) throw ParameterError(path + ": must be an integer");
    return v->get<int>();
}

std::string str(const Json& c, const std::string& path) {
    const Json* v = find_path(c, path);
    if (!v || !v->is_string()) throw ParameterError(path + ": must be a string");
    return v->get<std::string>();
}

struct System {
    WireNetwork network;
    std::optional<TJunction> junction;
};

System build_system(const Json& c, double mu_override = std::nan("")) {
    System s;
    const std::string geometry = str(c, "system.geometry");
    const double J = num(c, "system.J");
    if (geometry == "tjunction") {
        const Complex dx(num(c, "system.tjunction.delta_x"), 0.0);
        s.junction = build_tjunction(integer(c, "system.tjunction.left"), integer(c, "system.tjunction.right"),
                                     integer(c, "system.tjunction.vertical"), J, dx, Complex(0.0, -1.0) * dx,
                                     num(c, "system.tjunction.mu_topological"),
                                     num(c, "system.tjunction.mu_nontopological"));
        s.network = s.junction->network;
        return s;
    }
    const Complex delta(num(c, "system.delta"), num(c, "system.delta_imag"));
    const double mu = std::isnan(mu_override) ? num(c, "system.mu") : mu_override;
    const int n = integer(c, "system.N");
    s.network = geometry == "ring" ? WireNetwork::ring(n, J, delta, mu) : WireNetwork::chain(n, J, delta, mu);
    return s;
}

JumpNoise build_noise(const Json& c) {
    const std::string type = str(c, "noise.type");
    JumpNoise noise;
    if (type == "telegraph") {
        noise = telegraph(num(c, "noise.a"), num(c, "noise.b"), num(c, "noise.kappa"));
    } else if (type == "gaussian-lattice") {
        noise = discretized_gaussian(num(c, "noise.mean"), num(c, "noise.sigma"), num(c, "noise.tau_c"),
                                     integer(c, "noise.n_r"));
    } else {
        noise.states = {0.0};
        noise.generator = Matrix::Zero(1, 1);
    }
    noise.stationary_start = c["noise"]["stationary_start"].get<bool>();
    return noise;
}

double noise_sigma(const Json& c) {
    const std::string type = str(c, "noise.type");
    if (type == "telegraph") return 0.5 * std::abs(num(c, "noise.b") - num(c, "noise.a"));
    if (type == "gaussian-lattice") return num(c, "noise.sigma");
    return 0.0;
}

ParameterBinding build_binding(const Json& c, const System& s) {
    const std::string target = str(c, "noise.binding.target");
    if (target == "global_mu") return bind_global_mu(s.network);
    if (target == "site_mu") return bind_site_mu(s.network, integer(c, "noise.binding.site") - 1);
    if (target == "site_potential") return bind_site_potential(s.network, integer(c, "noise.binding.site") - 1);
    if (target == "bond_split") {
        const Json& b = c["noise"]["binding"]["bond"];
        return build_split_binding(s.network, b[0].get<int>() - 1, b[1].get<int>() - 1);
    }
    if (target == "junction") {
        if (!s.junction) throw GeometryError("noise.binding.target: junction binding needs a tjunction geometry");
        return bind_site_potential(s.network, s.junction->center);
    }
    throw ParameterError("noise.binding.target: unknown target '" + target + "'");
}

EdgeModes require_modes(const MajoranaHamiltonian& h) {
    auto modes = zero_modes(h, kModeTol);
    if (!modes) throw StateError("observables: 'edge' needs Majorana edge modes, but the initial Hamiltonian has none");
    return *modes;
}

Matrix prepare_ground_state(const MajoranaHamiltonian& h) {
    GroundStateOptions g;
    g.zero_tol = kModeTol;
    return ground_state_covariance(h, g);
}

std::vector<Observable> build_observables(const Json& c, const DrivenHamiltonian& H, double x0, double x_mean,
                                          const Matrix& gamma0) {
    std::vector<Observable> out;
    const MajoranaHamiltonian h0 = H.at(x0, 0.0);
    const MajoranaHamiltonian h_mean = H.at(x_mean, 0.0);
    const double n_sites = h0.sites();
    for (const Json& item : c["observables"]) {
        const std::string name = item.get<std::string>();
        if (name == "edge") {
            out.push_back(edge_observable(require_modes(h0), "edge"));
        } else if (name == "energy") {
            out.push_back(energy_observable(h_mean, "energy"));
        } else if (name == "delta_energy" || name == "delta_energy_per_site") {
            Observable o = energy_observable(h_mean, name);
            o.offset -= energy_expectation(h_mean, gamma0);
            if (name == "delta_energy_per_site") {
                o.weight /= n_sites;
                o.offset /= n_sites;
            }
            out.push_back(std::move(o));
        } else if (name.rfind("G_", 0) == 0) {
            int i = -1;
            int l = -1;
            if (std::sscanf(name.c_str(), "G_%d_%d", &i, &l) != 2) {
                throw ParameterError("observables: cannot parse '" + name + "' as G_i_j");
            }
            out.push_back(entry_observable(i, l));
        } else {
            throw ParameterError("observables: unknown observable '" + name + "'");
        }
    }
    return out;
}

std::vector<double> snapshot_times(const Json& c) {
    std::vector<double> out;
    for (const Json& t : c["output"]["snapshot_times"]) out.push_back(t.get<double>());
    return out;
}

CsvTable snapshot_table(const TimeSeries& ts) {
    CsvTable table;
    table.header = {"t", "i", "j", "value"};
    for (const auto& [t, g] : ts.snapshots) {
        for (int i = 0; i < g.rows(); ++i) {
            for (int j = 0; j < g.cols(); ++j) {
                table.add_row({format_double(t), std::to_string(i), std::to_string(j), format_double(g(i, j))});
            }
        }
    }
    return table;
}

void add_final_values(const TimeSeries& ts, PointOutput& out) {
    for (std::size_t k = 0; k < ts.names.size(); ++k) {
        if (!ts.values[k].empty()) out.summary.emplace_back(ts.names[k] + "_final", ts.values[k].back());
    }
    out.summary.emplace_back("dt", ts.dt_used);
    if (ts.convergence_delta >= 0.0) out.summary.emplace_back("convergence_delta", ts.convergence_delta);
}

// Runs the configured backend on a grid.
TimeSeries run_backend(const Json& c, const JumpNoise& noise, const DrivenHamiltonian& H, double x0,
                       const Matrix& gamma0, const std::vector<Observable>& obs, EvolveOptions opt,
                       const RunOptions& options) {
    const std::string backend = str(c, "run.backend");
    if (backend == "marginal") return evolve_marginal(noise, H, gamma0, obs, opt);
    if (backend == "unitary") return evolve_unitary(H, x0, gamma0, obs, opt);
    if (backend == "lindblad") return evolve_lindblad_fast(fast_limit_spec(noise, H), gamma0, obs, opt);
    if (backend == "quasi_static") return evolve_quasi_static(noise, H, gamma0, obs, opt);
    if (backend == "trajectory") {
        TrajectoryOptions traj;
        traj.n_traj = integer(c, "run.n_traj");
        traj.seed = c["run"]["seed"].get<std::uint64_t>();
        traj.parity_trajectories = integer(c, "run.parity_trajectories");
        traj.threads = options.threads;
        return evolve_trajectory_average(noise, H, gamma0, obs, opt, traj);
    }
    throw ParameterError("run.backend: unknown backend '" + backend + "'");
}

// Short noise-free purity run plus a few parity-tracked trajectories.
InvariantReport probe_invariants(const JumpNoise& noise, const DrivenHamiltonian& H, double x0, const Matrix& gamma0,
                                 double horizon, std::uint64_t seed) {
    InvariantReport report;
    EvolveOptions opt;
    opt.times = uniform_grid(std::min(horizon, 2.0), std::min(horizon, 2.0) / 8.0);
    opt.energy_scale = 1.0;
    opt.invariant_samples = 9;
    report.merge(evolve_unitary(H, x0, gamma0, {}, opt).invariants);
    if (noise.size() > 1) {
        TrajectoryOptions traj;
        traj.n_traj = 4;
        traj.seed = seed;
        traj.parity_trajectories = 4;
        traj.threads = 1;
        report.merge(evolve_trajectory_average(noise, H, gamma0, {}, opt, traj).invariants);
    }
    return report;
}

PointOutput evaluate_evolution(const Json& c, const RunOptions& options, bool heating) {
    const System sys = build_system(c);
    const JumpNoise noise = build_noise(c);
    const DrivenHamiltonian H(sys.network, build_binding(c, sys));
    const double x0 = num(c, "initial.x");
    const double x_mean = statistics(noise).mean;
    const Matrix gamma0 = prepare_ground_state(H.at(x0, 0.0));

    Json obs_cfg = c;
    if (heating) obs_cfg["observables"] = Json::array({"delta_energy_per_site"});
    const std::vector<Observable> obs = build_observables(obs_cfg, H, x0, x_mean, gamma0);

    EvolveOptions opt;
    opt.times = uniform_grid(num(c, "run.t_max"), num(c, "run.output_step"));
    opt.dt = num(c, "run.dt");
    opt.energy_scale = sys.network.energy_scale();
    opt.snapshot_times = snapshot_times(c);
    const TimeSeries ts = run_backend(c, noise, H, x0, gamma0, obs, opt, options);

    PointOutput out;
    out.invariants = ts.invariants;
    if (!ts.snapshots.empty()) out.extras.emplace_back("snapshots", snapshot_table(ts));
    if (!heating) {
        out.table = series_table(ts);
        add_final_values(ts, out);
    } else {
        const std::vector<double>& de = ts.column("delta_energy_per_site");
        const HeatingResult fit = heating_rate_fit(ts.t, de, c["run"]["fit_window"][0].get<double>(),
                                                   c["run"]["fit_window"][1].get<double>());
        const double analytic = heating_rate_analytic(num(c, "system.J"), num(c, "system.delta"),
                                                      num(c, "system.mu") + x_mean, noise_sigma(c),
                                                      num(c, "noise.kappa"));
        out.table.header = {"t", "delta_energy_per_site", "fit", "analytic_line"};
        for (std::size_t k = 0; k < ts.t.size(); ++k) {
            const double t = ts.t[k];
            const double model = fit.rate * t + fit.curvature * t * t;
            out.table.add_row({format_double(t), format_double(de[k]), format_double(model),
                               format_double(analytic * t)});
        }
        out.summary = {{"D_fit", fit.rate},
                       {"D_fit_error", fit.rate_error},
                       {"D_linear", fit.linear_slope},
                       {"D_analytic", analytic},
                       {"ratio", analytic != 0.0 ? fit.rate / analytic : std::nan("")},
                       {"curvature", fit.curvature},
                       {"residual", fit.residual},
                       {"linear_regime", fit.linear_regime ? 1.0 : 0.0},
                       {"window_start", fit.window_start},
                       {"window_end", fit.window_end}};
        if (!fit.diagnostic.empty()) warn("heating fit: " + fit.diagnostic);
    }
    if (options.invariant_probes) {
        out.invariants.merge(probe_invariants(noise, H, x0, gamma0, num(c, "run.t_max"),
                                              c["run"]["seed"].get<std::uint64_t>()));
    }
    return out;
}

PointOutput evaluate_transport(const Json& c, const RunOptions& options) {
    const System sys = build_system(c);
    const JumpNoise noise = build_noise(c);
    std::vector<int> sites;
    for (const Json& s : c["protocol"]["sites"]) sites.push_back(s.get<int>() - 1);
    const double t_f = num(c, "protocol.t_f");
    const Schedule schedule = build_transport_schedule(sys.network, sites, t_f, num(c, "protocol.V"));
    const DrivenHamiltonian H(sys.network, build_binding(c, sys), schedule);
    const double x0 = num(c, "initial.x");
    const double total = schedule.empty() ? t_f : schedule.total_duration();

    EvolveOptions opt;
    opt.times = uniform_grid(total, std::min(num(c, "run.output_step"), total / 4.0));
    opt.dt = num(c, "run.dt");
    opt.energy_scale = sys.network.energy_scale();
    opt.snapshot_times = snapshot_times(c);
    const Matrix gamma0 = prepare_ground_state(H.at(x0, 0.0));
    std::vector<Observable> obs{tracked_edge_observable(track_modes(H, x0, opt.times, kModeTol), "edge")};
    const TimeSeries ts = run_backend(c, noise, H, x0, gamma0, obs, opt, options);

    PointOutput out;
    out.table = series_table(ts);
    out.invariants = ts.invariants;
    if (!ts.snapshots.empty()) out.extras.emplace_back("snapshots", snapshot_table(ts));
    out.summary = {{"t_total", total}, {"final_correlation", ts.column("edge").back()}, {"dt", ts.dt_used}};
    if (options.invariant_probes) {
        out.invariants.merge(probe_invariants(noise, H, x0, gamma0, total, c["run"]["seed"].get<std::uint64_t>()));
    }
    return out;
}

PointOutput evaluate_braid(const Json& c, const RunOptions& options) {
    const System sys = build_system(c);
    if (!sys.junction) throw GeometryError("system.geometry: braid runs need a tjunction geometry");
    BraidRun run;
    run.t_f = num(c, "protocol.t_f");
    run.exchanges = integer(c, "protocol.exchanges");
    run.output_step = num(c, "run.output_step");
    run.dt = num(c, "run.dt");
    if (str(c, "noise.type") != "none") {
        run.noise = build_noise(c);
        const std::string target = str(c, "noise.binding.target");
        if (target == "site_potential") {
            run.noise_site = integer(c, "noise.binding.site") - 1;
        } else if (target != "junction") {
            throw ParameterError("noise.binding.target: braid runs support junction or site_potential noise");
        }
    }
    const BraidResult r = run_braid(*sys.junction, run);
    const std::vector<DropEvent> drops = detect_drops(r.series.t, r.series.column("correlation"), run.t_f);

    PointOutput out;
    out.table = series_table(r.series);
    out.invariants = r.series.invariants;
    CsvTable events;
    events.header = {"t_start", "t_end", "depth"};
    for (const DropEvent& e : drops) {
        events.add_row({format_double(e.t_start), format_double(e.t_end), format_double(e.depth)});
    }
    out.extras.emplace_back("drops", std::move(events));
    out.summary = {{"final_correlation", r.final_correlation},
                   {"t11", r.t11},
                   {"t12", r.t12},
                   {"t21", r.t21},
                   {"t22", r.t22},
                   {"exchange_signs", r.exchange_signs ? 1.0 : 0.0},
                   {"double_exchange_signs", r.double_exchange_signs ? 1.0 : 0.0},
                   {"drop_events", static_cast<double>(drops.size())}};
    if (options.invariant_probes) {
        const Schedule s = build_braiding_schedule(*sys.junction, run.t_f);
        const DrivenHamiltonian H(sys.network, bind_site_potential(sys.network, sys.junction->center), s);
        const Matrix gamma0 = prepare_ground_state(H.at(0.0, 0.0));
        const JumpNoise noise = run.noise ? *run.noise : build_noise(c);
        out.invariants.merge(probe_invariants(noise, H, 0.0, gamma0, run.t_f, c["run"]["seed"].get<std::uint64_t>()));
    }
    return out;
}

PointOutput evaluate_quench(const Json& c, const RunOptions& options) {
    const System before = build_system(c);
    const System after = build_system(c, num(c, "protocol.mu_final"));
    const MajoranaHamiltonian h0 = build_hamiltonian(before.network);
    const MajoranaHamiltonian hf = build_hamiltonian(after.network);
    const Matrix gamma0 = prepare_ground_state(h0);
    const EdgeModes modes = require_modes(h0);

    // Static post-quench Hamiltonian: exact normal-form rotation on a single noise state.
    JumpNoise frozen;
    frozen.states = {0.0};
    frozen.generator = Matrix::Zero(1, 1);
    const DrivenHamiltonian H(hf, bind_global_mu(after.network));
    EvolveOptions opt;
    opt.times = uniform_grid(num(c, "run.t_max"), num(c, "run.output_step"));
    opt.energy_scale = after.network.energy_scale();
    opt.snapshot_times = snapshot_times(c);
    const TimeSeries ts = evolve_quasi_static(frozen, H, gamma0, {edge_observable(modes, "edge")}, opt);

    const double g_inf = quench_g_infinity(h0, hf, kModeTol);
    const std::vector<double>& edge = ts.column("edge");
    const double w0 = c["run"]["average_window"][0].get<double>();
    const double w1 = c["run"]["average_window"][1].get<double>();
    double sum = 0.0;
    int count = 0;
    for (std::size_t k = 0; k < ts.t.size(); ++k) {
        if (ts.t[k] >= w0 - 1e-12 && ts.t[k] <= w1 + 1e-12) {
            sum += edge[k];
            ++count;
        }
    }
    const double average = count > 0 ? sum / count : std::nan("");

    PointOutput out;
    out.table.header = {"t", "edge", "g_infinity"};
    for (std::size_t k = 0; k < ts.t.size(); ++k) {
        out.table.add_row({format_double(ts.t[k]), format_double(edge[k]), format_double(g_inf)});
    }
    out.invariants = ts.invariants;
    if (!ts.snapshots.empty()) out.extras.emplace_back("snapshots", snapshot_table(ts));
    out.summary = {{"mu_final", num(c, "protocol.mu_final")},
                   {"g_infinity", g_inf},
                   {"time_average", average},
                   {"final_correlation", edge.back()},
                   {"deviation", std::abs(average - g_inf)}};
    if (options.invariant_probes) {
        const DrivenHamiltonian Hp(hf, bind_global_mu(after.network));
        out.invariants.merge(probe_invariants(frozen, Hp, 0.0, gamma0, num(c, "run.t_max"), 1));
    }
    return out;
}

PointOutput evaluate_noise(const Json& c) {
    JumpNoise noise = build_noise(c);
    validate(noise);
    noise.stationary_start = true;
    const NoiseStatistics stats = statistics(noise);
    std::vector<double> taus;
    for (const Json& t : c["run"]["taus"]) taus.push_back(t.get<double>());
    if (taus.empty()) throw ParameterError("run.taus: needs at least one lag");
    const double horizon = std::max(1e-9, *std::max_element(taus.begin(), taus.end())) * (1.0 + 1e-9);
    const int samples = integer(c, "run.samples");
    const std::uint64_t seed = c["run"]["seed"].get<std::uint64_t>();

    // Independent stationary paths; products (X(0) - m)(X(tau) - m) with the exact mean m.
    std::vector<std::vector<double>> products(taus.size(), std::vector<double>(samples));
    for (int k = 0; k < samples; ++k) {
        const NoiseTrajectory path = sample_trajectory(noise, horizon, seed, static_cast<std::uint64_t>(k));
        const double x0 = noise.states[path.state_at(0.0)] - stats.mean;
        for (std::size_t j = 0; j < taus.size(); ++j) {
            products[j][k] = x0 * (noise.states[path.state_at(taus[j])] - stats.mean);
        }
    }

    PointOutput out;
    out.table.header = {"tau", "empirical", "empirical_se", "exact", "model"};
    double max_z = 0.0;
    for (std::size_t j = 0; j < taus.size(); ++j) {
        const auto& y = products[j];
        const double mean = std::accumulate(y.begin(), y.end(), 0.0) / samples;
        double var = 0.0;
        for (double v : y) var += (v - mean) * (v - mean);
        var /= (samples - 1);
        const double se = std::sqrt(var / samples);
        const double model = stats.variance * std::exp(-std::abs(taus[j]) / stats.correlation_time);
        if (se > 0.0) max_z = std::max(max_z, std::abs(mean - model) / se);
        out.table.add_row({format_double(taus[j]), format_double(mean), format_double(se),
                           format_double(autocorrelation(noise, taus[j])), format_double(model)});
    }

    const Vector ps = stationary_distribution(noise);
    const double residual = (noise.generator * ps).norm();
    out.summary = {{"mean", stats.mean},
                   {"variance", stats.variance},
                   {"correlation_time", stats.correlation_time},
                   {"max_z", max_z},
                   {"stationary_residual", residual}};
    if (str(c, "noise.type") == "gaussian-lattice") {
        const double m = num(c, "noise.mean");
        const double s = num(c, "noise.sigma");
        const double tc = num(c, "noise.tau_c");
        const JumpNoise one = discretized_gaussian(m, s, tc, 1);
        const JumpNoise tel = telegraph(m - s, m + s, 1.0 / (2.0 * tc));
        double diff = (one.generator - tel.generator).cwiseAbs().maxCoeff();
        for (std::size_t k = 0; k < one.states.size(); ++k) diff = std::max(diff, std::abs(one.states[k] - tel.states[k]));
        out.summary.emplace_back("nr1_telegraph_difference", diff);
    }
    return out;
}

std::string cell(const Json& v) {
    if (v.is_number()) return format_double(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
        std::string s;
        for (const Json& e : v) s += (s.empty() ? "" : ";") + cell(e);
        return s;
    }
    return v.dump();
}

std::string describe_point(std::size_t k, const Json& overrides) {
    return "sweep point " + std::to_string(k) + (overrides.empty() ? "" : " " + overrides.dump());
}

template <typename E>
[[noreturn]] void rethrow_as(const E&, const std::string& message) {
    throw E(message);
}

}  // namespace

PointOutput evaluate_point(const Json& resolved, const RunOptions& options) {
    const std::string kind = str(resolved, "kind");
    if (kind == "evolution") return evaluate_evolution(resolved, options, false);
    if (kind == "heating") return evaluate_evolution(resolved, options, true);
    if (kind == "transport") return evaluate_transport(resolved, options);
    if (kind == "braid") return evaluate_braid(resolved, options);
    if (kind == "quench") return evaluate_quench(resolved, options);
    if (kind == "noise") return evaluate_noise(resolved);
    throw ParameterError("kind: unknown experiment kind '" + kind + "'");
}

Json RunRecord::metadata() const {
    Json files = Json::array();
    for (const auto& p : points) {
        files.push_back(p.file);
        for (const auto& e : p.extra_files) files.push_back(e);
    }
    return Json{{"name", config.value("name", std::string())},
                {"kind", config.value("kind", std::string())},
                {"version", version},
                {"seed", seed},
                {"wall_time_seconds", wall_time},
                {"directory", directory.string()},
                {"index_file", index_file},
                {"csv_files", files},
                {"points", points.size()},
                {"warnings", warnings},
                {"max_antisymmetry", invariants.max_antisymmetry},
                {"max_singular", invariants.max_singular},
                {"max_purity_defect", invariants.max_purity_defect},
                {"max_probability_error", invariants.max_probability_error},
                {"max_chapman_error", invariants.max_chapman_error},
                {"parity_checked", invariants.parity_checked},
                {"parity_violations", invariants.parity_violations},
                {"config", config}};
}

RunRecord run_experiment(const Json& config, const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const Diagnostics diag = validate_config(config);
    if (!diag.ok()) throw ParameterError("invalid config:\n" + diag.str());

    RunRecord record;
    record.config = resolve_config(config);
    record.version = version();
    record.seed = record.config["run"]["seed"].get<std::uint64_t>();
    for (const auto& d : diag.items) record.warnings.push_back(d.key + ": " + d.message);

    const std::vector<Json> overrides = sweep_points(record.config);
    std::vector<Json> resolved;
    for (std::size_t k = 0; k < overrides.size(); ++k) {
        Json pc = record.config;
        for (const auto& [key, value] : overrides[k].items()) set_path(pc, key, value);
        pc["run"]["sweep"] = Json::object();
        const Diagnostics pd = validate_config(pc);
        if (!pd.ok()) throw ParameterError(describe_point(k, overrides[k]) + ":\n" + pd.str());
        resolved.push_back(std::move(pc));
    }

    record.directory = options.output_dir.empty()
                           ? std::filesystem::path(record.config["output"]["dir"].get<std::string>())
                           : options.output_dir;
    std::filesystem::create_directories(record.directory);
    const std::string name = record.config["name"].get<std::string>();

    std::mutex warn_mutex;
    WarningHandler previous = set_warning_handler([&](const std::string& m) {
        std::lock_guard<std::mutex> lock(warn_mutex);
        record.warnings.push_back(m);
    });

    RunOptions inner = options;
    const int threads = options.threads > 0 ? options.threads : configured_threads();
    if (overrides.size() > 1 && threads > 1) inner.threads = 1;

    record.points.resize(overrides.size());
    try {
        parallel_for(overrides.size(), threads, [&](std::size_t k) {
            std::string stem = name;
            if (overrides.size() > 1) {
                char suffix[32];
                std::snprintf(suffix, sizeof suffix, "_%03zu", k);
                stem += suffix;
            }
            PointOutput out;
            try {
                out = evaluate_point(resolved[k], inner);
            } catch (const ParameterError& e) {
                rethrow_as(e, describe_point(k, overrides[k]) + ": " + e.what());
            } catch (const GeometryError& e) {
                rethrow_as(e, describe_point(k, overrides[k]) + ": " + e.what());
            } catch (const StateError& e) {
                rethrow_as(e, describe_point(k, overrides[k]) + ": " + e.what());
            } catch (const IntegrationError& e) {
                rethrow_as(e, describe_point(k, overrides[k]) + ": " + e.what());
            } catch (const std::exception& e) {
                throw Error(describe_point(k, overrides[k]) + ": " + e.what());
            }
            PointRecord& p = record.points[k];
            p.overrides = overrides[k];
            p.file = stem + ".csv";
            write_csv(record.directory / p.file, out.table);
            for (const auto& [suffix, table] : out.extras) {
                p.extra_files.push_back(stem + "_" + suffix + ".csv");
                write_csv(record.directory / p.extra_files.back(), table);
            }
            p.summary = std::move(out.summary);
            p.invariants = out.invariants;
        });
    } catch (...) {
        set_warning_handler(previous);
        throw;
    }
    set_warning_handler(previous);

    for (const auto& p : record.points) record.invariants.merge(p.invariants);

    // Index: one row per point with the swept values and the scalar summary.
    CsvTable index;
    index.header = {"point", "file"};
    std::vector<std::string> axes;
    if (const Json* sweep = find_path(record.config, "run.sweep")) {
        for (const auto& [key, values] : sweep->items()) {
            if (values.is_array() && !values.empty()) axes.push_back(key);
        }
    }
    for (const auto& a : axes) index.header.push_back(a);
    std::vector<std::string> keys;
    for (const auto& p : record.points) {
        for (const auto& [key, value] : p.summary) {
            if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
        }
    }
    for (const auto& k : keys) index.header.push_back(k);
    for (std::size_t i = 0; i < record.points.size(); ++i) {
        const PointRecord& p = record.points[i];
        std::vector<std::string> row{std::to_string(i), p.file};
        for (const auto& a : axes) row.push_back(cell(p.overrides[a]));
        for (const auto& k : keys) {
            auto it = std::find_if(p.summary.begin(), p.summary.end(), [&](const auto& e) { return e.first == k; });
            row.push_back(it == p.summary.end() ? "" : format_double(it->second));
        }
        index.add_row(std::move(row));
    }
    record.index_file = name + "_index.csv";
    record.sidecar_file = name + ".json";
    record.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_json(record.directory / record.sidecar_file, record.metadata());
    write_csv(record.directory / record.index_file, index);
    return record;
}

}  // namespace kitnoise
