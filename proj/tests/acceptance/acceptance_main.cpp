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

// Acceptance suite: one PASS/FAIL line per criterion. Optional arguments
// select criteria by number, e.g. `kitnoise_acceptance 3 7`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kitnoise/analysis.hpp"
#include "kitnoise/presets.hpp"
#include "kitnoise/protocols.hpp"
#include "kitnoise/runner.hpp"

namespace {

using namespace kitnoise;
namespace fs = std::filesystem;

// Zero-mode tolerance shared with the runner.
constexpr double kModeTol = 1e-2;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int digits = 4) {
    std::ostringstream s;
    s.precision(digits);
    s << v;
    return s.str();
}

double summary(const PointRecord& p, const std::string& key) {
    for (const auto& [k, v] : p.summary) {
        if (k == key) return v;
    }
    throw ParameterError("summary key '" + key + "' missing");
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "kitnoise_acceptance" / name;
    fs::remove_all(p);
    return p;
}

RunRecord run(const Json& config, const std::string& name, bool probes = false) {
    RunOptions o;
    o.output_dir = scratch(name);
    o.invariant_probes = probes;
    return run_experiment(config, o);
}

// Global chemical-potential jumps mu_a <-> mu_b on the Fig. 2 chain, starting
// in the ground state of H_a.
struct GlobalQuench {
    WireNetwork network = WireNetwork::chain(60, 1.0, Complex(0.8, 0.0), 0.2);
    DrivenHamiltonian H{network, bind_global_mu(network)};
    MajoranaHamiltonian h_a = H.at(0.0, 0.0);
    Matrix gamma0;
    std::vector<Observable> edge;
    double b = 0.0;

    explicit GlobalQuench(double mu_b) : b(mu_b - 0.2) {
        GroundStateOptions g;
        g.zero_tol = kModeTol;
        gamma0 = ground_state_covariance(h_a, g);
        edge = {edge_observable(*zero_modes(h_a, kModeTol))};
    }

    JumpNoise noise(double kappa) const { return telegraph(0.0, b, kappa); }

    std::vector<double> marginal(double kappa, double t_max, double step) const {
        EvolveOptions o;
        o.times = uniform_grid(t_max, step);
        return evolve_marginal(noise(kappa), H, gamma0, edge, o).values[0];
    }
};

// [1] marginal vs trajectory average, 5000 trajectories, 3 standard errors.
Outcome oracle_equivalence() {
    const GlobalQuench q(1.0);
    EvolveOptions o;
    o.times = uniform_grid(20.0, 0.5);
    const JumpNoise noise = q.noise(0.7);
    const TimeSeries exact = evolve_marginal(noise, q.H, q.gamma0, q.edge, o);
    TrajectoryOptions tr;
    tr.n_traj = 5000;
    tr.seed = 20260101;
    const TimeSeries mc = evolve_trajectory_average(noise, q.H, q.gamma0, q.edge, o, tr);
    double worst = 0.0;
    double worst_t = 0.0;
    for (std::size_t k = 0; k < o.times.size(); ++k) {
        const double se = mc.standard_errors[0][k];
        const double diff = std::abs(mc.values[0][k] - exact.values[0][k]);
        const double z = se > 0.0 ? diff / se : (diff < 1e-12 ? 0.0 : INFINITY);
        if (z > worst) {
            worst = z;
            worst_t = o.times[k];
        }
    }
    return {worst <= 3.0, "max |marginal - trajectory| / SE = " + fmt(worst) + " at t = " + fmt(worst_t) +
                              " over " + std::to_string(o.times.size()) + " grid times"};
}

// [2] fitted heating rate within 5% of the quadrature; mu = 0 peak in [2J, 4J].
Outcome heating_rate() {
    const RunRecord r = run(preset_config("fig3b"), "fig3b");
    double worst = 0.0;
    std::string where;
    double best_kappa = 0.0;
    double best_rate = -1.0;
    for (const PointRecord& p : r.points) {
        const double ratio = summary(p, "ratio");
        const double mu = p.overrides["system.mu"].get<double>();
        const double kappa = p.overrides["noise.kappa"].get<double>();
        if (std::abs(ratio - 1.0) > worst) {
            worst = std::abs(ratio - 1.0);
            where = "mu = " + fmt(mu) + ", kappa = " + fmt(kappa);
        }
        if (mu == 0.0 && summary(p, "D_fit") > best_rate) {
            best_rate = summary(p, "D_fit");
            best_kappa = kappa;
        }
    }
    const bool peak = best_kappa >= 2.0 && best_kappa <= 4.0;
    return {worst <= 0.05 && peak, "max |D_fit / D_analytic - 1| = " + fmt(worst) + " (" + where +
                                       "); mu = 0 maximum at kappa = " + fmt(best_kappa)};
}

// [3] time-averaged edge correlation within 0.02 of G_inf for mu_f <= 1.8J.
Outcome quench_asymptotics() {
    const RunRecord r = run(preset_config("fig8"), "fig8");
    double worst = 0.0;
    double worst_mu = 0.0;
    int checked = 0;
    for (const PointRecord& p : r.points) {
        const double mu_f = summary(p, "mu_final");
        if (mu_f > 1.8 + 1e-12) continue;
        ++checked;
        const double d = std::abs(summary(p, "time_average") - summary(p, "g_infinity"));
        if (d > worst) {
            worst = d;
            worst_mu = mu_f;
        }
    }
    return {checked > 0 && worst <= 0.02, "max |<G>_t - G_inf| = " + fmt(worst) + " at mu_f = " + fmt(worst_mu) +
                                              " over " + std::to_string(checked) + " values of mu_f"};
}

// [4] Fig. 2 phenomenology at t = 10/J.
Outcome scenario_phenomenology() {
    const std::vector<double> kappas{0.1, 0.7, 10.0};
    std::ostringstream d;
    bool ok = true;
    for (double mu_b : {1.0, 2.1}) {
        const GlobalQuench q(mu_b);
        std::vector<double> c;
        for (double kappa : kappas) c.push_back(q.marginal(kappa, 10.0, 10.0).back());
        const bool fastest = c[1] < c[0] && c[1] < c[2];
        ok = ok && fastest;
        d << "mu_b = " << fmt(mu_b) << ": C(10) = " << fmt(c[0]) << "/" << fmt(c[1]) << "/" << fmt(c[2]) << "; ";
    }
    const GlobalQuench q(4.0);
    std::vector<double> c;
    for (double kappa : kappas) c.push_back(q.marginal(kappa, 10.0, 10.0).back());
    const bool third = c[1] < 0.05 && c[2] < 0.05 && c[0] > 0.3;
    d << "mu_b = 4: C(10) = " << fmt(c[0]) << "/" << fmt(c[1]) << "/" << fmt(c[2])
      << " (need > 0.3 / < 0.05 / < 0.05)";
    return {ok && third, d.str()};
}

// [5] slow-noise decay laws within 10% for t <= 20/J at kappa = 0.1J.
Outcome slow_decay_law() {
    const double kappa = 0.1;
    const std::vector<double> t = uniform_grid(20.0, 0.5);
    auto worst_rel = [&](const std::vector<double>& sim, const std::vector<double>& model, double& at) {
        double w = 0.0;
        for (std::size_t k = 0; k < t.size(); ++k) {
            const double r = std::abs(sim[k] - model[k]) / std::abs(model[k]);
            if (r > w) {
                w = r;
                at = t[k];
            }
        }
        return w;
    };
    const GlobalQuench third(4.0);
    double at3 = 0.0;
    const double w3 = worst_rel(third.marginal(kappa, 20.0, 0.5), slow_noise_decay_model(0.0, kappa, t), at3);

    const GlobalQuench first(1.0);
    const double g_inf = quench_g_infinity(first.h_a, first.H.at(first.b, 0.0), kModeTol);
    double at1 = 0.0;
    const double w1 = worst_rel(first.marginal(kappa, 20.0, 0.5), slow_noise_decay_model(g_inf, kappa, t), at1);
    return {w3 <= 0.1 && w1 <= 0.1, "mu_b = 4: max rel. deviation " + fmt(w3) + " at t = " + fmt(at3) +
                                        "; mu_b = J (G_inf = " + fmt(g_inf) + "): " + fmt(w1) + " at t = " + fmt(at1)};
}

// [6] Lindblad at kappa = 10J within 0.05; quasi-static at 1e-3 J within 1e-2.
Outcome fast_limit() {
    const GlobalQuench q(1.0);
    EvolveOptions o;
    o.times = uniform_grid(20.0, 0.5);
    const JumpNoise fast = q.noise(10.0);
    const std::vector<double> marg = evolve_marginal(fast, q.H, q.gamma0, q.edge, o).values[0];
    const std::vector<double> lind = evolve_lindblad_fast(fast_limit_spec(fast, q.H), q.gamma0, q.edge, o).values[0];
    double d_fast = 0.0;
    for (std::size_t k = 0; k < marg.size(); ++k) d_fast = std::max(d_fast, std::abs(marg[k] - lind[k]));

    o.times = uniform_grid(10.0, 0.5);
    const JumpNoise slow = q.noise(1e-3);
    const std::vector<double> m2 = evolve_marginal(slow, q.H, q.gamma0, q.edge, o).values[0];
    const std::vector<double> qs = evolve_quasi_static(slow, q.H, q.gamma0, q.edge, o).values[0];
    double d_slow = 0.0;
    for (std::size_t k = 0; k < m2.size(); ++k) d_slow = std::max(d_slow, std::abs(m2[k] - qs[k]));
    return {d_fast <= 0.05 && d_slow <= 1e-2,
            "kappa = 10: max |lindblad - marginal| = " + fmt(d_fast) + "; kappa = 1e-3: max |quasi-static - marginal| = " +
                fmt(d_slow)};
}

// [7] local noise: decay at t = 20/J ordered d = 1 > 3 > 6, C(d = 6) > 0.95.
Outcome local_noise() {
    const WireNetwork net = WireNetwork::chain(60, 1.0, Complex(0.4, 0.0), 0.4);
    const MajoranaHamiltonian h0 = build_hamiltonian(net);
    GroundStateOptions g;
    g.zero_tol = kModeTol;
    const Matrix gamma0 = ground_state_covariance(h0, g);
    const std::vector<Observable> edge{edge_observable(*zero_modes(h0, kModeTol))};
    EvolveOptions o;
    o.times = uniform_grid(20.0, 20.0);
    std::ostringstream d;
    bool ok = true;
    for (double kappa : {0.7, 10.0}) {
        std::vector<double> c;
        for (int site : {1, 3, 6}) {
            const DrivenHamiltonian H(net, bind_site_mu(net, site - 1));
            c.push_back(evolve_marginal(telegraph(0.0, 0.8, kappa), H, gamma0, edge, o).values[0].back());
        }
        ok = ok && (1.0 - c[0]) > (1.0 - c[1]) && (1.0 - c[1]) > (1.0 - c[2]) && c[2] > 0.95;
        d << "kappa = " << fmt(kappa) << ": C(20) d=1/3/6 = " << fmt(c[0], 6) << "/" << fmt(c[1], 6) << "/"
          << fmt(c[2], 6) << "; ";
    }
    return {ok, d.str()};
}

// [8] ideal chain: edge correlation constant to 1e-10 for noise on 2 <= d <= N-1.
Outcome ideal_chain() {
    const int n = 20;
    const WireNetwork net = WireNetwork::chain(n, 1.0, Complex(1.0, 0.0), 0.0);
    const MajoranaHamiltonian h0 = build_hamiltonian(net);
    const Matrix gamma0 = ground_state_covariance(h0);
    const std::vector<Observable> edge{edge_observable(*zero_modes(h0))};
    EvolveOptions o;
    o.times = uniform_grid(20.0, 0.5);
    double worst = 0.0;
    for (int d = 2; d <= n - 1; ++d) {
        for (const ParameterBinding& b : {bind_site_mu(net, d - 1), bind_site_potential(net, d - 1)}) {
            const DrivenHamiltonian H(net, b);
            const std::vector<double> c = evolve_marginal(telegraph(0.0, 0.8, 0.7), H, gamma0, edge, o).values[0];
            for (double v : c) worst = std::max(worst, std::abs(v - c.front()));
        }
    }
    return {worst <= 1e-10, "max |C(t) - C(0)| = " + fmt(worst) + " over sites 2.." + std::to_string(n - 1)};
}

// [9] transport fidelity vs T_f at kappa = 0.5J has an interior maximum.
Outcome transport_optimum() {
    Json c = preset_config("fig7");
    c["run"]["sweep"] = {{"protocol.t_f", {5.0, 10.0, 15.0, 20.0, 25.0, 35.0, 50.0}}, {"noise.kappa", {0.5}}};
    const RunRecord r = run(c, "fig7");
    std::vector<double> f;
    std::ostringstream d;
    d << "C(T_f) =";
    for (const PointRecord& p : r.points) {
        f.push_back(summary(p, "final_correlation"));
        d << " " << fmt(f.back());
    }
    const std::size_t best = static_cast<std::size_t>(std::max_element(f.begin(), f.end()) - f.begin());
    d << "; maximum at index " << best;
    return {best > 0 && best + 1 < f.size(), d.str()};
}

// [10] braid: noise-free fidelity within 0.01 and exchange signs; three drops
// with junction noise at kappa = 0.6J; kappa = 10J ends higher.
Outcome braiding() {
    Json clean = preset_config("tjunction");
    clean["noise"]["type"] = "none";
    clean["run"].erase("sweep");
    const RunRecord r0 = run(clean, "braid_clean");
    const PointRecord& p0 = r0.points.at(0);
    const double fidelity = summary(p0, "final_correlation");
    const bool signs = summary(p0, "exchange_signs") == 1.0;

    Json noisy = preset_config("tjunction");
    noisy["run"]["sweep"] = {{"noise.kappa", {0.6, 10.0}}};
    const RunRecord r1 = run(noisy, "braid_noisy");
    const double drops = summary(r1.points.at(0), "drop_events");
    const double slow = summary(r1.points.at(0), "final_correlation");
    const double fast = summary(r1.points.at(1), "final_correlation");
    const bool ok = std::abs(fidelity - 1.0) <= 0.01 && signs && drops == 3.0 && fast > slow;
    return {ok, "noise-free -i<g1 g2> = " + fmt(fidelity, 6) + ", t12 = " + fmt(summary(p0, "t12")) +
                    ", t21 = " + fmt(summary(p0, "t21")) + ", signs " + (signs ? "ok" : "wrong") +
                    "; kappa = 0.6: " + fmt(drops) + " drops, final " + fmt(slow) + "; kappa = 10: final " + fmt(fast)};
}

// [11] discretized Gaussian statistics.
Outcome noise_statistics() {
    const RunRecord r = run(preset_config("noise-check"), "noise");
    const PointRecord& p = r.points.at(0);
    const double z = summary(p, "max_z");
    const double residual = summary(p, "stationary_residual");
    const double nr1 = summary(p, "nr1_telegraph_difference");
    return {z <= 3.0 && nr1 == 0.0 && residual < 1e-12,
            "max z = " + fmt(z) + ", N_r = 1 vs telegraph = " + fmt(nr1) + ", |L p_s| = " + fmt(residual)};
}

// [12] invariants across every smoke preset.
Outcome invariant_suite() {
    InvariantReport all;
    std::vector<std::string> bad;
    for (const Preset& p : presets()) {
        const RunRecord r = run(preset_config(p.name, true), "smoke_" + p.name, true);
        const InvariantReport& v = r.invariants;
        const bool ok = v.max_antisymmetry < 1e-10 && v.max_singular <= 1.0 + 1e-8 && v.max_purity_defect < 1e-6 &&
                        v.max_probability_error < 1e-10 && v.max_chapman_error < 1e-8 && v.parity_violations == 0;
        if (!ok) bad.push_back(p.name);
        all.merge(v);
    }
    std::ostringstream d;
    d << presets().size() << " presets: antisymmetry " << fmt(all.max_antisymmetry) << ", singular "
      << fmt(all.max_singular, 12) << ", purity " << fmt(all.max_purity_defect) << ", probability "
      << fmt(all.max_probability_error) << ", chapman " << fmt(all.max_chapman_error) << ", parity "
      << all.parity_violations << "/" << all.parity_checked;
    for (const auto& b : bad) d << "; violated by " << b;
    return {bad.empty() && all.parity_checked > 0, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"oracle equivalence", oracle_equivalence},
        {"heating rate", heating_rate},
        {"quench asymptotics", quench_asymptotics},
        {"scenario phenomenology", scenario_phenomenology},
        {"slow-noise decay law", slow_decay_law},
        {"fast-limit consistency", fast_limit},
        {"local-noise locality", local_noise},
        {"ideal-chain immunity", ideal_chain},
        {"transport optimum", transport_optimum},
        {"braiding", braiding},
        {"noise-model statistics", noise_statistics},
        {"invariant suite", invariant_suite},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));
    set_warning_handler([](const std::string&) {});

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!selected.empty() && !selected.count(id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failures;
        std::printf("%s [%2d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    fs::remove_all(fs::temp_directory_path() / "kitnoise_acceptance");
    return failures == 0 ? 0 : 1;
}
