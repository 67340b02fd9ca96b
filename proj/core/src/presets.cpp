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

#include "kitnoise/presets.hpp"

#include "kitnoise/common.hpp"

namespace kitnoise {

namespace {

Json global_quench(const char* name, double b) {
    Json c = {
        {"name", name},
        {"kind", "evolution"},
        {"system", {{"geometry", "chain"}, {"N", 60}, {"J", 1.0}, {"delta", 0.8}, {"mu", 0.2}}},
        {"noise", {{"type", "telegraph"}, {"a", 0.0}, {"b", b}, {"kappa", 0.7}, {"binding", {{"target", "global_mu"}}}}},
        {"run", {{"backend", "marginal"}, {"t_max", 40.0}, {"output_step", 0.1}, {"seed", 1},
                 {"sweep", {{"noise.kappa", {0.1, 0.7, 10.0}}}}}},
        {"observables", {"edge"}},
        {"output", {{"dir", std::string("kitnoise-out/") + name}}},
    };
    return c;
}

Json chain_smoke() {
    return {{"system.N", 20}, {"run.t_max", 2.0}, {"run.output_step", 0.5}};
}

std::vector<Preset> build() {
    std::vector<Preset> out;

    out.push_back({"fig2b", "2(b)", "global mu jumps 0.2J <-> J, both topological; kappa in {0.1, 0.7, 10}J",
                   global_quench("fig2b", 0.8), chain_smoke()});
    out.push_back({"fig2c", "2(c)", "global mu jumps 0.2J <-> 2.1J, crossing the gap closing; kappa in {0.1, 0.7, 10}J",
                   global_quench("fig2c", 1.9), chain_smoke()});
    out.push_back({"fig2d", "2(d)", "global mu jumps 0.2J <-> 4J, deep non-topological excursions; kappa in {0.1, 0.7, 10}J",
                   global_quench("fig2d", 3.8), chain_smoke()});

    out.push_back({"fig3a", "3(a)",
                   "energy gain per site on a ring, mu_ave = 0, sigma = 0.1J, Delta = J, for several kappa",
                   Json{{"name", "fig3a"},
                        {"kind", "evolution"},
                        {"system", {{"geometry", "ring"}, {"N", 64}, {"J", 1.0}, {"delta", 1.0}, {"mu", 0.0}}},
                        {"noise", {{"type", "telegraph"}, {"a", -0.1}, {"b", 0.1}, {"kappa", 2.0},
                                   {"binding", {{"target", "global_mu"}}}}},
                        {"run", {{"backend", "marginal"}, {"t_max", 12.0}, {"output_step", 0.1}, {"seed", 1},
                                 {"sweep", {{"noise.kappa", {0.5, 2.0, 8.0}}}}}},
                        {"observables", {"delta_energy_per_site"}},
                        {"output", {{"dir", "kitnoise-out/fig3a"}}}},
                   Json{{"system.N", 16}, {"run.t_max", 2.0}, {"run.output_step", 0.5}}});

    out.push_back({"fig3b", "3(b)",
                   "fitted heating rate vs kappa for mu in {0, 2J, 4J} with the closed-form quadrature column",
                   Json{{"name", "fig3b"},
                        {"kind", "heating"},
                        {"system", {{"geometry", "ring"}, {"N", 64}, {"J", 1.0}, {"delta", 1.0}, {"mu", 0.0}}},
                        {"noise", {{"type", "telegraph"}, {"a", -0.1}, {"b", 0.1}, {"kappa", 2.0},
                                   {"binding", {{"target", "global_mu"}}}}},
                        {"run", {{"backend", "marginal"}, {"t_max", 12.0}, {"output_step", 0.1}, {"seed", 1},
                                 {"fit_window", {2.0, 12.0}},
                                 {"sweep", {{"system.mu", {0.0, 2.0, 4.0}}, {"noise.kappa", {0.5, 1.0, 2.0, 4.0, 8.0}}}}}},
                        {"observables", {"delta_energy_per_site"}},
                        {"output", {{"dir", "kitnoise-out/fig3b"}}}},
                   Json{{"system.N", 16},
                        {"run.t_max", 4.0},
                        {"run.output_step", 0.25},
                        {"run.fit_window", {1.0, 4.0}},
                        {"run.sweep", {{"system.mu", {0.0}}, {"noise.kappa", {2.0}}}}}});

    auto local = [](const char* name, double kappa) {
        return Json{{"name", name},
                    {"kind", "evolution"},
                    {"system", {{"geometry", "chain"}, {"N", 60}, {"J", 1.0}, {"delta", 0.4}, {"mu", 0.4}}},
                    {"noise", {{"type", "telegraph"}, {"a", 0.0}, {"b", 0.8}, {"kappa", kappa},
                               {"binding", {{"target", "site_mu"}, {"site", 1}}}}},
                    {"run", {{"backend", "marginal"}, {"t_max", 40.0}, {"output_step", 0.1}, {"seed", 1},
                             {"sweep", {{"noise.binding.site", {1, 3, 6}}}}}},
                    {"observables", {"edge"}},
                    {"output", {{"dir", std::string("kitnoise-out/") + name}}}};
    };
    out.push_back({"fig4a", "4(a)", "local mu noise 0 <-> 0.8J at sites d in {1, 3, 6}, kappa = 0.7J",
                   local("fig4a", 0.7), chain_smoke()});
    out.push_back({"fig4b", "4(b)", "local mu noise 0 <-> 0.8J at sites d in {1, 3, 6}, kappa = 10J",
                   local("fig4b", 10.0), chain_smoke()});

    Json split = local("split", 0.7);
    split["noise"]["a"] = 0.0;
    split["noise"]["b"] = -1.0;
    split["noise"]["binding"] = {{"target", "bond_split"}, {"bond", {3, 4}}};
    split["run"]["sweep"] = {{"noise.binding.bond", {{3, 4}, {6, 7}}}, {"noise.kappa", {0.7, 10.0}}};
    out.push_back({"split", "split-wire panels",
                   "bond (J_d, Delta_d) jumps to zero, splitting the wire at bond 3-4 or 6-7; kappa in {0.7, 10}J",
                   split, chain_smoke()});

    out.push_back({"fig7", "7(f)",
                   "moving the left Majorana from site 1 to 4 with V = 20J pushes, noise at site 2; "
                   "final correlation vs T_f",
                   Json{{"name", "fig7"},
                        {"kind", "transport"},
                        {"system", {{"geometry", "chain"}, {"N", 40}, {"J", 1.0}, {"delta", 0.8}, {"mu", 0.2}}},
                        {"noise", {{"type", "telegraph"}, {"a", 0.0}, {"b", 0.8}, {"kappa", 0.5},
                                   {"binding", {{"target", "site_potential"}, {"site", 2}}}}},
                        {"protocol", {{"type", "transport"}, {"sites", {1, 2, 3}}, {"V", 20.0}, {"t_f", 25.0}}},
                        {"run", {{"backend", "marginal"}, {"output_step", 0.5}, {"dt", 0.01}, {"seed", 1},
                                 {"sweep", {{"protocol.t_f", {5.0, 10.0, 15.0, 20.0, 25.0, 35.0, 50.0}},
                                            {"noise.kappa", {0.5, 10.0}}}}}},
                        {"observables", {"edge"}},
                        {"output", {{"dir", "kitnoise-out/fig7"}}}},
                   Json{{"system.N", 16},
                        {"protocol.sites", {1, 2}},
                        {"run.sweep", {{"protocol.t_f", {2.0}}, {"noise.kappa", {0.5}}}}}});

    out.push_back({"tjunction", "5",
                   "T-junction exchange with T_f = 18/J per site, junction-site noise 0 <-> 0.7J",
                   Json{{"name", "tjunction"},
                        {"kind", "braid"},
                        {"system", {{"geometry", "tjunction"},
                                    {"J", 1.0},
                                    {"tjunction", {{"left", 10}, {"right", 10}, {"vertical", 10}, {"delta_x", 0.7},
                                                   {"mu_topological", 0.1}, {"mu_nontopological", -4.0}}}}},
                        {"noise", {{"type", "telegraph"}, {"a", 0.0}, {"b", 0.7}, {"kappa", 0.6},
                                   {"binding", {{"target", "junction"}}}}},
                        {"protocol", {{"type", "braid"}, {"t_f", 18.0}, {"exchanges", 1}}},
                        {"run", {{"backend", "marginal"}, {"output_step", 0.5}, {"seed", 1},
                                 {"sweep", {{"noise.kappa", {0.6, 10.0}}}}}},
                        {"observables", {"edge"}},
                        {"output", {{"dir", "kitnoise-out/tjunction"}}}},
                   Json{{"protocol.t_f", 1.0}, {"run.sweep", {{"noise.kappa", {0.6}}}}}});

    out.push_back({"fig8", "8",
                   "noise-free quench mu_0 = 0.3J -> mu_f, N = 134, Delta = 0.72J; long-time correlation vs G_inf",
                   Json{{"name", "fig8"},
                        {"kind", "quench"},
                        {"system", {{"geometry", "chain"}, {"N", 134}, {"J", 1.0}, {"delta", 0.72}, {"mu", 0.3}}},
                        {"noise", {{"type", "none"}}},
                        {"protocol", {{"type", "quench"}, {"mu_final", 0.9}}},
                        {"run", {{"backend", "unitary"}, {"t_max", 150.0}, {"output_step", 0.5}, {"seed", 1},
                                 {"average_window", {50.0, 150.0}},
                                 {"sweep", {{"protocol.mu_final", {0.0, 0.3, 0.6, 0.9, 1.2, 1.5, 1.8, 1.9, 1.95}}}}}},
                        {"observables", {"edge"}},
                        {"output", {{"dir", "kitnoise-out/fig8"}}}},
                   Json{{"system.N", 30},
                        {"run.t_max", 10.0},
                        {"run.average_window", {5.0, 10.0}},
                        {"run.sweep", {{"protocol.mu_final", {0.3, 1.0}}}}}});

    out.push_back({"noise-check", "noise model",
                   "discretized Gaussian noise (N_r = 64): autocorrelation vs sigma^2 exp(-|tau|/tau_c), stationarity",
                   Json{{"name", "noise-check"},
                        {"kind", "noise"},
                        {"noise", {{"type", "gaussian-lattice"}, {"mean", 0.0}, {"sigma", 1.0}, {"tau_c", 1.0}, {"n_r", 64}}},
                        {"run", {{"seed", 1}, {"samples", 10000}, {"taus", {0.0, 1.0, 2.0, 4.0}}}},
                        {"output", {{"dir", "kitnoise-out/noise-check"}}}},
                   Json{{"run.samples", 2000}}});
    return out;
}

}  // namespace

const std::vector<Preset>& presets() {
    static const std::vector<Preset> all = build();
    return all;
}

const Preset& find_preset(const std::string& name) {
    for (const auto& p : presets()) {
        if (p.name == name) return p;
    }
    throw ParameterError("unknown preset '" + name + "'");
}

Json preset_config(const std::string& name, bool smoke) {
    const Preset& p = find_preset(name);
    Json c = p.config;
    if (smoke) {
        for (const auto& [key, value] : p.smoke.items()) set_path(c, key, value);
        c["output"]["dir"] = c["output"]["dir"].get<std::string>() + "-smoke";
    }
    return c;
}

}  // namespace kitnoise
