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

// kitnoise command line: run configs and presets, list presets, validate
// configs, and evaluate the closed-form oracles.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kitnoise/analysis.hpp"
#include "kitnoise/noise.hpp"
#include "kitnoise/presets.hpp"
#include "kitnoise/runner.hpp"

namespace {

using kitnoise::Json;

constexpr int kExitRuntime = 1;
constexpr int kExitInvalid = 2;

Json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw kitnoise::ParameterError("cannot open config file '" + path + "'");
    try {
        return Json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const Json::parse_error& e) {
        throw kitnoise::ParameterError(path + ": " + e.what());
    }
}

void print_record(const kitnoise::RunRecord& r) {
    std::printf("wrote %zu point(s) to %s\n", r.points.size(), r.directory.string().c_str());
    std::printf("  index:   %s\n  sidecar: %s\n", r.index_file.c_str(), r.sidecar_file.c_str());
    const auto& inv = r.invariants;
    std::printf("  invariants: antisymmetry %.3g, singular %.3g, purity %.3g, probability %.3g, parity %d/%d\n",
                inv.max_antisymmetry, inv.max_singular, inv.max_purity_defect, inv.max_probability_error,
                inv.parity_violations, inv.parity_checked);
    std::printf("  wall time %.2f s\n", r.wall_time);
    for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

struct RunFlags {
    std::vector<std::string> overrides;
    std::string out;
    int threads = 0;
    bool probes = false;
    bool dry_run = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
    cmd->add_option("-o,--override", f.overrides, "key=value assignment on a dotted config path (repeatable)");
    cmd->add_option("--out", f.out, "output directory (overrides output.dir)");
    cmd->add_option("-j,--threads", f.threads, "sweep workers (default: KITNOISE_THREADS or hardware count)");
    cmd->add_flag("--probes", f.probes, "add short purity and parity probes to every point");
    cmd->add_flag("--dry-run", f.dry_run, "print the resolved config and exit");
}

int execute(Json config, const RunFlags& f) {
    for (const auto& o : f.overrides) kitnoise::apply_override(config, o);
    const kitnoise::Diagnostics diag = kitnoise::validate_config(config);
    if (!diag.ok()) {
        std::fputs(diag.str().c_str(), stderr);
        return kExitInvalid;
    }
    if (f.dry_run) {
        std::cout << kitnoise::resolve_config(config).dump(2) << "\n";
        return 0;
    }
    kitnoise::RunOptions options;
    options.output_dir = f.out;
    options.threads = f.threads;
    options.invariant_probes = f.probes;
    print_record(kitnoise::run_experiment(config, options));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kitnoise: Majorana wires under Markovian parameter noise"};
    app.set_version_flag("--version", kitnoise::version());
    app.require_subcommand(1);

    RunFlags run_flags;
    std::string config_path;
    auto* run = app.add_subcommand("run", "run an experiment config (JSON, // comments allowed)");
    run->add_option("config", config_path, "config file")->required();
    add_run_flags(run, run_flags);

    auto* list = app.add_subcommand("list", "list presets with the figure each maps to");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "validate a config without running it");
    validate->add_option("config", validate_path, "config file")->required();

    RunFlags preset_flags;
    std::string preset_name;
    bool smoke = false;
    auto* preset = app.add_subcommand("preset", "run a named preset");
    preset->add_option("name", preset_name, "preset name (see 'list')")->required();
    preset->add_flag("--smoke", smoke, "reduced N and t_max profile");
    add_run_flags(preset, preset_flags);

    auto* oracle = app.add_subcommand("oracle", "closed-form reference values");
    oracle->require_subcommand(1);

    double J = 1.0, delta = 1.0, mu = 0.0, sigma = 0.1, kappa = 1.0;
    int n_k = 4096;
    auto* heating = oracle->add_subcommand("heating", "heating rate per site from the k-integral");
    heating->add_option("--J", J);
    heating->add_option("--delta", delta);
    heating->add_option("--mu", mu);
    heating->add_option("--sigma", sigma);
    heating->add_option("--kappa", kappa);
    heating->add_option("--nk", n_k, "midpoint cells");

    int n_sites = 134;
    double mu0 = 0.3, muf = 0.9;
    auto* ginf = oracle->add_subcommand("ginf", "long-time edge correlation after a mu quench on an open chain");
    ginf->add_option("--N", n_sites);
    ginf->add_option("--J", J);
    ginf->add_option("--delta", delta);
    ginf->add_option("--mu0", mu0);
    ginf->add_option("--muf", muf);

    int grid = 64;
    auto* disp = oracle->add_subcommand("dispersion", "bulk quasiparticle energies E_p");
    disp->add_option("--J", J);
    disp->add_option("--delta", delta);
    disp->add_option("--mu", mu);
    disp->add_option("--grid", grid);

    double a = 0.0, b = 1.0, tau_c = 1.0, mean = 0.0;
    int n_r = 64;
    std::vector<double> taus{0.0, 1.0, 2.0, 4.0};
    std::string noise_type = "gaussian-lattice";
    auto* stats = oracle->add_subcommand("noise", "exact stationary statistics and autocorrelation of a noise model");
    stats->add_option("--type", noise_type)->check(CLI::IsMember({"telegraph", "gaussian-lattice"}));
    stats->add_option("--a", a);
    stats->add_option("--b", b);
    stats->add_option("--kappa", kappa);
    stats->add_option("--mean", mean);
    stats->add_option("--sigma", sigma);
    stats->add_option("--tau-c", tau_c);
    stats->add_option("--nr", n_r);
    stats->add_option("--tau", taus, "lags");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return execute(load_config(config_path), run_flags);
        if (*preset) return execute(kitnoise::preset_config(preset_name, smoke), preset_flags);
        if (*list) {
            for (const auto& p : kitnoise::presets()) {
                std::printf("%-12s %-18s %s\n", p.name.c_str(), p.figure.c_str(), p.description.c_str());
            }
            return 0;
        }
        if (*validate) {
            const kitnoise::Diagnostics d = kitnoise::validate_config(load_config(validate_path));
            std::fputs(d.str().c_str(), stderr);
            std::printf("%s\n", d.ok() ? "valid" : "invalid");
            return d.ok() ? 0 : kExitInvalid;
        }
        if (*heating) {
            std::printf("%.17g\n", kitnoise::heating_rate_analytic(J, delta, mu, sigma, kappa, n_k));
            return 0;
        }
        if (*ginf) {
            const auto h0 = kitnoise::build_hamiltonian(kitnoise::WireNetwork::chain(n_sites, J, delta, mu0));
            const auto hf = kitnoise::build_hamiltonian(kitnoise::WireNetwork::chain(n_sites, J, delta, muf));
            std::printf("%.17g\n", kitnoise::quench_g_infinity(h0, hf, 1e-2));
            return 0;
        }
        if (*disp) {
            const auto d = kitnoise::dispersion(J, delta, mu, grid);
            std::printf("p,energy\n");
            for (std::size_t k = 0; k < d.p.size(); ++k) std::printf("%.17g,%.17g\n", d.p[k], d.energy[k]);
            std::fprintf(stderr, "gap %.17g bandwidth %.17g\n", d.gap, d.bandwidth);
            return 0;
        }
        if (*stats) {
            const kitnoise::JumpNoise noise = noise_type == "telegraph"
                                                  ? kitnoise::telegraph(a, b, kappa)
                                                  : kitnoise::discretized_gaussian(mean, sigma, tau_c, n_r);
            const auto s = kitnoise::statistics(noise);
            std::printf("mean %.17g\nvariance %.17g\ncorrelation_time %.17g\n", s.mean, s.variance,
                        s.correlation_time);
            for (double t : taus) std::printf("C(%g) %.17g\n", t, kitnoise::autocorrelation(noise, t));
            return 0;
        }
    } catch (const kitnoise::ParameterError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return 0;
}
