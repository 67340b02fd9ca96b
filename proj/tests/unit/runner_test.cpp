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

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "kitnoise/presets.hpp"
#include "kitnoise/runner.hpp"

namespace kitnoise {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("kitnoise_test_" + name);
    fs::remove_all(p);
    return p;
}

bool has(const Diagnostics& d, Diagnostic::Level level, const std::string& key) {
    for (const auto& i : d.items) {
        if (i.level == level && i.key == key) return true;
    }
    return false;
}

Json small_evolution() {
    return Json{{"name", "small"},
                {"system", {{"N", 8}}},
                {"noise", {{"kappa", 0.7}}},
                {"run", {{"t_max", 2.0}, {"output_step", 0.5}, {"seed", 3}}}};
}

TEST(Config, DefaultsValidate) {
    const Diagnostics d = validate_config(default_config());
    EXPECT_TRUE(d.ok()) << d.str();
}

TEST(Config, MissingSeedWarnsAndDefaults) {
    Json c = small_evolution();
    c["run"].erase("seed");
    const Diagnostics d = validate_config(c);
    EXPECT_TRUE(d.ok());
    EXPECT_TRUE(has(d, Diagnostic::Level::Warning, "run.seed"));
    EXPECT_EQ(resolve_config(c)["run"]["seed"], 1);
}

TEST(Config, ZeroPairingWarns) {
    Json c = small_evolution();
    c["system"]["delta"] = 0.0;
    const Diagnostics d = validate_config(c);
    EXPECT_TRUE(d.ok());
    EXPECT_TRUE(has(d, Diagnostic::Level::Warning, "system.delta"));
}

TEST(Config, NegativeKappaIsAnError) {
    Json c = small_evolution();
    c["noise"]["kappa"] = -0.5;
    const Diagnostics d = validate_config(c);
    EXPECT_FALSE(d.ok());
    EXPECT_TRUE(has(d, Diagnostic::Level::Error, "noise.kappa"));
}

TEST(Config, ErrorsNameTheKey) {
    Json c = small_evolution();
    c["run"]["backend"] = "euler";
    c["noise"]["binding"] = {{"target", "site_mu"}, {"site", 40}};
    c["run"]["sweep"] = {{"noise.nonexistent", {1, 2}}};
    const Diagnostics d = validate_config(c);
    EXPECT_TRUE(has(d, Diagnostic::Level::Error, "run.backend"));
    EXPECT_TRUE(has(d, Diagnostic::Level::Error, "noise.binding.site"));
    EXPECT_TRUE(has(d, Diagnostic::Level::Error, "run.sweep.noise.nonexistent"));
    Json lindblad = small_evolution();
    lindblad["noise"]["type"] = "none";
    lindblad["run"]["backend"] = "lindblad";
    EXPECT_TRUE(has(validate_config(lindblad), Diagnostic::Level::Error, "run.backend"));
}

TEST(Config, OverridesParseJsonOrString) {
    Json c = default_config();
    apply_override(c, "noise.kappa=2.5");
    apply_override(c, "run.backend=trajectory");
    apply_override(c, "noise.binding.bond=[3,4]");
    EXPECT_EQ(c["noise"]["kappa"], 2.5);
    EXPECT_EQ(c["run"]["backend"], "trajectory");
    EXPECT_EQ(c["noise"]["binding"]["bond"], Json::array({3, 4}));
    EXPECT_THROW(apply_override(c, "novalue"), ParameterError);
}

TEST(Config, SweepIsCartesianInKeyOrder) {
    Json c = default_config();
    c["run"]["sweep"] = {{"noise.kappa", {1, 2}}, {"system.mu", {0.0, 0.5, 1.0}}};
    const std::vector<Json> p = sweep_points(c);
    ASSERT_EQ(p.size(), 6u);
    EXPECT_EQ(p[0]["noise.kappa"], 1);
    EXPECT_EQ(p[1]["system.mu"], 0.5);
    EXPECT_EQ(p[3]["noise.kappa"], 2);
    EXPECT_EQ(sweep_points(default_config()).size(), 1u);
}

TEST(Presets, CatalogueIsComplete) {
    const std::set<std::string> expected{"fig2b", "fig2c", "fig2d", "fig3a", "fig3b", "fig4a", "fig4b",
                                         "split", "fig7", "tjunction", "fig8", "noise-check"};
    std::set<std::string> got;
    for (const auto& p : presets()) {
        got.insert(p.name);
        EXPECT_FALSE(p.description.empty());
        EXPECT_FALSE(p.figure.empty());
        for (bool smoke : {false, true}) {
            const Diagnostics d = validate_config(preset_config(p.name, smoke));
            EXPECT_TRUE(d.ok()) << p.name << "\n" << d.str();
        }
    }
    EXPECT_EQ(got, expected);
    EXPECT_THROW(find_preset("fig99"), ParameterError);
}

TEST(Output, DoublesRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
}

TEST(Runner, EmptySweepWritesOneCsv) {
    const fs::path dir = scratch("single");
    RunOptions o;
    o.output_dir = dir;
    const RunRecord r = run_experiment(small_evolution(), o);
    ASSERT_EQ(r.points.size(), 1u);
    EXPECT_EQ(r.points[0].file, "small.csv");
    const std::string csv = slurp(dir / "small.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,edge");
    EXPECT_EQ(csv.find('\r'), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / r.index_file));

    const Json meta = Json::parse(slurp(dir / r.sidecar_file));
    EXPECT_EQ(meta["seed"], 3);
    EXPECT_EQ(meta["version"], version());
    EXPECT_EQ(meta["csv_files"], Json::array({"small.csv"}));
    EXPECT_TRUE(meta["config"]["run"].is_object());
    fs::remove_all(dir);
}

TEST(Runner, SweepOutputIsDeterministicAndThreadIndependent) {
    Json c = small_evolution();
    c["observables"] = {"edge", "energy", "G_0_15"};
    c["run"]["sweep"] = {{"noise.kappa", {0.3, 3.0}}, {"run.backend", {"marginal", "trajectory"}}};
    c["run"]["n_traj"] = 40;
    const fs::path a = scratch("sweep_a");
    const fs::path b = scratch("sweep_b");
    RunOptions oa;
    oa.output_dir = a;
    oa.threads = 1;
    RunOptions ob;
    ob.output_dir = b;
    ob.threads = 3;
    const RunRecord ra = run_experiment(c, oa);
    const RunRecord rb = run_experiment(c, ob);
    ASSERT_EQ(ra.points.size(), 4u);
    for (const auto& p : ra.points) EXPECT_EQ(slurp(a / p.file), slurp(b / p.file)) << p.file;
    EXPECT_EQ(slurp(a / ra.index_file), slurp(b / rb.index_file));
    EXPECT_EQ(ra.points[1].file, "small_001.csv");
    const std::string traj = slurp(a / ra.points[1].file);
    EXPECT_EQ(traj.substr(0, traj.find('\n')), "t,edge,energy,G_0_15,edge_se,energy_se,G_0_15_se");

    // The echoed config reproduces the run.
    const fs::path e = scratch("sweep_echo");
    RunOptions oe;
    oe.output_dir = e;
    const RunRecord re = run_experiment(ra.config, oe);
    for (const auto& p : re.points) EXPECT_EQ(slurp(a / p.file), slurp(e / p.file));
    for (const auto& d : {a, b, e}) fs::remove_all(d);
}

TEST(Runner, RuntimeErrorsNameTheSweepPoint) {
    Json c = small_evolution();
    c["system"]["mu"] = 5.0;  // trivial phase: no edge modes for the "edge" observable
    c["run"]["sweep"] = {{"noise.kappa", {0.5}}};
    RunOptions o;
    o.output_dir = scratch("error");
    try {
        run_experiment(c, o);
        FAIL() << "expected StateError";
    } catch (const StateError& e) {
        EXPECT_NE(std::string(e.what()).find("sweep point 0"), std::string::npos) << e.what();
    }
    fs::remove_all(o.output_dir);
}

TEST(Runner, HeatingKindReportsAnalyticColumn) {
    Json c = preset_config("fig3b", true);
    RunOptions o;
    o.output_dir = scratch("heating");
    const RunRecord r = run_experiment(c, o);
    const std::string index = slurp(o.output_dir / r.index_file);
    EXPECT_NE(index.find("D_analytic"), std::string::npos);
    EXPECT_NE(index.find("D_fit"), std::string::npos);
    fs::remove_all(o.output_dir);
}

TEST(Runner, InvalidConfigThrowsParameterError) {
    Json c = small_evolution();
    c["noise"]["kappa"] = -1.0;
    EXPECT_THROW(run_experiment(c, {}), ParameterError);
}

}  // namespace
}  // namespace kitnoise
