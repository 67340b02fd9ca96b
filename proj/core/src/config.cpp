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

#include "kitnoise/config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kitnoise/common.hpp"

namespace kitnoise {

Json default_config() {
    return Json::parse(R"({
  "name": "custom",
  "kind": "evolution",
  "system": {
    "geometry": "chain",
    "N": 60,
    "J": 1.0,
    "delta": 0.8,
    "delta_imag": 0.0,
    "mu": 0.2,
    "tjunction": {
      "left": 10,
      "right": 10,
      "vertical": 10,
      "delta_x": 0.7,
      "mu_topological": 0.1,
      "mu_nontopological": -4.0
    }
  },
  "noise": {
    "type": "telegraph",
    "a": 0.0,
    "b": 0.8,
    "kappa": 0.7,
    "mean": 0.0,
    "sigma": 0.1,
    "tau_c": 1.0,
    "n_r": 64,
    "stationary_start": false,
    "binding": {"target": "global_mu", "site": 1, "bond": [1, 2]}
  },
  "protocol": {
    "type": "none",
    "sites": [1, 2, 3],
    "t_f": 25.0,
    "V": 20.0,
    "exchanges": 1,
    "mu_final": 0.3
  },
  "initial": {"x": 0.0},
  "run": {
    "backend": "marginal",
    "t_max": 20.0,
    "output_step": 0.1,
    "dt": 0.0,
    "n_traj": 1000,
    "seed": 1,
    "parity_trajectories": 8,
    "fit_window": [2.0, 1e300],
    "average_window": [50.0, 150.0],
    "samples": 10000,
    "taus": [0.0, 1.0, 2.0, 4.0],
    "sweep": {}
  },
  "observables": ["edge"],
  "output": {"dir": "kitnoise-out", "snapshot_times": []}
})");
}

Json resolve_config(const Json& user) {
    Json out = default_config();
    if (!user.is_object()) throw ParameterError("config document must be a JSON object");
    out.merge_patch(user);
    // merge_patch treats arrays as atoms and drops nulls; sweep axes are replaced wholesale.
    if (user.contains("run") && user["run"].contains("sweep")) out["run"]["sweep"] = user["run"]["sweep"];
    return out;
}

bool Diagnostics::ok() const {
    return std::none_of(items.begin(), items.end(), [](const Diagnostic& d) { return d.level == Diagnostic::Level::Error; });
}

void Diagnostics::error(std::string key, std::string message) {
    items.push_back(Diagnostic{Diagnostic::Level::Error, std::move(key), std::move(message)});
}

void Diagnostics::warning(std::string key, std::string message) {
    items.push_back(Diagnostic{Diagnostic::Level::Warning, std::move(key), std::move(message)});
}

std::string Diagnostics::str() const {
    std::ostringstream os;
    for (const auto& d : items) {
        os << (d.level == Diagnostic::Level::Error ? "error: " : "warning: ") << d.key << ": " << d.message << "\n";
    }
    return os.str();
}

const Json* find_path(const Json& config, const std::string& path) {
    const Json* node = &config;
    std::stringstream ss(path);
    std::string part;
    while (std::getline(ss, part, '.')) {
        if (!node->is_object() || !node->contains(part)) return nullptr;
        node = &(*node)[part];
    }
    return node;
}

void set_path(Json& config, const std::string& path, Json value) {
    Json* node = &config;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty()) throw ParameterError("empty config path");
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->is_object()) throw ParameterError("config path '" + path + "' crosses a non-object value");
        node = &(*node)[parts[i]];
    }
    (*node)[parts.back()] = std::move(value);
}

void apply_override(Json& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ParameterError("override '" + assignment + "' is not key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    Json value = Json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    set_path(config, key, std::move(value));
}

std::vector<Json> sweep_points(const Json& resolved) {
    std::vector<Json> points{Json::object()};
    const Json* sweep = find_path(resolved, "run.sweep");
    if (!sweep || !sweep->is_object()) return points;
    for (const auto& [key, values] : sweep->items()) {
        if (!values.is_array() || values.empty()) continue;
        std::vector<Json> next;
        for (const Json& p : points) {
            for (const Json& v : values) {
                Json q = p;
                q[key] = v;
                next.push_back(std::move(q));
            }
        }
        points = std::move(next);
    }
    return points;
}

namespace {

bool one_of(const std::string& v, std::initializer_list<const char*> options) {
    return std::any_of(options.begin(), options.end(), [&](const char* o) { return v == o; });
}

double number(const Json& c, const std::string& path, Diagnostics& d) {
    const Json* v = find_path(c, path);
    if (!v || !v->is_number()) {
        d.error(path, "must be a number");
        return std::nan("");
    }
    const double x = v->get<double>();
    if (!std::isfinite(x)) d.error(path, "must be finite");
    return x;
}

std::string text(const Json& c, const std::string& path, Diagnostics& d) {
    const Json* v = find_path(c, path);
    if (!v || !v->is_string()) {
        d.error(path, "must be a string");
        return {};
    }
    return v->get<std::string>();
}

void check_positive(const Json& c, const std::string& path, Diagnostics& d) {
    const double x = number(c, path, d);
    if (std::isfinite(x) && !(x > 0.0)) d.error(path, "must be positive (got " + std::to_string(x) + ")");
}

void check_integer(const Json& c, const std::string& path, long lo, Diagnostics& d) {
    const Json* v = find_path(c, path);
    if (!v || !v->is_number_integer()) {
        d.error(path, "must be an integer");
        return;
    }
    if (v->get<long>() < lo) d.error(path, "must be at least " + std::to_string(lo));
}

int site_count(const Json& c) {
    const std::string g = c["system"]["geometry"].is_string() ? c["system"]["geometry"].get<std::string>() : "";
    if (g == "tjunction") {
        const Json& t = c["system"]["tjunction"];
        if (t["left"].is_number_integer() && t["right"].is_number_integer() && t["vertical"].is_number_integer()) {
            return t["left"].get<int>() + t["right"].get<int>() + t["vertical"].get<int>() + 1;
        }
        return -1;
    }
    return c["system"]["N"].is_number_integer() ? c["system"]["N"].get<int>() : -1;
}

}  // namespace

Diagnostics validate_config(const Json& user) {
    Diagnostics d;
    if (!user.is_object()) {
        d.error("<root>", "config document must be a JSON object");
        return d;
    }
    if (!find_path(user, "run.seed")) d.warning("run.seed", "missing; defaulted to 1");
    Json c;
    try {
        c = resolve_config(user);
    } catch (const std::exception& e) {
        d.error("<root>", e.what());
        return d;
    }

    const std::string kind = text(c, "kind", d);
    if (!one_of(kind, {"evolution", "heating", "transport", "braid", "quench", "noise"})) {
        d.error("kind", "must be one of evolution, heating, transport, braid, quench, noise");
    }
    const std::string geometry = text(c, "system.geometry", d);
    if (!one_of(geometry, {"chain", "ring", "tjunction"})) d.error("system.geometry", "must be chain, ring or tjunction");
    if (geometry == "tjunction") {
        for (const char* k : {"left", "right", "vertical"}) check_integer(c, std::string("system.tjunction.") + k, 0, d);
        number(c, "system.tjunction.delta_x", d);
        number(c, "system.tjunction.mu_topological", d);
        number(c, "system.tjunction.mu_nontopological", d);
    } else {
        check_integer(c, "system.N", 2, d);
    }
    number(c, "system.J", d);
    const double delta = number(c, "system.delta", d);
    const double delta_i = number(c, "system.delta_imag", d);
    number(c, "system.mu", d);
    if (kind != "noise" && geometry != "tjunction" && delta == 0.0 && delta_i == 0.0) {
        d.warning("system.delta", "Delta = 0: the chain has no topological phase and no Majorana edge modes");
    }
    if (kind == "braid" && geometry != "tjunction") d.error("system.geometry", "braid runs need a tjunction geometry");

    const std::string noise = text(c, "noise.type", d);
    if (!one_of(noise, {"none", "telegraph", "gaussian-lattice"})) d.error("noise.type", "must be none, telegraph or gaussian-lattice");
    if (noise == "telegraph") {
        number(c, "noise.a", d);
        number(c, "noise.b", d);
        check_positive(c, "noise.kappa", d);
    } else if (noise == "gaussian-lattice") {
        number(c, "noise.mean", d);
        const double s = number(c, "noise.sigma", d);
        if (std::isfinite(s) && s < 0.0) d.error("noise.sigma", "must be nonnegative");
        check_positive(c, "noise.tau_c", d);
        check_integer(c, "noise.n_r", 1, d);
    }
    const Json* ss = find_path(c, "noise.stationary_start");
    if (!ss || !ss->is_boolean()) d.error("noise.stationary_start", "must be a boolean");

    const int n_sites = site_count(c);
    const std::string target = text(c, "noise.binding.target", d);
    if (!one_of(target, {"global_mu", "site_mu", "site_potential", "bond_split", "junction"})) {
        d.error("noise.binding.target", "must be global_mu, site_mu, site_potential, bond_split or junction");
    }
    if (target == "site_mu" || target == "site_potential") {
        check_integer(c, "noise.binding.site", 1, d);
        const Json* s = find_path(c, "noise.binding.site");
        if (s && s->is_number_integer() && n_sites > 0 && s->get<int>() > n_sites) {
            d.error("noise.binding.site", "exceeds the number of sites " + std::to_string(n_sites));
        }
    }
    if (target == "bond_split") {
        const Json* b = find_path(c, "noise.binding.bond");
        if (!b || !b->is_array() || b->size() != 2 || !(*b)[0].is_number_integer() || !(*b)[1].is_number_integer()) {
            d.error("noise.binding.bond", "must be a pair of 1-based site indices");
        } else if ((*b)[0].get<int>() < 1 || (*b)[1].get<int>() < 1 || (n_sites > 0 && std::max((*b)[0].get<int>(), (*b)[1].get<int>()) > n_sites)) {
            d.error("noise.binding.bond", "refers to a missing site");
        }
    }
    if (target == "junction" && geometry != "tjunction") d.error("noise.binding.target", "junction binding needs a tjunction geometry");

    const std::string backend = text(c, "run.backend", d);
    if (!one_of(backend, {"marginal", "trajectory", "lindblad", "quasi_static", "unitary"})) {
        d.error("run.backend", "must be marginal, trajectory, lindblad, quasi_static or unitary");
    }
    if (noise == "none" && one_of(backend, {"marginal", "trajectory", "lindblad", "quasi_static"}) &&
        one_of(kind, {"evolution", "heating"})) {
        d.error("noise.type", "backend '" + backend + "' requires a jump-noise model");
    }
    if (backend == "lindblad" && noise == "none") d.error("run.backend", "lindblad backend requires kappa and sigma of a noise model");
    check_positive(c, "run.t_max", d);
    check_positive(c, "run.output_step", d);
    const double dt = number(c, "run.dt", d);
    if (std::isfinite(dt) && dt < 0.0) d.error("run.dt", "must be nonnegative (0 selects the automatic step)");
    check_integer(c, "run.n_traj", 1, d);
    check_integer(c, "run.seed", 0, d);
    check_integer(c, "run.samples", 2, d);

    const std::string protocol = text(c, "protocol.type", d);
    if (!one_of(protocol, {"none", "transport", "braid", "quench"})) d.error("protocol.type", "must be none, transport, braid or quench");
    if (kind == "transport" || kind == "braid") check_positive(c, "protocol.t_f", d);
    if (kind == "transport") {
        const Json* s = find_path(c, "protocol.sites");
        if (!s || !s->is_array()) d.error("protocol.sites", "must be an array of 1-based sites");
        number(c, "protocol.V", d);
    }
    if (kind == "quench") number(c, "protocol.mu_final", d);

    const Json* obs = find_path(c, "observables");
    if (!obs || !obs->is_array()) {
        d.error("observables", "must be an array of names");
    } else {
        for (const Json& o : *obs) {
            const std::string name = o.is_string() ? o.get<std::string>() : "";
            if (!(one_of(name, {"edge", "energy", "delta_energy", "delta_energy_per_site"}) || name.rfind("G_", 0) == 0)) {
                d.error("observables", "unknown observable '" + o.dump() + "'");
            }
        }
    }

    const Json* sweep = find_path(c, "run.sweep");
    if (sweep && !sweep->is_object()) d.error("run.sweep", "must be an object of dotted-path axes");
    if (sweep && sweep->is_object()) {
        for (const auto& [key, values] : sweep->items()) {
            if (!find_path(default_config(), key)) d.error("run.sweep." + key, "is not a known config key");
            if (!values.is_array() || values.empty()) {
                d.error("run.sweep." + key, "must be a non-empty array");
                continue;
            }
            for (const Json& v : values) {
                if (v.is_number() && !std::isfinite(v.get<double>())) d.error("run.sweep." + key, "contains a non-finite value");
            }
        }
    }
    return d;
}

}  // namespace kitnoise
