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

#include <nlohmann/json.hpp>

namespace kitnoise {

using Json = nlohmann::json;

// Every recognised key with its default value. Sites and bonds in configs are
// 1-based; Majorana indices in "G_i_j" observables are 0-based.
Json default_config();

// User document merged onto the defaults (RFC 7386 merge patch).
Json resolve_config(const Json& user);

struct Diagnostic {
    enum class Level { Warning, Error };
    Level level = Level::Error;
    std::string key;
    std::string message;
};

struct Diagnostics {
    std::vector<Diagnostic> items;

    bool ok() const;
    void error(std::string key, std::string message);
    void warning(std::string key, std::string message);
    std::string str() const;
};

// Structural and physical checks without running anything. Accepts either a
// raw user document or a resolved one.
Diagnostics validate_config(const Json& user);

// Dotted-path access, e.g. "noise.kappa".
const Json* find_path(const Json& config, const std::string& path);
void set_path(Json& config, const std::string& path, Json value);

// "key=value"; value is parsed as JSON when possible, else taken as a string.
void apply_override(Json& config, const std::string& assignment);

// Cartesian product of run.sweep axes in key order; each element maps dotted
// paths to values. A config without axes yields one empty point.
std::vector<Json> sweep_points(const Json& resolved);

}  // namespace kitnoise
