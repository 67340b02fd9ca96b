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

#include "kitnoise/config.hpp"

namespace kitnoise {

struct Preset {
    std::string name;
    std::string figure;
    std::string description;
    Json config;
    // Overrides (dotted path -> value) for the reduced smoke profile.
    Json smoke;
};

const std::vector<Preset>& presets();
// ParameterError for unknown names.
const Preset& find_preset(const std::string& name);
// Preset document, with the smoke overrides applied when requested.
Json preset_config(const std::string& name, bool smoke = false);

}  // namespace kitnoise
