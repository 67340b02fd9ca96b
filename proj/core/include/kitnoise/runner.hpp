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
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "kitnoise/config.hpp"
#include "kitnoise/dynamics.hpp"
#include "kitnoise/output.hpp"

namespace kitnoise {

std::string version();

struct RunOptions {
    // Overrides output.dir when set.
    std::filesystem::path output_dir;
    // Extra short checks per point: noise-free purity and trajectory parity.
    bool invariant_probes = false;
    // Sweep-point workers; 0 uses KITNOISE_THREADS or the hardware count.
    int threads = 0;
};

// Result of one resolved configuration, before anything is written.
struct PointOutput {
    CsvTable table;
    std::vector<std::pair<std::string, double>> summary;
    InvariantReport invariants;
    // Side tables (suffix -> table), written as <stem>_<suffix>.csv.
    std::vector<std::pair<std::string, CsvTable>> extras;
};

PointOutput evaluate_point(const Json& resolved, const RunOptions& options = {});

struct PointRecord {
    Json overrides;
    std::string file;
    std::vector<std::string> extra_files;
    std::vector<std::pair<std::string, double>> summary;
    InvariantReport invariants;
};

struct RunRecord {
    Json config;  // resolved echo, re-runnable as is
    std::string version;
    std::uint64_t seed = 0;
    double wall_time = 0.0;
    std::filesystem::path directory;
    std::string index_file;
    std::string sidecar_file;
    std::vector<PointRecord> points;
    InvariantReport invariants;
    std::vector<std::string> warnings;

    // Flat metadata object written as the JSON sidecar.
    Json metadata() const;
};

// Validates, runs every sweep point, writes one CSV per point, the index
// file (last) and the sidecar. Errors name the failing key or sweep point.
RunRecord run_experiment(const Json& config, const RunOptions& options = {});

}  // namespace kitnoise
