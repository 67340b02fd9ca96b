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

#include "kitnoise/output.hpp"

#include <cstdio>
#include <fstream>

namespace kitnoise {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header.size()) throw ParameterError("CSV row width does not match the header");
    rows.push_back(std::move(row));
}

CsvTable series_table(const TimeSeries& ts) {
    CsvTable table;
    table.header.push_back("t");
    for (const auto& n : ts.names) table.header.push_back(n);
    const bool se = !ts.standard_errors.empty();
    if (se) {
        for (const auto& n : ts.names) table.header.push_back(n + "_se");
    }
    for (std::size_t k = 0; k < ts.t.size(); ++k) {
        std::vector<std::string> row{format_double(ts.t[k])};
        for (const auto& col : ts.values) row.push_back(format_double(col[k]));
        if (se) {
            for (const auto& col : ts.standard_errors) row.push_back(format_double(col[k]));
        }
        table.add_row(std::move(row));
    }
    return table;
}

namespace {

void atomic_write(const std::filesystem::path& path, const std::string& body) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out << body;
        if (!out) throw Error("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::string body;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) body += ',';
            body += cells[i];
        }
        body += '\n';
    };
    line(table.header);
    for (const auto& r : table.rows) line(r);
    atomic_write(path, body);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
    atomic_write(path, value.dump(2) + "\n");
}

}  // namespace kitnoise
