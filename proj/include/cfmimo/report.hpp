// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CFMIMO_REPORT_HPP
#define CFMIMO_REPORT_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cfmimo/experiment.hpp"

namespace cfmimo {

inline constexpr const char* kCsvHeader = "seed,trial,method,L_r,global_rate,cutset,uncompressed,wall_time_s";

/// Numbers are written with 17 significant digits so that parsing restores them exactly.
void write_csv(std::ostream& os, const SweepResult& result);
SweepResult read_csv(std::istream& is);

nlohmann::json sweep_to_json(const SweepResult& result, const std::vector<SummaryRow>& summary);

/// SVG line chart: one polyline per method over L_r (log axis), mean cut-set bound dashed.
std::string render_svg(const std::vector<SummaryRow>& summary, const std::string& title = "");

enum class OutputFormat { Csv, Json };

/// Writes results.csv or results.json into `dir`; returns the path written.
std::filesystem::path emit(const SweepResult& result, OutputFormat format, const std::filesystem::path& dir);
std::filesystem::path emit_plot(const std::vector<SummaryRow>& summary, const std::filesystem::path& path);

} // namespace cfmimo

#endif
