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

#include "cfmimo/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

namespace cfmimo {

void write_csv(std::ostream& os, const SweepResult& result)
{
    os << kCsvHeader << '\n';
    os << std::setprecision(17);
    for (const auto& r : result.rows) {
        os << r.seed << ',' << r.trial << ',' << to_string(r.method) << ',' << r.budget << ',' << r.global_rate << ','
           << r.cutset << ',' << r.uncompressed << ',' << r.wall_time_s << '\n';
    }
}

SweepResult read_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != kCsvHeader)
        throw InvalidParameter("read_csv: missing or unexpected header");
    SweepResult out;
    int max_trial = -1;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');)
            f.push_back(cell);
        if (f.size() != 8)
            throw InvalidParameter("read_csv: expected 8 fields in '" + line + "'");
        SweepRow r;
        r.seed = std::stoull(f[0]);
        r.trial = std::stoi(f[1]);
        r.method = method_from_string(f[2]);
        r.budget = std::stod(f[3]);
        r.global_rate = std::stod(f[4]);
        r.cutset = std::stod(f[5]);
        r.uncompressed = std::stod(f[6]);
        r.wall_time_s = std::stod(f[7]);
        max_trial = std::max(max_trial, r.trial);
        out.rows.push_back(r);
    }
    out.trials_attempted = max_trial + 1;
    return out;
}

nlohmann::json sweep_to_json(const SweepResult& result, const std::vector<SummaryRow>& summary)
{
    auto rows = nlohmann::json::array();
    for (const auto& r : result.rows) {
        rows.push_back({{"seed", r.seed},
                        {"trial", r.trial},
                        {"method", to_string(r.method)},
                        {"L_r", r.budget},
                        {"global_rate", r.global_rate},
                        {"cutset", r.cutset},
                        {"uncompressed", r.uncompressed},
                        {"wall_time_s", r.wall_time_s}});
    }
    auto failures = nlohmann::json::array();
    for (const auto& f : result.failures)
        failures.push_back({{"trial", f.trial}, {"message", f.message}});
    auto sum = nlohmann::json::array();
    for (const auto& s : summary) {
        sum.push_back({{"method", to_string(s.method)},
                       {"L_r", s.budget},
                       {"mean", s.mean},
                       {"std_error", s.std_error},
                       {"count", s.count},
                       {"mean_cutset", s.mean_cutset},
                       {"mean_uncompressed", s.mean_uncompressed}});
    }
    return {{"trials_attempted", result.trials_attempted}, {"rows", rows}, {"failures", failures}, {"summary", sum}};
}

namespace {

const char* kPalette[] = {"#e6b800", "#8e44ad", "#1f77b4", "#d62728", "#2ca02c",
                          "#ff7f0e", "#17becf", "#7f7f7f", "#8c564b"};

} // namespace

std::string render_svg(const std::vector<SummaryRow>& summary, const std::string& title)
{
    const double width = 720, height = 480, left = 70, right = 190, top = 40, bottom = 60;
    const double plot_w = width - left - right, plot_h = height - top - bottom;

    std::vector<Method> methods;
    std::map<double, double> cutset;
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = 0, y_hi = 0;
    for (const auto& s : summary) {
        if (std::find(methods.begin(), methods.end(), s.method) == methods.end())
            methods.push_back(s.method);
        cutset[s.budget] = s.mean_cutset;
        if (s.budget > 0) {
            x_lo = std::min(x_lo, s.budget);
            x_hi = std::max(x_hi, s.budget);
        }
        y_hi = std::max({y_hi, s.mean, s.mean_cutset});
    }
    if (!std::isfinite(x_lo)) {
        x_lo = 1;
        x_hi = 10;
    }
    if (x_hi <= x_lo)
        x_hi = x_lo * 10;
    if (y_hi <= 0)
        y_hi = 1;
    y_hi *= 1.05;

    auto px = [&](double b) {
        return left + plot_w * (std::log10(b) - std::log10(x_lo)) / (std::log10(x_hi) - std::log10(x_lo));
    };
    auto py = [&](double v) { return top + plot_h * (1.0 - v / y_hi); };

    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty())
        os << "<text x=\"" << left << "\" y=\"24\" font-size=\"14\">" << title << "</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
       << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int k = 0; k <= 5; ++k) {
        const double v = y_hi * k / 5.0;
        os << "<line x1=\"" << left - 4 << "\" y1=\"" << py(v) << "\" x2=\"" << left << "\" y2=\"" << py(v)
           << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << left - 8 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">" << std::setprecision(0)
           << v << std::setprecision(2) << "</text>\n";
    }
    for (double decade = std::pow(10.0, std::floor(std::log10(x_lo))); decade <= x_hi * 1.0001; decade *= 10) {
        if (decade < x_lo * 0.9999)
            continue;
        os << "<line x1=\"" << px(decade) << "\" y1=\"" << top + plot_h << "\" x2=\"" << px(decade) << "\" y2=\""
           << top + plot_h + 4 << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << px(decade) << "\" y=\"" << top + plot_h + 18 << "\" text-anchor=\"middle\">"
           << std::setprecision(0) << decade << std::setprecision(2) << "</text>\n";
    }
    os << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 20
       << "\" text-anchor=\"middle\">fronthaul limit per RRH L_r (bits/s/Hz)</text>\n";
    os << "<text x=\"18\" y=\"" << top + plot_h / 2 << "\" transform=\"rotate(-90 18 " << top + plot_h / 2
       << ")\" text-anchor=\"middle\">global information rate (bits/s/Hz)</text>\n";

    auto polyline = [&](const std::vector<std::pair<double, double>>& pts, const std::string& style) {
        os << "<polyline fill=\"none\" " << style << " points=\"";
        for (const auto& [b, v] : pts)
            os << px(b) << ',' << py(v) << ' ';
        os << "\"/>\n";
    };

    std::vector<std::pair<double, double>> bound;
    for (const auto& [b, v] : cutset)
        if (b > 0)
            bound.emplace_back(b, v);
    polyline(bound, "stroke=\"black\" stroke-dasharray=\"6 4\" stroke-width=\"1.5\"");

    double legend_y = top + 10;
    for (std::size_t i = 0; i < methods.size(); ++i) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& s : summary)
            if (s.method == methods[i] && s.budget > 0)
                pts.emplace_back(s.budget, s.mean);
        std::sort(pts.begin(), pts.end());
        const std::string color = kPalette[i % std::size(kPalette)];
        polyline(pts, "stroke=\"" + color + "\" stroke-width=\"2\"");
        os << "<line x1=\"" << width - right + 15 << "\" y1=\"" << legend_y << "\" x2=\"" << width - right + 40
           << "\" y2=\"" << legend_y << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << width - right + 45 << "\" y=\"" << legend_y + 4 << "\">" << to_string(methods[i])
           << "</text>\n";
        legend_y += 18;
    }
    os << "<line x1=\"" << width - right + 15 << "\" y1=\"" << legend_y << "\" x2=\"" << width - right + 40
       << "\" y2=\"" << legend_y << "\" stroke=\"black\" stroke-dasharray=\"6 4\"/>\n";
    os << "<text x=\"" << width - right + 45 << "\" y=\"" << legend_y + 4 << "\">cut-set bound</text>\n";
    os << "</svg>\n";
    return os.str();
}

std::filesystem::path emit(const SweepResult& result, OutputFormat format, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("emit: cannot create directory " + dir.string() + ": " + ec.message());
    const auto path = dir / (format == OutputFormat::Csv ? "results.csv" : "results.json");
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("emit: cannot open " + path.string() + " for writing");
    if (format == OutputFormat::Csv) {
        write_csv(os, result);
    } else {
        const std::vector<SummaryRow> summary =
            result.rows.empty() ? std::vector<SummaryRow>{} : summarize(result);
        os << sweep_to_json(result, summary).dump(2) << '\n';
    }
    if (!os)
        throw std::runtime_error("emit: write failed for " + path.string());
    return path;
}

std::filesystem::path emit_plot(const std::vector<SummaryRow>& summary, const std::filesystem::path& path)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("emit_plot: cannot open " + path.string() + " for writing");
    os << render_svg(summary, "Global information rate vs fronthaul limit");
    if (!os)
        throw std::runtime_error("emit_plot: write failed for " + path.string());
    return path;
}

} // namespace cfmimo
