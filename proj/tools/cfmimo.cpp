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

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "cfmimo/channel.hpp"
#include "cfmimo/experiment.hpp"
#include "cfmimo/report.hpp"
#include "cfmimo/topology.hpp"

namespace {

std::vector<std::string> split_csv(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty())
            out.push_back(item);
    return out;
}

cfmimo::ExperimentConfig load_config(const std::string& path)
{
    cfmimo::ExperimentConfig config;
    if (path.empty())
        return config;
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open config file " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config file " + path + ": " + e.what());
    }
    config = j.get<cfmimo::ExperimentConfig>();
    return config;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Compress-forward rate allocation simulator for cell-free MIMO with limited fronthaul"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo sweep over fronthaul budgets");
    std::string config_path, out_dir = "results", methods, budgets, format = "csv";
    std::uint64_t seed = 0;
    int trials = 0, threads = -1;
    bool plot = false, no_timing = false;
    sim->add_option("--config", config_path, "JSON experiment configuration")->check(CLI::ExistingFile);
    sim->add_option("--out", out_dir, "Output directory");
    auto* seed_opt = sim->add_option("--seed", seed, "Base seed");
    sim->add_option("--methods", methods, "Comma-separated method names");
    sim->add_option("--budgets", budgets, "Comma-separated per-RRH fronthaul limits (bits/s/Hz)");
    sim->add_option("--trials", trials, "Number of Monte Carlo trials")->check(CLI::PositiveNumber);
    sim->add_option("--threads", threads, "Worker threads (0 = all cores)");
    sim->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sim->add_flag("--plot", plot, "Also write plot.svg");
    sim->add_flag("--no-timing", no_timing, "Write wall_time_s = 0 for reproducible output");

    auto* topo = app.add_subcommand("topology", "Generate a topology and write it as JSON");
    std::string topo_out = "topology.json";
    std::uint64_t topo_seed = 1;
    cfmimo::TopologyParams topo_params;
    topo->add_option("--seed", topo_seed, "Seed");
    topo->add_option("--out", topo_out, "Output JSON file");
    topo->add_option("--cell-radius", topo_params.cell_radius, "Cell radius in meters");
    topo->add_option("--rrh-per-cell", topo_params.rrh_per_cell, "RRHs per cell");
    topo->add_option("--users-per-cell", topo_params.users_per_cell, "Users per cell");
    topo->add_option("--exclusion", topo_params.exclusion_radius, "Exclusion radius in meters");

    auto* chan = app.add_subcommand("channels", "Draw one channel realization and dump it (binary)");
    std::string chan_topology, chan_out = "channels.bin";
    std::uint64_t chan_seed = 1;
    chan->add_option("--topology", chan_topology, "Topology JSON file")->required()->check(CLI::ExistingFile);
    chan->add_option("--seed", chan_seed, "Seed");
    chan->add_option("--out", chan_out, "Output file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            cfmimo::ExperimentConfig config = load_config(config_path);
            if (*seed_opt)
                config.seed = seed;
            if (trials > 0)
                config.trials = trials;
            if (threads >= 0)
                config.threads = threads;
            if (!methods.empty()) {
                config.methods.clear();
                for (const auto& m : split_csv(methods))
                    config.methods.push_back(cfmimo::method_from_string(m));
            }
            if (!budgets.empty()) {
                config.budgets.clear();
                for (const auto& b : split_csv(budgets))
                    config.budgets.push_back(std::stod(b));
            }
            if (no_timing)
                config.record_timing = false;

            const cfmimo::SweepResult result = cfmimo::run_sweep(config);
            const auto path = cfmimo::emit(result, format == "csv" ? cfmimo::OutputFormat::Csv
                                                                   : cfmimo::OutputFormat::Json, out_dir);
            std::cout << "wrote " << path.string() << " (" << result.rows.size() << " rows, "
                      << result.failures.size() << " failed trials)\n";
            for (const auto& f : result.failures)
                std::cerr << "trial " << f.trial << " skipped: " << f.message << '\n';
            if (plot) {
                const auto svg = cfmimo::emit_plot(cfmimo::summarize(result), std::filesystem::path(out_dir) / "plot.svg");
                std::cout << "wrote " << svg.string() << '\n';
            }
        } else if (*topo) {
            const cfmimo::Topology t = cfmimo::build_topology(topo_params, topo_seed);
            std::ofstream os(topo_out);
            if (!os)
                throw std::runtime_error("cannot open " + topo_out);
            os << nlohmann::json(t).dump(2) << '\n';
            std::cout << "wrote " << topo_out << '\n';
        } else if (*chan) {
            std::ifstream is(chan_topology);
            nlohmann::json j;
            is >> j;
            const auto t = j.get<cfmimo::Topology>();
            const auto realization = cfmimo::draw_channels(t, cfmimo::ChannelParams{}, chan_seed);
            cfmimo::write_realization(realization, chan_out);
            std::cout << "wrote " << chan_out << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
