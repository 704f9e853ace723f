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

#include "cfmimo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <thread>

#include "cfmimo/decentralized.hpp"
#include "cfmimo/random.hpp"

namespace cfmimo {

namespace {

const std::vector<std::pair<Method, const char*>>& method_names()
{
    static const std::vector<std::pair<Method, const char*>> names = {
        {Method::EqualPhysical, "equal-physical"},
        {Method::EqualEigen, "equal-eigen"},
        {Method::LocalWf, "local-wf"},
        {Method::CentralizedPgd, "centralized-pgd"},
        {Method::DecentralExact, "decentral-exact"},
        {Method::DecentralWfHeuristic, "decentral-wf-heuristic"},
        {Method::DecentralStatistical, "decentral-statistical"},
        {Method::DecentralTraffic, "decentral-traffic"},
        {Method::CoordinateDescent, "coordinate-descent"},
    };
    return names;
}

} // namespace

std::string to_string(Method method)
{
    for (const auto& [m, name] : method_names())
        if (m == method)
            return name;
    return "unknown";
}

Method method_from_string(const std::string& name)
{
    for (const auto& [m, n] : method_names())
        if (name == n)
            return m;
    throw InvalidParameter("unknown method '" + name + "'");
}

const std::vector<Method>& all_methods()
{
    static const std::vector<Method> methods = [] {
        std::vector<Method> out;
        for (const auto& entry : method_names())
            out.push_back(entry.first);
        return out;
    }();
    return methods;
}

std::vector<double> log_spaced(double lo, double hi, int n)
{
    if (n < 1 || !(lo > 0.0) || !(hi >= lo))
        throw InvalidParameter("log_spaced: need n >= 1 and 0 < lo <= hi");
    std::vector<double> out;
    if (n == 1)
        return {lo};
    for (int k = 0; k < n; ++k)
        out.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1)));
    out.back() = hi;
    return out;
}

void ExperimentConfig::validate() const
{
    if (trials < 1)
        throw InvalidParameter("ExperimentConfig: trials must be >= 1");
    if (methods.empty())
        throw InvalidParameter("ExperimentConfig: at least one method is required");
    if (budgets.empty())
        throw InvalidParameter("ExperimentConfig: at least one budget is required");
    for (double b : budgets)
        if (!(b >= 0.0) || !std::isfinite(b))
            throw InvalidParameter("ExperimentConfig: budgets must be finite and non-negative");
    for (double s : rrh_budget_scale)
        if (!(s >= 0.0) || !std::isfinite(s))
            throw InvalidParameter("ExperimentConfig: rrh_budget_scale entries must be finite and non-negative");
    if (!rrh_budget_scale.empty() &&
        rrh_budget_scale.size() != static_cast<std::size_t>(kClusterCells * topology.rrh_per_cell))
        throw InvalidParameter("ExperimentConfig: rrh_budget_scale must have one entry per RRH");
    if (cd_sweeps < 1 || exact_rounds < 1)
        throw InvalidParameter("ExperimentConfig: cd_sweeps and exact_rounds must be >= 1");
    channel.validate();
    pgd.validate();
}

void to_json(nlohmann::json& j, const ExperimentConfig& c)
{
    std::vector<std::string> methods;
    for (auto m : c.methods)
        methods.push_back(to_string(m));
    j = nlohmann::json{
        {"topology",
         {{"cell_radius", c.topology.cell_radius},
          {"rrh_per_cell", c.topology.rrh_per_cell},
          {"users_per_cell", c.topology.users_per_cell},
          {"exclusion_radius", c.topology.exclusion_radius},
          {"fixed_rrhs", c.fixed_rrhs}}},
        {"channel",
         {{"antennas_per_rrh", c.channel.antennas_per_rrh},
          {"carrier_freq_mhz", c.channel.carrier_freq_mhz},
          {"shadowing_sigma_db", c.channel.shadowing_sigma_db},
          {"tx_power_mw", c.channel.tx_power_mw},
          {"noise_power_mw", c.channel.noise_power_mw},
          {"quantizer_gap", c.channel.quantizer_gap}}},
        {"methods", methods},
        {"budgets", c.budgets},
        {"rrh_budget_scale", c.rrh_budget_scale},
        {"trials", c.trials},
        {"seed", c.seed},
        {"pgd",
         {{"step_size", c.pgd.step_size},
          {"max_iters", c.pgd.max_iters},
          {"convergence_tol", c.pgd.convergence_tol},
          {"backtracking", c.pgd.backtracking},
          {"shrink", c.pgd.shrink}}},
        {"cd_sweeps", c.cd_sweeps},
        {"exact_rounds", c.exact_rounds},
        {"quadrature_grid", c.quadrature.grid},
        {"threads", c.threads},
        {"record_timing", c.record_timing},
    };
}

void from_json(const nlohmann::json& j, ExperimentConfig& c)
{
    c = ExperimentConfig{};
    if (j.contains("topology")) {
        const auto& t = j.at("topology");
        c.topology.cell_radius = t.value("cell_radius", c.topology.cell_radius);
        c.topology.rrh_per_cell = t.value("rrh_per_cell", c.topology.rrh_per_cell);
        c.topology.users_per_cell = t.value("users_per_cell", c.topology.users_per_cell);
        c.topology.exclusion_radius = t.value("exclusion_radius", c.topology.exclusion_radius);
        c.fixed_rrhs = t.value("fixed_rrhs", c.fixed_rrhs);
        if (t.value("cells", kClusterCells) != kClusterCells)
            throw InvalidParameter("ExperimentConfig: only the 7-cell wrap-around layout is supported");
    }
    if (j.contains("channel")) {
        const auto& ch = j.at("channel");
        c.channel.antennas_per_rrh = ch.value("antennas_per_rrh", c.channel.antennas_per_rrh);
        c.channel.carrier_freq_mhz = ch.value("carrier_freq_mhz", c.channel.carrier_freq_mhz);
        c.channel.shadowing_sigma_db = ch.value("shadowing_sigma_db", c.channel.shadowing_sigma_db);
        c.channel.tx_power_mw = ch.value("tx_power_mw", c.channel.tx_power_mw);
        c.channel.noise_power_mw = ch.value("noise_power_mw", c.channel.noise_power_mw);
        if (ch.contains("noise_power_dbm"))
            c.channel.noise_power_mw = dbm_to_mw(ch.at("noise_power_dbm").get<double>());
        c.channel.quantizer_gap = ch.value("quantizer_gap", c.channel.quantizer_gap);
    }
    if (j.contains("methods")) {
        c.methods.clear();
        for (const auto& m : j.at("methods"))
            c.methods.push_back(method_from_string(m.get<std::string>()));
    }
    if (j.contains("budgets")) {
        const auto& b = j.at("budgets");
        if (b.is_object())
            c.budgets = log_spaced(b.at("min").get<double>(), b.at("max").get<double>(), b.at("count").get<int>());
        else
            c.budgets = b.get<std::vector<double>>();
    }
    c.rrh_budget_scale = j.value("rrh_budget_scale", c.rrh_budget_scale);
    c.trials = j.value("trials", c.trials);
    c.seed = j.value("seed", c.seed);
    if (j.contains("pgd")) {
        const auto& p = j.at("pgd");
        c.pgd.step_size = p.value("step_size", c.pgd.step_size);
        c.pgd.max_iters = p.value("max_iters", c.pgd.max_iters);
        c.pgd.convergence_tol = p.value("convergence_tol", c.pgd.convergence_tol);
        c.pgd.backtracking = p.value("backtracking", c.pgd.backtracking);
        c.pgd.shrink = p.value("shrink", c.pgd.shrink);
    }
    c.cd_sweeps = j.value("cd_sweeps", c.cd_sweeps);
    c.exact_rounds = j.value("exact_rounds", c.exact_rounds);
    c.quadrature.grid = j.value("quadrature_grid", c.quadrature.grid);
    c.threads = j.value("threads", c.threads);
    c.record_timing = j.value("record_timing", c.record_timing);
}

std::uint64_t trial_seed(std::uint64_t base_seed, int trial)
{
    return derive_seed(base_seed, static_cast<std::uint64_t>(trial));
}

std::vector<double> rrh_budgets(const ExperimentConfig& config, std::size_t num_rrhs, double nominal)
{
    std::vector<double> out(num_rrhs, nominal);
    if (!config.rrh_budget_scale.empty())
        for (std::size_t r = 0; r < num_rrhs; ++r)
            out[r] = nominal * config.rrh_budget_scale.at(r);
    return out;
}

namespace {

void audit(const RateAllocation& alloc, Method method, double budget)
{
    for (std::size_t r = 0; r < alloc.num_rrhs(); ++r)
        if (!alloc.rrh[r].feasible())
            throw std::logic_error(to_string(method) + " returned an infeasible allocation at RRH " +
                                   std::to_string(r) + " for L_r = " + std::to_string(budget));
}

struct TrialState {
    Topology topology;
    ChannelRealization channels;
    EigenChannels eigen;
    std::optional<Vec> traffic;
};

TrialState prepare_trial(const ExperimentConfig& config, std::uint64_t seed)
{
    TrialState s;
    if (config.fixed_rrhs) {
        s.topology = build_topology(config.topology, derive_seed(config.seed, 0xF1ED));
        place_users(s.topology, config.topology.users_per_cell, derive_seed(seed, 1));
    } else {
        s.topology = build_topology(config.topology, derive_seed(seed, 1));
    }
    s.channels = draw_channels(s.topology, config.channel, derive_seed(seed, 2));
    s.eigen = eigen_decompose(s.channels, config.channel);
    return s;
}

double evaluate(const ExperimentConfig& config, TrialState& s, Method method, const std::vector<double>& budgets,
                double nominal)
{
    const EigenChannels& eigen = s.eigen;
    const std::size_t R = eigen.num_rrhs();
    const double gap = config.channel.quantizer_gap;

    if (method == Method::EqualPhysical) {
        std::vector<Vec> per_antenna;
        RateAllocation alloc;
        for (std::size_t r = 0; r < R; ++r) {
            auto split = equal_split(Basis::Physical, eigen.antennas(), budgets[r]);
            per_antenna.push_back(split.rates.rates);
            alloc.rrh.push_back(split.rates);
        }
        audit(alloc, method, nominal);
        return global_rate_physical(s.channels.channels, s.channels.noise_power, per_antenna, eigen.tx_power);
    }

    const RateAllocation wf = waterfill_all(eigen, budgets);
    RateAllocation alloc;
    switch (method) {
    case Method::EqualEigen: alloc = equal_split_all(eigen, budgets); break;
    case Method::LocalWf: alloc = wf; break;
    case Method::CentralizedPgd: alloc = pgd_centralized(eigen, budgets, config.pgd, wf); break;
    case Method::DecentralExact:
        alloc = decentralized_exact(eigen, budgets, config.pgd, wf, config.exact_rounds, gap);
        break;
    case Method::DecentralWfHeuristic: {
        std::vector<SideInfoSummary> summaries;
        for (std::size_t r = 0; r < R; ++r) {
            SideInfoSummary summary = side_info_exact(eigen, wf, r);
            summary.kind = SideInfoKind::WfHeuristic;
            summaries.push_back(std::move(summary));
        }
        alloc = decentralized_solve(eigen, budgets, summaries, config.pgd, wf, gap);
        break;
    }
    case Method::DecentralStatistical: {
        std::vector<SideInfoSummary> summaries;
        for (std::size_t r = 0; r < R; ++r)
            summaries.push_back(side_info_statistical(s.channels.large_scale_gain, budgets, r, config.channel));
        alloc = decentralized_solve(eigen, budgets, summaries, config.pgd, wf, gap);
        break;
    }
    case Method::DecentralTraffic: {
        if (!s.traffic)
            s.traffic = traffic_gains(s.topology, TrafficPdf::uniform(), config.channel, config.quadrature);
        std::vector<SideInfoSummary> summaries;
        for (std::size_t r = 0; r < R; ++r)
            summaries.push_back(side_info_traffic(*s.traffic, budgets, r, config.channel, s.topology.num_users()));
        alloc = decentralized_solve(eigen, budgets, summaries, config.pgd, wf, gap);
        break;
    }
    case Method::CoordinateDescent:
        alloc = coordinate_descent(eigen, budgets, config.cd_sweeps, config.pgd, wf);
        break;
    case Method::EqualPhysical: break;
    }
    audit(alloc, method, nominal);
    return global_rate(eigen, alloc);
}

} // namespace

std::vector<SweepRow> run_trial(const ExperimentConfig& config, int trial)
{
    const std::uint64_t seed = trial_seed(config.seed, trial);
    TrialState state = prepare_trial(config, seed);
    const double uncompressed = uncompressed_rate(state.eigen);

    std::vector<SweepRow> rows;
    for (double nominal : config.budgets) {
        const std::vector<double> budgets = rrh_budgets(config, state.eigen.num_rrhs(), nominal);
        const double cutset = cutset_bound(state.eigen, budgets);
        for (Method method : config.methods) {
            const auto start = std::chrono::steady_clock::now();
            const double rate = evaluate(config, state, method, budgets, nominal);
            const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
            if (!std::isfinite(rate) || rate < -1e-9 || rate > cutset + 1e-6)
                throw NumericalError(to_string(method) + " produced rate " + std::to_string(rate) +
                                     " outside [0, cut-set " + std::to_string(cutset) + "]");
            SweepRow row;
            row.seed = seed;
            row.trial = trial;
            row.method = method;
            row.budget = nominal;
            row.global_rate = std::max(rate, 0.0);
            row.cutset = cutset;
            row.uncompressed = uncompressed;
            row.wall_time_s = config.record_timing ? elapsed.count() : 0.0;
            rows.push_back(row);
        }
    }
    return rows;
}

SweepResult run_sweep(const ExperimentConfig& config)
{
    config.validate();
    const int threads = std::max(1, std::min(config.trials, config.threads > 0
                                                                 ? config.threads
                                                                 : static_cast<int>(std::thread::hardware_concurrency())));
    std::vector<std::optional<std::vector<SweepRow>>> per_trial(static_cast<std::size_t>(config.trials));
    std::vector<std::optional<std::string>> errors(static_cast<std::size_t>(config.trials));
    std::atomic<int> next{0};
    std::mutex fatal_mutex;
    std::exception_ptr fatal;

    auto worker = [&] {
        for (int k = next++; k < config.trials; k = next++) {
            try {
                per_trial[k] = run_trial(config, k);
            } catch (const NumericalError& e) {
                errors[k] = e.what();
            } catch (const DegenerateGeometry& e) {
                errors[k] = e.what();
            } catch (...) {
                std::lock_guard lock(fatal_mutex);
                if (!fatal)
                    fatal = std::current_exception();
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back(worker);
    }
    if (fatal)
        std::rethrow_exception(fatal);

    SweepResult out;
    out.trials_attempted = config.trials;
    for (int k = 0; k < config.trials; ++k) {
        if (per_trial[k])
            out.rows.insert(out.rows.end(), per_trial[k]->begin(), per_trial[k]->end());
        else
            out.failures.push_back({k, errors[k].value_or("unknown failure")});
    }
    if (static_cast<double>(out.failures.size()) > config.max_failure_fraction * config.trials)
        throw NumericalError("run_sweep: " + std::to_string(out.failures.size()) + " of " +
                             std::to_string(config.trials) + " trials failed; first: " +
                             out.failures.front().message);
    return out;
}

std::vector<SummaryRow> summarize(const SweepResult& result)
{
    if (result.rows.empty())
        throw InvalidParameter("summarize: empty sweep result");
    struct Acc {
        std::vector<double> values;
        double cutset = 0, uncompressed = 0;
    };
    // Keep first-seen ordering of methods and budgets.
    std::vector<Method> methods;
    std::vector<double> budgets;
    std::map<std::pair<int, double>, Acc> acc;
    for (const auto& row : result.rows) {
        if (std::find(methods.begin(), methods.end(), row.method) == methods.end())
            methods.push_back(row.method);
        if (std::find(budgets.begin(), budgets.end(), row.budget) == budgets.end())
            budgets.push_back(row.budget);
        auto& a = acc[{static_cast<int>(row.method), row.budget}];
        a.values.push_back(row.global_rate);
        a.cutset += row.cutset;
        a.uncompressed += row.uncompressed;
    }
    std::vector<SummaryRow> out;
    for (Method m : methods) {
        for (double b : budgets) {
            auto it = acc.find({static_cast<int>(m), b});
            if (it == acc.end())
                continue;
            const Acc& a = it->second;
            SummaryRow s;
            s.method = m;
            s.budget = b;
            const auto n = static_cast<double>(a.values.size());
            s.count = static_cast<int>(a.values.size());
            s.mean = std::accumulate(a.values.begin(), a.values.end(), 0.0) / n;
            s.mean_cutset = a.cutset / n;
            s.mean_uncompressed = a.uncompressed / n;
            if (s.count > 1) {
                double ss = 0.0;
                for (double v : a.values)
                    ss += (v - s.mean) * (v - s.mean);
                s.std_error = std::sqrt(ss / (n - 1.0) / n);
            }
            out.push_back(s);
        }
    }
    return out;
}

} // namespace cfmimo
