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

#ifndef CFMIMO_EXPERIMENT_HPP
#define CFMIMO_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "cfmimo/allocators.hpp"
#include "cfmimo/channel.hpp"
#include "cfmimo/side_information.hpp"
#include "cfmimo/topology.hpp"

namespace cfmimo {

enum class Method {
    EqualPhysical,
    EqualEigen,
    LocalWf,
    CentralizedPgd,
    DecentralExact,
    DecentralWfHeuristic,
    DecentralStatistical,
    DecentralTraffic,
    CoordinateDescent,
};

std::string to_string(Method method);
Method method_from_string(const std::string& name);
const std::vector<Method>& all_methods();

/// `n` log-spaced values from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, int n);

struct ExperimentConfig {
    TopologyParams topology;
    bool fixed_rrhs = false; // keep RRHs of trial 0 and redraw only users
    ChannelParams channel;
    std::vector<Method> methods = all_methods();
    std::vector<double> budgets = log_spaced(1.0, 200.0, 12);
    std::vector<double> rrh_budget_scale; // per-RRH multipliers on L_r; empty = homogeneous
    int trials = 100;
    std::uint64_t seed = 1;
    PgdSettings pgd;
    int cd_sweeps = 3;
    int exact_rounds = 2;
    QuadratureSpec quadrature;
    int threads = 0; // 0 = hardware concurrency
    bool record_timing = true;
    double max_failure_fraction = 0.05;

    void validate() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& config);
void from_json(const nlohmann::json& j, ExperimentConfig& config);

struct SweepRow {
    std::uint64_t seed = 0; // per-trial seed
    int trial = 0;
    Method method = Method::LocalWf;
    double budget = 0.0;
    double global_rate = 0.0;
    double cutset = 0.0;
    double uncompressed = 0.0;
    double wall_time_s = 0.0;

    bool operator==(const SweepRow&) const = default;
};

struct TrialFailure {
    int trial = 0;
    std::string message;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<TrialFailure> failures;
    int trials_attempted = 0;
};

/// Seed of trial k: derive_seed(base, k). Topology and channels use further
/// derived streams 1 and 2 of the trial seed.
std::uint64_t trial_seed(std::uint64_t base_seed, int trial);

/// One trial: returns rows ordered by (budget, method) in config order.
std::vector<SweepRow> run_trial(const ExperimentConfig& config, int trial);

/// Runs all trials, concurrently when threads allow; rows are merged in
/// (trial, budget, method) order. Throws when failures exceed the allowed fraction.
SweepResult run_sweep(const ExperimentConfig& config);

struct SummaryRow {
    Method method = Method::LocalWf;
    double budget = 0.0;
    double mean = 0.0;
    double std_error = 0.0;
    int count = 0;
    double mean_cutset = 0.0;
    double mean_uncompressed = 0.0;
};

std::vector<SummaryRow> summarize(const SweepResult& result);

/// Budget vector for every RRH at nominal value L.
std::vector<double> rrh_budgets(const ExperimentConfig& config, std::size_t num_rrhs, double nominal);

} // namespace cfmimo

#endif
