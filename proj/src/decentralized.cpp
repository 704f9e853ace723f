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

#include "cfmimo/decentralized.hpp"

namespace cfmimo {

namespace {

void check_sizes(const EigenChannels& eigen, const std::vector<double>& budgets, const RateAllocation& init,
                 const char* where)
{
    if (budgets.size() != eigen.num_rrhs() || init.num_rrhs() != eigen.num_rrhs())
        throw InvalidParameter(std::string(where) + ": budgets, allocation and channels disagree in size");
    if (!init.feasible())
        throw InvalidParameter(std::string(where) + ": initial allocation is infeasible");
}

RrhRates solve_one(const EigenChannels& eigen, const SideInfoSummary& summary, std::size_t r, double budget,
                   const PgdSettings& settings, const Vec& init, double quantizer_gap)
{
    const GeneralizedEigenvalues gev = effective_eigenvalues(eigen, summary, r, quantizer_gap);
    // The init may come from a different budget; pull it back onto this one.
    return pgd_generalized(gev, budget, eigen.rrh[r].noise_power, settings, Vec(project_feasible(init, budget)));
}

} // namespace

RateAllocation decentralized_solve(const EigenChannels& eigen, const std::vector<double>& budgets,
                                   const std::vector<SideInfoSummary>& summaries, const PgdSettings& settings,
                                   const RateAllocation& init, double quantizer_gap)
{
    check_sizes(eigen, budgets, init, "decentralized_solve");
    if (summaries.size() != eigen.num_rrhs())
        throw InvalidParameter("decentralized_solve: need one side-information summary per RRH");
    RateAllocation out;
    out.rrh.reserve(eigen.num_rrhs());
    for (std::size_t r = 0; r < eigen.num_rrhs(); ++r)
        out.rrh.push_back(solve_one(eigen, summaries[r], r, budgets[r], settings, init.rrh[r].rates, quantizer_gap));
    return out;
}

RateAllocation decentralized_exact(const EigenChannels& eigen, const std::vector<double>& budgets,
                                   const PgdSettings& settings, const RateAllocation& init, int rounds,
                                   double quantizer_gap)
{
    check_sizes(eigen, budgets, init, "decentralized_exact");
    if (rounds < 1)
        throw InvalidParameter("decentralized_exact: rounds must be >= 1");
    RateAllocation current = init;
    for (int k = 0; k < rounds; ++k) {
        std::vector<SideInfoSummary> summaries;
        summaries.reserve(eigen.num_rrhs());
        for (std::size_t r = 0; r < eigen.num_rrhs(); ++r)
            summaries.push_back(side_info_exact(eigen, current, r));
        current = decentralized_solve(eigen, budgets, summaries, settings, init, quantizer_gap);
    }
    return current;
}

RateAllocation coordinate_descent(const EigenChannels& eigen, const std::vector<double>& budgets, int sweeps,
                                  const PgdSettings& settings, const RateAllocation& init,
                                  std::vector<double>* history)
{
    check_sizes(eigen, budgets, init, "coordinate_descent");
    if (sweeps < 1)
        throw InvalidParameter("coordinate_descent: sweeps must be >= 1");
    RateAllocation current = init;
    for (std::size_t r = 0; r < current.num_rrhs(); ++r)
        current.rrh[r].budget = budgets[r];
    if (history) {
        history->clear();
        history->push_back(global_rate(eigen, current));
    }
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        for (std::size_t r = 0; r < eigen.num_rrhs(); ++r) {
            const SideInfoSummary summary = side_info_exact(eigen, current, r);
            const CMat& b = std::get<CMat>(summary.payload);
            RateAllocation candidate = current;
            candidate.rrh[r] = solve_one(eigen, summary, r, budgets[r], settings, current.rrh[r].rates, 1.0);
            if (conditional_rate(eigen, candidate, r, b) >= conditional_rate(eigen, current, r, b))
                current = std::move(candidate);
        }
        if (history)
            history->push_back(global_rate(eigen, current));
    }
    return current;
}

} // namespace cfmimo
