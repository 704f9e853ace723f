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

#ifndef CFMIMO_DECENTRALIZED_HPP
#define CFMIMO_DECENTRALIZED_HPP

#include <vector>

#include "cfmimo/allocators.hpp"
#include "cfmimo/side_information.hpp"

namespace cfmimo {

/// Every RRH independently maximizes the generalized objective built from its
/// own side-information summary, starting from `init`.
RateAllocation decentralized_solve(const EigenChannels& eigen, const std::vector<double>& budgets,
                                   const std::vector<SideInfoSummary>& summaries, const PgdSettings& settings,
                                   const RateAllocation& init, double quantizer_gap = 1.0);

/// Simultaneous rounds with exact side information: round k rebuilds every B_r
/// from the allocations of round k-1. Round one starts from `init`.
RateAllocation decentralized_exact(const EigenChannels& eigen, const std::vector<double>& budgets,
                                   const PgdSettings& settings, const RateAllocation& init, int rounds = 2,
                                   double quantizer_gap = 1.0);

/// Round-robin over RRHs: rebuild exact B_r, solve the generalized problem, and
/// keep the update only if the conditional rate does not drop. `history`, when
/// given, receives the global rate after initialization and after every sweep.
RateAllocation coordinate_descent(const EigenChannels& eigen, const std::vector<double>& budgets, int sweeps,
                                  const PgdSettings& settings, const RateAllocation& init,
                                  std::vector<double>* history = nullptr);

} // namespace cfmimo

#endif
