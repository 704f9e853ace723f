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

#ifndef CFMIMO_SIDE_INFORMATION_HPP
#define CFMIMO_SIDE_INFORMATION_HPP

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "cfmimo/channel.hpp"
#include "cfmimo/info_rates.hpp"
#include "cfmimo/topology.hpp"

namespace cfmimo {

enum class SideInfoKind { Exact, WfHeuristic, StatisticalCsi, Traffic };

std::string to_string(SideInfoKind kind);
SideInfoKind side_info_kind_from_string(const std::string& name);

/// What the CPU would ship to one RRH to summarize the other RRHs' contribution.
///
/// Payload is a full Hermitian |U| x |U| matrix (exact and WF heuristic), the
/// diagonal of a diagonal matrix (statistical CSI) or one scalar multiplying
/// the identity (traffic distribution).
struct SideInfoSummary {
    SideInfoKind kind = SideInfoKind::Exact;
    std::variant<CMat, Vec, double> payload;
    std::size_t overhead_count = 0; // real scalars crossing the fronthaul

    Eigen::Index users() const;
    /// Dense |U| x |U| form of the payload.
    CMat dense(Eigen::Index users) const;
    bool positive_definite() const;
};

void to_json(nlohmann::json& j, const SideInfoSummary& summary);
void from_json(const nlohmann::json& j, SideInfoSummary& summary);

/// B_r = I + sum_{r' != r} p G_r'^H P_r' G_r' with the others' actual allocations.
SideInfoSummary side_info_exact(const EigenChannels& eigen, const RateAllocation& allocs, std::size_t rrh);

/// Same matrix with every other RRH assumed to run local waterfilling.
SideInfoSummary side_info_wf_heuristic(const EigenChannels& eigen, const std::vector<double>& budgets,
                                       std::size_t rrh);

/// Large-scale-statistics approximation from linear gains psi * beta (|R| x |U|).
/// Others' rates are assumed split equally over their M dimensions.
SideInfoSummary side_info_statistical(const Mat& large_scale_gain, const std::vector<double>& budgets,
                                      std::size_t rrh, const ChannelParams& params);

SideInfoSummary side_info_statistical(const Topology& topology, const Mat& shadowing_db,
                                      const std::vector<double>& budgets, std::size_t rrh,
                                      const ChannelParams& params);

struct QuadratureSpec {
    int grid = 512;              // midpoint points per axis over the support bounding box
    double mass_tolerance = 0.02; // allowed |integral of pdf - 1| before reporting failure
};

/// Per-RRH traffic gain p * integral of pdf(x, y) beta(d_excl + d(x, y)) over the support.
Vec traffic_gains(const Topology& topology, const TrafficPdf& pdf, const ChannelParams& params,
                  const QuadratureSpec& quad = {});

/// Scalar b_r from precomputed per-RRH traffic gains.
SideInfoSummary side_info_traffic(const Vec& gains, const std::vector<double>& budgets, std::size_t rrh,
                                  const ChannelParams& params, std::size_t user_count);

SideInfoSummary side_info_traffic(const Topology& topology, const TrafficPdf& pdf, const std::vector<double>& budgets,
                                  std::size_t rrh, const ChannelParams& params, std::size_t user_count,
                                  const QuadratureSpec& quad = {});

/// Lambda^(i) = descending eigenvalues of p H_r B^-1 H_r^H; Lambda^(c) = Lambda_r,
/// or Gamma Lambda_r + (Gamma - 1) sigma^2 for a non-Gaussian quantizer.
GeneralizedEigenvalues effective_eigenvalues(const EigenChannels& eigen, const SideInfoSummary& summary,
                                             std::size_t rrh, double quantizer_gap = 1.0);

} // namespace cfmimo

#endif
