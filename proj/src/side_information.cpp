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

#include "cfmimo/side_information.hpp"

#include <cmath>

#include "cfmimo/allocators.hpp"

namespace cfmimo {

std::string to_string(SideInfoKind kind)
{
    switch (kind) {
    case SideInfoKind::Exact: return "exact";
    case SideInfoKind::WfHeuristic: return "wf-heuristic";
    case SideInfoKind::StatisticalCsi: return "statistical-csi";
    case SideInfoKind::Traffic: return "traffic";
    }
    return "unknown";
}

SideInfoKind side_info_kind_from_string(const std::string& name)
{
    for (auto k : {SideInfoKind::Exact, SideInfoKind::WfHeuristic, SideInfoKind::StatisticalCsi, SideInfoKind::Traffic})
        if (to_string(k) == name)
            return k;
    throw InvalidParameter("unknown side-information kind '" + name + "'");
}

Eigen::Index SideInfoSummary::users() const
{
    if (const auto* m = std::get_if<CMat>(&payload))
        return m->rows();
    if (const auto* d = std::get_if<Vec>(&payload))
        return d->size();
    return 0;
}

CMat SideInfoSummary::dense(Eigen::Index users) const
{
    if (const auto* m = std::get_if<CMat>(&payload))
        return *m;
    if (const auto* d = std::get_if<Vec>(&payload))
        return d->cast<std::complex<double>>().asDiagonal();
    return std::get<double>(payload) * CMat::Identity(users, users);
}

bool SideInfoSummary::positive_definite() const
{
    if (const auto* m = std::get_if<CMat>(&payload)) {
        Eigen::LLT<CMat> llt(*m);
        return llt.info() == Eigen::Success && m->isApprox(m->adjoint());
    }
    if (const auto* d = std::get_if<Vec>(&payload))
        return d->allFinite() && (d->array() > 0.0).all();
    const double b = std::get<double>(payload);
    return std::isfinite(b) && b > 0.0;
}

void to_json(nlohmann::json& j, const SideInfoSummary& s)
{
    j = nlohmann::json{{"kind", to_string(s.kind)}, {"overhead_count", s.overhead_count}};
    if (const auto* m = std::get_if<CMat>(&s.payload)) {
        auto rows = nlohmann::json::array();
        for (Eigen::Index i = 0; i < m->rows(); ++i) {
            auto row = nlohmann::json::array();
            for (Eigen::Index k = 0; k < m->cols(); ++k)
                row.push_back({(*m)(i, k).real(), (*m)(i, k).imag()});
            rows.push_back(std::move(row));
        }
        j["matrix"] = std::move(rows);
    } else if (const auto* d = std::get_if<Vec>(&s.payload)) {
        j["diagonal"] = std::vector<double>(d->begin(), d->end());
    } else {
        j["scalar"] = std::get<double>(s.payload);
    }
}

void from_json(const nlohmann::json& j, SideInfoSummary& s)
{
    s.kind = side_info_kind_from_string(j.at("kind").get<std::string>());
    s.overhead_count = j.at("overhead_count").get<std::size_t>();
    if (j.contains("matrix")) {
        const auto& rows = j.at("matrix");
        const auto n = static_cast<Eigen::Index>(rows.size());
        CMat m(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index k = 0; k < n; ++k)
                m(i, k) = {rows[i][k][0].get<double>(), rows[i][k][1].get<double>()};
        s.payload = std::move(m);
    } else if (j.contains("diagonal")) {
        const auto v = j.at("diagonal").get<std::vector<double>>();
        s.payload = Vec(Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())));
    } else {
        s.payload = j.at("scalar").get<double>();
    }
}

namespace {

SideInfoSummary matrix_summary(SideInfoKind kind, CMat b)
{
    const auto U = static_cast<std::size_t>(b.rows());
    SideInfoSummary s;
    s.kind = kind;
    s.payload = std::move(b);
    s.overhead_count = 2 * U * U;
    return s;
}

// Diagonal entry of the equal-split penalty, one value shared by all M dimensions.
double equal_split_penalty(double budget, int antennas, double noise, double total_gain)
{
    const double t = rate_decay(budget / antennas);
    return (1.0 - t) / (noise + total_gain * t);
}

} // namespace

SideInfoSummary side_info_exact(const EigenChannels& eigen, const RateAllocation& allocs, std::size_t rrh)
{
    if (rrh >= eigen.num_rrhs() || allocs.num_rrhs() != eigen.num_rrhs())
        throw InvalidParameter("side_info_exact: RRH index or allocation size out of range");
    return matrix_summary(SideInfoKind::Exact, global_information_matrix(eigen, allocs, rrh));
}

SideInfoSummary side_info_wf_heuristic(const EigenChannels& eigen, const std::vector<double>& budgets,
                                       std::size_t rrh)
{
    if (rrh >= eigen.num_rrhs() || budgets.size() != eigen.num_rrhs())
        throw InvalidParameter("side_info_wf_heuristic: RRH index or budget size out of range");
    const RateAllocation guess = waterfill_all(eigen, budgets);
    return matrix_summary(SideInfoKind::WfHeuristic, global_information_matrix(eigen, guess, rrh));
}

SideInfoSummary side_info_statistical(const Mat& gain, const std::vector<double>& budgets, std::size_t rrh,
                                      const ChannelParams& params)
{
    const auto R = static_cast<std::size_t>(gain.rows());
    if (rrh >= R || budgets.size() != R)
        throw InvalidParameter("side_info_statistical: RRH index or budget size out of range");
    const double p = params.tx_power_mw;
    const int M = params.antennas_per_rrh;
    Vec diag = Vec::Ones(gain.cols());
    for (std::size_t other = 0; other < R; ++other) {
        if (other == rrh)
            continue;
        const auto row = gain.row(static_cast<Eigen::Index>(other));
        // Psi_r' = p sum_u psi beta I_M, scalar per dimension.
        const double total = p * row.sum();
        const double penalty = equal_split_penalty(budgets[other], M, params.noise_power_mw, total);
        // tr(Psi_r'u P_r') = M p psi beta penalty.
        diag += (M * p * penalty) * row.transpose();
    }
    SideInfoSummary s;
    s.kind = SideInfoKind::StatisticalCsi;
    s.overhead_count = static_cast<std::size_t>(diag.size());
    s.payload = std::move(diag);
    return s;
}

SideInfoSummary side_info_statistical(const Topology& topology, const Mat& shadowing_db,
                                      const std::vector<double>& budgets, std::size_t rrh,
                                      const ChannelParams& params)
{
    return side_info_statistical(large_scale_gains(topology, shadowing_db), budgets, rrh, params);
}

Vec traffic_gains(const Topology& topology, const TrafficPdf& pdf, const ChannelParams& params,
                  const QuadratureSpec& quad)
{
    pdf.validate();
    if (quad.grid < 2)
        throw InvalidParameter("traffic_gains: quadrature grid must have at least 2 points per axis");
    const auto [lo, hi] = support_bounds(topology);
    const double dx = (hi.x() - lo.x()) / quad.grid;
    const double dy = (hi.y() - lo.y()) / quad.grid;
    const auto R = static_cast<Eigen::Index>(topology.num_rrhs());

    Vec weighted = Vec::Zero(R);
    double mass = 0.0;
    for (int ix = 0; ix < quad.grid; ++ix) {
        for (int iy = 0; iy < quad.grid; ++iy) {
            const Point2 pt(lo.x() + (ix + 0.5) * dx, lo.y() + (iy + 0.5) * dy);
            const double w = pdf.density(pt, topology) * dx * dy;
            if (w == 0.0)
                continue;
            mass += w;
            for (Eigen::Index r = 0; r < R; ++r) {
                const double d_km =
                    (topology.exclusion_radius + wrap_distance(pt, topology.rrh_positions[r], topology)) / 1000.0;
                weighted(r) += w * db_to_linear(pathloss_db(d_km));
            }
        }
    }
    if (!(std::abs(mass - 1.0) <= quad.mass_tolerance))
        throw NumericalError("traffic_gains: quadrature mass " + std::to_string(mass) + " on a " +
                             std::to_string(quad.grid) + "x" + std::to_string(quad.grid) +
                             " grid is outside tolerance " + std::to_string(quad.mass_tolerance));
    // Normalize by the discrete mass so the result is a pdf-weighted average.
    return params.tx_power_mw * weighted / mass;
}

SideInfoSummary side_info_traffic(const Vec& gains, const std::vector<double>& budgets, std::size_t rrh,
                                  const ChannelParams& params, std::size_t user_count)
{
    const auto R = static_cast<std::size_t>(gains.size());
    if (rrh >= R || budgets.size() != R)
        throw InvalidParameter("side_info_traffic: RRH index or budget size out of range");
    const int M = params.antennas_per_rrh;
    double b = 1.0;
    for (std::size_t other = 0; other < R; ++other) {
        if (other == rrh)
            continue;
        const double per_user = gains(static_cast<Eigen::Index>(other));
        const double total = static_cast<double>(user_count) * per_user;
        b += M * per_user * equal_split_penalty(budgets[other], M, params.noise_power_mw, total);
    }
    SideInfoSummary s;
    s.kind = SideInfoKind::Traffic;
    s.payload = b;
    s.overhead_count = 1;
    return s;
}

SideInfoSummary side_info_traffic(const Topology& topology, const TrafficPdf& pdf, const std::vector<double>& budgets,
                                  std::size_t rrh, const ChannelParams& params, std::size_t user_count,
                                  const QuadratureSpec& quad)
{
    return side_info_traffic(traffic_gains(topology, pdf, params, quad), budgets, rrh, params, user_count);
}

GeneralizedEigenvalues effective_eigenvalues(const EigenChannels& eigen, const SideInfoSummary& summary,
                                             std::size_t rrh, double quantizer_gap)
{
    if (!summary.positive_definite())
        throw InvalidParameter("effective_eigenvalues: side information is not positive-definite");
    if (!(quantizer_gap >= 1.0))
        throw InvalidParameter("effective_eigenvalues: quantizer gap must be >= 1");
    const auto& ec = eigen.rrh.at(rrh);
    GeneralizedEigenvalues gev;
    gev.compression = quantizer_gap * ec.eigenvalues.array() + (quantizer_gap - 1.0) * ec.noise_power;

    if (const double* b = std::get_if<double>(&summary.payload)) {
        gev.information = ec.eigenvalues / *b;
        return gev;
    }
    CMat k;
    if (const auto* d = std::get_if<Vec>(&summary.payload)) {
        if (d->size() != eigen.num_users())
            throw InvalidParameter("effective_eigenvalues: diagonal side information has wrong size");
        k = eigen.tx_power * ec.channel * d->cwiseInverse().cast<std::complex<double>>().asDiagonal() *
            ec.channel.adjoint();
    } else {
        const auto& b = std::get<CMat>(summary.payload);
        if (b.rows() != eigen.num_users())
            throw InvalidParameter("effective_eigenvalues: side-information matrix has wrong size");
        Eigen::LLT<CMat> llt(b);
        k = eigen.tx_power * ec.channel * llt.solve(CMat(ec.channel.adjoint()));
    }
    k = 0.5 * (k + k.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMat> evd(k, Eigen::EigenvaluesOnly);
    if (evd.info() != Eigen::Success)
        throw NumericalError("effective_eigenvalues: EVD did not converge");
    gev.information = evd.eigenvalues().reverse().cwiseMax(0.0);
    return gev;
}

} // namespace cfmimo
