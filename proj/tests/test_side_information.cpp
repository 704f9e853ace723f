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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cfmimo/allocators.hpp"
#include "cfmimo/channel.hpp"
#include "cfmimo/oracles.hpp"
#include "cfmimo/random.hpp"
#include "cfmimo/side_information.hpp"

using namespace cfmimo;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

EigenChannels random_network(int rrhs, int antennas, int users, Rng& rng, double scale = 1.0)
{
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    std::vector<CMat> hs;
    for (int r = 0; r < rrhs; ++r) {
        CMat h(antennas, users);
        for (Eigen::Index i = 0; i < h.rows(); ++i)
            for (Eigen::Index j = 0; j < h.cols(); ++j)
                h(i, j) = scale * std::complex<double>(g(rng), g(rng));
        hs.push_back(h);
    }
    ChannelParams p;
    p.tx_power_mw = 1.0;
    return eigen_decompose(make_realization(hs, 1.0), p);
}

RateAllocation random_allocation(const EigenChannels& eigen, Rng& rng)
{
    std::uniform_real_distribution<double> u(0.1, 4.0);
    RateAllocation a;
    for (std::size_t r = 0; r < eigen.num_rrhs(); ++r) {
        Vec v(eigen.antennas());
        for (auto& x : v)
            x = u(rng);
        a.rrh.push_back({v, v.sum()});
    }
    return a;
}

double max_abs(const CMat& a) { return a.cwiseAbs().maxCoeff(); }

// Statistical-CSI diagonal written directly from the scaled-identity forms.
Vec statistical_reference(const Mat& gain, const std::vector<double>& budgets, std::size_t rrh, double p, int M,
                          double noise)
{
    Vec d = Vec::Ones(gain.cols());
    for (Eigen::Index o = 0; o < gain.rows(); ++o) {
        if (static_cast<std::size_t>(o) == rrh)
            continue;
        const double t = std::pow(2.0, -budgets[o] / M);
        const double psi_total = p * gain.row(o).sum();
        const double penalty = (1.0 - t) / (noise + psi_total * t);
        for (Eigen::Index u = 0; u < gain.cols(); ++u)
            d(u) += M * (p * gain(o, u)) * penalty;
    }
    return d;
}

} // namespace

TEST_CASE("kind names round trip")
{
    for (auto k : {SideInfoKind::Exact, SideInfoKind::WfHeuristic, SideInfoKind::StatisticalCsi, SideInfoKind::Traffic})
        CHECK(side_info_kind_from_string(to_string(k)) == k);
    CHECK_THROWS_AS(side_info_kind_from_string("oracle"), InvalidParameter);
}

TEST_CASE("exact side information reduces to the identity")
{
    Rng rng(1);
    const EigenChannels one = random_network(1, 3, 4, rng);
    const auto s1 = side_info_exact(one, random_allocation(one, rng), 0);
    CHECK(std::get<CMat>(s1.payload) == CMat::Identity(4, 4));

    const EigenChannels net = random_network(3, 3, 4, rng);
    const auto zeros = zero_allocation(net, std::vector<double>(3, 0.0));
    CHECK(std::get<CMat>(side_info_exact(net, zeros, 1).payload) == CMat::Identity(4, 4));
}

TEST_CASE("exact side information satisfies the chain rule")
{
    Rng rng(2);
    for (int i = 0; i < 20; ++i) {
        const EigenChannels net = random_network(2, 3, 4, rng, 1.5);
        const RateAllocation alloc = random_allocation(net, rng);
        for (std::size_t r = 0; r < 2; ++r) {
            const auto s = side_info_exact(net, alloc, r);
            CHECK(s.kind == SideInfoKind::Exact);
            CHECK(s.positive_definite());
            const CMat& b = std::get<CMat>(s.payload);
            // log2|B_r| is the rate of the other RRH alone.
            EigenChannels other;
            other.tx_power = net.tx_power;
            other.rrh.push_back(net.rrh[1 - r]);
            RateAllocation other_alloc;
            other_alloc.rrh.push_back(alloc.rrh[1 - r]);
            const double lhs = conditional_rate(net, alloc, r, b) + global_rate(other, other_alloc);
            CHECK_THAT(lhs, WithinAbs(global_rate(net, alloc), 1e-8));
        }
    }
}

TEST_CASE("waterfill heuristic side information")
{
    Rng rng(3);
    const EigenChannels net = random_network(3, 2, 3, rng);
    const auto zero = side_info_wf_heuristic(net, {5.0, 0.0, 0.0}, 0);
    CHECK(std::get<CMat>(zero.payload) == CMat::Identity(3, 3));

    const auto huge = side_info_wf_heuristic(net, {1.0, 1e4, 1e4}, 0);
    CMat unc = CMat::Identity(3, 3);
    for (std::size_t r = 1; r < 3; ++r)
        unc += net.tx_power / net.rrh[r].noise_power * net.rrh[r].channel.adjoint() * net.rrh[r].channel;
    CHECK(max_abs(std::get<CMat>(huge.payload) - unc) <= 1e-9 * max_abs(unc));

    // When the other RRHs really do run waterfilling, the heuristic is exact.
    const std::vector<double> budgets{2.0, 3.0, 4.0};
    const RateAllocation wf = waterfill_all(net, budgets);
    for (std::size_t r = 0; r < 3; ++r) {
        const auto h = side_info_wf_heuristic(net, budgets, r);
        CHECK(h.kind == SideInfoKind::WfHeuristic);
        CHECK(std::get<CMat>(h.payload) == std::get<CMat>(side_info_exact(net, wf, r).payload));
    }
}

TEST_CASE("statistical side information")
{
    ChannelParams params;
    params.tx_power_mw = 2.0;
    params.noise_power_mw = 0.5;
    params.antennas_per_rrh = 4;

    Mat one(1, 3);
    one << 1.0, 2.0, 3.0;
    CHECK(std::get<Vec>(side_info_statistical(one, {4.0}, 0, params).payload) == Vec::Ones(3));

    Rng rng(4);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    Mat gain(3, 5);
    for (Eigen::Index i = 0; i < gain.size(); ++i)
        gain(i) = u(rng);
    CHECK(std::get<Vec>(side_info_statistical(gain, {3.0, 0.0, 0.0}, 0, params).payload) == Vec::Ones(5));

    const std::vector<double> budgets{3.0, 5.0, 7.0};
    for (std::size_t r = 0; r < 3; ++r) {
        const auto s = side_info_statistical(gain, budgets, r, params);
        CHECK(s.kind == SideInfoKind::StatisticalCsi);
        CHECK(s.overhead_count == 5);
        const Vec& d = std::get<Vec>(s.payload);
        const Vec ref = statistical_reference(gain, budgets, r, 2.0, 4, 0.5);
        CHECK((d - ref).cwiseAbs().maxCoeff() <= 1e-12 * ref.maxCoeff());
        CHECK((d.array() >= 1.0).all());
    }

    // Equal distances (and no shadowing) give identical entries.
    Mat sym = Mat::Constant(2, 4, 0.7);
    const Vec& d = std::get<Vec>(side_info_statistical(sym, {2.0, 2.0}, 0, params).payload);
    CHECK((d.array() == d(0)).all());
    CHECK(d(0) > 1.0);
}

TEST_CASE("statistical side information from a topology uses realized shadowing")
{
    const Topology t = build_topology({}, 3);
    const ChannelParams params;
    const auto real = draw_channels(t, params, 4);
    const std::vector<double> budgets(t.num_rrhs(), 10.0);
    const auto a = side_info_statistical(t, real.shadowing_db, budgets, 2, params);
    const auto b = side_info_statistical(real.large_scale_gain, budgets, 2, params);
    CHECK((std::get<Vec>(a.payload) - std::get<Vec>(b.payload)).cwiseAbs().maxCoeff() <=
          1e-12 * std::get<Vec>(b.payload).maxCoeff());
    CHECK(a.overhead_count == 70);
}

TEST_CASE("traffic side information scalar")
{
    ChannelParams params;
    params.antennas_per_rrh = 4;
    params.noise_power_mw = 1.0;
    params.tx_power_mw = 1.0;
    Vec gains(3);
    gains << 0.5, 0.2, 0.1;
    const std::size_t users = 6;
    CHECK(std::get<double>(side_info_traffic(gains, {1.0, 0.0, 0.0}, 0, params, users).payload) == 1.0);

    const std::vector<double> budgets{2.0, 4.0, 8.0};
    const auto s = side_info_traffic(gains, budgets, 0, params, users);
    CHECK(s.kind == SideInfoKind::Traffic);
    CHECK(s.overhead_count == 1);
    double ref = 1.0;
    for (int o = 1; o < 3; ++o) {
        const double t = std::pow(2.0, -budgets[o] / 4.0);
        ref += 4.0 * gains(o) * (1.0 - t) / (1.0 + users * gains(o) * t);
    }
    CHECK_THAT(std::get<double>(s.payload), WithinRel(ref, 1e-12));
}

TEST_CASE("traffic quadrature of a narrow hotspot")
{
    Topology t = Topology::cluster(400.0);
    t.exclusion_radius = 20.0;
    t.rrh_positions = {Point2(-100.0, 40.0)};
    t.rrh_cell = {0};
    const double sigma = 10.0;
    const Point2 center(100.0, 40.0); // 200 m from the RRH
    TrafficPdf pdf;
    pdf.uniform_weight = 0.0;
    pdf.hotspots.push_back({center, sigma * sigma * Eigen::Matrix2d::Identity(), 1.0});

    ChannelParams params;
    const Vec gains = traffic_gains(t, pdf, params, {2048, 0.02});
    const auto beta = [](double d_m) { return std::pow(10.0, (-112.4271 - 38.0 * std::log10(d_m / 1000.0)) / 10.0); };

    // Independent Gaussian average of p beta(d_excl + |x - x_r|) on a fine local grid.
    const int n = 400;
    const double h = 12.0 * sigma / n;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Point2 z(-6.0 * sigma + (i + 0.5) * h, -6.0 * sigma + (j + 0.5) * h);
            const double w = std::exp(-0.5 * z.squaredNorm() / (sigma * sigma));
            num += w * beta(20.0 + (center + z - t.rrh_positions[0]).norm());
            den += w;
        }
    }
    const double reference = params.tx_power_mw * num / den;
    CHECK_THAT(gains(0), WithinRel(reference, 5e-3));
    // Point-mass limit: p beta(d_excl + d).
    CHECK_THAT(gains(0), WithinRel(params.tx_power_mw * beta(220.0), 0.03));
}

TEST_CASE("traffic quadrature converges under grid refinement")
{
    const Topology t = build_topology({}, 8);
    const ChannelParams params;
    const std::vector<double> budgets(t.num_rrhs(), 20.0);
    const auto coarse = side_info_traffic(t, TrafficPdf::uniform(), budgets, 0, params, t.num_users(), {512, 0.02});
    const auto fine = side_info_traffic(t, TrafficPdf::uniform(), budgets, 0, params, t.num_users(), {1024, 0.02});
    const double a = std::get<double>(coarse.payload), b = std::get<double>(fine.payload);
    CHECK(std::abs(a - b) / b < 1e-3);
    CHECK(a > 1.0);
}

TEST_CASE("traffic quadrature reports mass that does not integrate")
{
    Topology t = Topology::cluster(400.0);
    t.rrh_positions = {Point2::Zero()};
    t.rrh_cell = {0};
    TrafficPdf pdf;
    pdf.uniform_weight = 0.0;
    pdf.hotspots.push_back({Point2(10.0, 0.0), 0.01 * Eigen::Matrix2d::Identity(), 1.0});
    // A 0.1 m hotspot on a 512 grid (about 4.7 m cells) cannot be resolved.
    CHECK_THROWS_AS(traffic_gains(t, pdf, ChannelParams{}, {512, 0.02}), NumericalError);
    CHECK_THROWS_AS(traffic_gains(t, TrafficPdf::uniform(), ChannelParams{}, {1, 0.02}), InvalidParameter);
}

TEST_CASE("effective eigenvalues")
{
    Rng rng(5);
    const EigenChannels net = random_network(2, 3, 4, rng, 2.0);
    const Vec& lambda = net.rrh[0].eigenvalues;

    SideInfoSummary identity;
    identity.payload = CMat(CMat::Identity(4, 4));
    CHECK((effective_eigenvalues(net, identity, 0).information - lambda).cwiseAbs().maxCoeff() <= 1e-9 * lambda(0));

    SideInfoSummary twice;
    twice.payload = CMat(2.0 * CMat::Identity(4, 4));
    CHECK((effective_eigenvalues(net, twice, 0).information - lambda / 2.0).cwiseAbs().maxCoeff() <= 1e-9 * lambda(0));

    SideInfoSummary scalar;
    scalar.payload = 2.5;
    const auto gs = effective_eigenvalues(net, scalar, 0);
    CHECK(gs.information == Vec(lambda / 2.5));
    CHECK(gs.compression == lambda);

    const auto gapped = effective_eigenvalues(net, scalar, 0, 1.5);
    CHECK((gapped.compression - Vec(1.5 * lambda.array() + 0.5 * net.rrh[0].noise_power)).cwiseAbs().maxCoeff() <=
          1e-12 * lambda(0));

    std::uniform_real_distribution<double> u(1.0, 5.0);
    for (int i = 0; i < 20; ++i) {
        Vec d(4);
        for (auto& x : d)
            x = u(rng);
        SideInfoSummary diag;
        diag.kind = SideInfoKind::StatisticalCsi;
        diag.payload = d;
        const Vec info = effective_eigenvalues(net, diag, 1).information;
        const CMat& h = net.rrh[1].channel;
        const CMat k = net.tx_power * h * d.cwiseInverse().cast<std::complex<double>>().asDiagonal() * h.adjoint();
        const Eigen::VectorXd ref = oracle::hermitian_eigenvalues_reference(k);
        CHECK((info - ref).cwiseAbs().maxCoeff() <= 1e-9 * ref(0));
        for (Eigen::Index m = 1; m < info.size(); ++m)
            CHECK(info(m) <= info(m - 1));
        // B >= I only shrinks the effective channel.
        CHECK(((info - net.rrh[1].eigenvalues).array() <= 1e-9 * ref(0)).all());
        CHECK((info.array() >= 0.0).all());
    }

    SideInfoSummary bad;
    bad.payload = -1.0;
    CHECK_THROWS_AS(effective_eigenvalues(net, bad, 0), InvalidParameter);
    bad.payload = CMat(-CMat::Identity(4, 4));
    CHECK_THROWS_AS(effective_eigenvalues(net, bad, 0), InvalidParameter);
    CHECK_THROWS_AS(effective_eigenvalues(net, scalar, 0, 0.5), InvalidParameter);
}

TEST_CASE("exact effective eigenvalues dominate nothing beyond the local channel")
{
    Rng rng(6);
    const EigenChannels net = random_network(3, 3, 5, rng, 2.0);
    const RateAllocation alloc = random_allocation(net, rng);
    for (std::size_t r = 0; r < 3; ++r) {
        const Vec info = effective_eigenvalues(net, side_info_exact(net, alloc, r), r).information;
        CHECK(((info - net.rrh[r].eigenvalues).array() <= 1e-9 * net.rrh[r].eigenvalues(0)).all());
    }
}

TEST_CASE("overhead accounting")
{
    const Topology t = build_topology({}, 21);
    const ChannelParams params;
    const auto real = draw_channels(t, params, 22);
    const auto eigen = eigen_decompose(real, params);
    const std::vector<double> budgets(t.num_rrhs(), 8.0);
    const std::size_t U = t.num_users();
    CHECK(side_info_exact(eigen, waterfill_all(eigen, budgets), 0).overhead_count == 2 * U * U);
    CHECK(side_info_wf_heuristic(eigen, budgets, 0).overhead_count == 2 * U * U);
    CHECK(side_info_statistical(real.large_scale_gain, budgets, 0, params).overhead_count == U);
    const Vec gains = Vec::Constant(static_cast<Eigen::Index>(t.num_rrhs()), 1e-9);
    CHECK(side_info_traffic(gains, budgets, 0, params, U).overhead_count == 1);
}

TEST_CASE("summary JSON round trip")
{
    Rng rng(7);
    const EigenChannels net = random_network(2, 2, 3, rng);
    const auto exact = side_info_exact(net, random_allocation(net, rng), 0);
    SideInfoSummary diag;
    diag.kind = SideInfoKind::StatisticalCsi;
    diag.payload = Vec(Vec::Constant(3, 1.25));
    diag.overhead_count = 3;
    SideInfoSummary scalar;
    scalar.kind = SideInfoKind::Traffic;
    scalar.payload = 1.75;
    scalar.overhead_count = 1;
    for (const auto& s : {exact, diag, scalar}) {
        const nlohmann::json j = s;
        const auto back = nlohmann::json::parse(j.dump()).get<SideInfoSummary>();
        CHECK(back.kind == s.kind);
        CHECK(back.overhead_count == s.overhead_count);
        CHECK(back.dense(3) == s.dense(3));
    }
}
