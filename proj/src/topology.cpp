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

#include "cfmimo/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cfmimo/random.hpp"

namespace cfmimo {

namespace {

constexpr double kSqrt3 = std::numbers::sqrt3;

Point2 polar(double radius, double degrees)
{
    const double a = degrees * std::numbers::pi / 180.0;
    return {radius * std::cos(a), radius * std::sin(a)};
}

Point2 uniform_in_hexagon(const Point2& center, double radius, Rng& rng)
{
    std::uniform_real_distribution<double> ux(-radius, radius);
    std::uniform_real_distribution<double> uy(-0.5 * kSqrt3 * radius, 0.5 * kSqrt3 * radius);
    // Acceptance ratio of the hexagon in its bounding box is 3/4.
    for (int attempt = 0; attempt < kMaxPlacementAttempts; ++attempt) {
        const Point2 p = center + Point2(ux(rng), uy(rng));
        if (in_hexagon(p, center, radius))
            return p;
    }
    throw DegenerateGeometry("uniform_in_hexagon: rejection sampling did not terminate");
}

// Super-lattice translations tried when searching for the nearest image:
// identity, the six wrap vectors and the six sums of adjacent wrap vectors.
std::vector<Point2> image_offsets(const Topology& t)
{
    std::vector<Point2> out;
    out.reserve(13);
    out.emplace_back(Point2::Zero());
    for (int k = 0; k < 6; ++k)
        out.push_back(t.wrap_vectors[k]);
    for (int k = 0; k < 6; ++k)
        out.push_back(t.wrap_vectors[k] + t.wrap_vectors[(k + 1) % 6]);
    return out;
}

void check_params(const TopologyParams& params)
{
    if (!(params.cell_radius > 0.0))
        throw InvalidParameter("build_topology: cell_radius must be positive");
    if (params.rrh_per_cell < 1 || params.users_per_cell < 1)
        throw InvalidParameter("build_topology: rrh_per_cell and users_per_cell must be >= 1");
    if (!(params.exclusion_radius >= 0.0) || params.exclusion_radius >= params.cell_radius)
        throw InvalidParameter("build_topology: exclusion_radius must lie in [0, cell_radius)");
    // Area argument: once the exclusion disks of a cell's RRHs add up to the cell
    // area, rejection sampling is not a meaningful uniform placement any more.
    const double cell_area = 1.5 * kSqrt3 * params.cell_radius * params.cell_radius;
    const double excluded = params.rrh_per_cell * std::numbers::pi * params.exclusion_radius * params.exclusion_radius;
    if (excluded >= cell_area)
        throw DegenerateGeometry("build_topology: exclusion disks (" + std::to_string(excluded) +
                                 " m^2 per cell) cover the cell area (" + std::to_string(cell_area) + " m^2)");
}

} // namespace

Topology Topology::cluster(double cell_radius)
{
    if (!(cell_radius > 0.0))
        throw InvalidParameter("Topology::cluster: cell_radius must be positive");
    Topology t;
    t.cell_radius = cell_radius;
    const double spacing = kSqrt3 * cell_radius;
    t.cell_centers[0] = Point2::Zero();
    for (int k = 0; k < 6; ++k)
        t.cell_centers[k + 1] = polar(spacing, 30.0 + 60.0 * k);
    // 7-cell reuse cluster: shift by two neighbour steps plus one step rotated by 60 degrees.
    const Point2 base = 2.0 * polar(spacing, 30.0) + polar(spacing, 90.0);
    for (int k = 0; k < 6; ++k)
        t.wrap_vectors[k] = Eigen::Rotation2Dd(k * std::numbers::pi / 3.0) * base;
    return t;
}

bool in_hexagon(const Point2& p, const Point2& center, double radius)
{
    const double x = std::abs(p.x() - center.x());
    const double y = std::abs(p.y() - center.y());
    const double eps = 1e-12 * radius;
    return y <= 0.5 * kSqrt3 * radius + eps && kSqrt3 * x + y <= kSqrt3 * radius + eps;
}

int cell_of(const Point2& p, const Topology& topology)
{
    for (int c = 0; c < kClusterCells; ++c)
        if (in_hexagon(p, topology.cell_centers[c], topology.cell_radius))
            return c;
    return -1;
}

bool in_support(const Point2& p, const Topology& topology) { return cell_of(p, topology) >= 0; }

double support_area(const Topology& topology)
{
    return kClusterCells * 1.5 * kSqrt3 * topology.cell_radius * topology.cell_radius;
}

std::pair<Point2, Point2> support_bounds(const Topology& topology)
{
    Point2 lo = Point2::Constant(std::numeric_limits<double>::infinity());
    Point2 hi = -lo;
    for (const auto& c : topology.cell_centers) {
        for (int k = 0; k < 6; ++k) {
            const Point2 v = c + polar(topology.cell_radius, 60.0 * k);
            lo = lo.cwiseMin(v);
            hi = hi.cwiseMax(v);
        }
    }
    return {lo, hi};
}

Point2 wrap_into_support(const Point2& p, const Topology& topology)
{
    Point2 q = p;
    for (int iter = 0; iter < 1000 && !in_support(q, topology); ++iter) {
        // Move towards the origin by the lattice vector that brings q closest.
        Point2 best = q;
        double best_norm = q.norm();
        for (const auto& w : topology.wrap_vectors) {
            const Point2 cand = q - w;
            if (cand.norm() < best_norm) {
                best = cand;
                best_norm = cand.norm();
            }
        }
        if (best_norm == q.norm()) {
            // Within one lattice step but on no cell: resolve by nearest image.
            for (const auto& w : topology.wrap_vectors) {
                if (in_support(q - w, topology))
                    return q - w;
            }
            break;
        }
        q = best;
    }
    return q;
}

double wrap_distance(const Point2& a, const Point2& b, const Topology& topology)
{
    const Point2 d = wrap_into_support(a, topology) - wrap_into_support(b, topology);
    double best = std::numeric_limits<double>::infinity();
    // Trying +off and -off keeps the result bitwise symmetric in (a, b).
    for (const auto& off : image_offsets(topology))
        best = std::min({best, (d - off).norm(), (d + off).norm()});
    return best;
}

Topology build_topology(const TopologyParams& params, std::uint64_t seed)
{
    check_params(params);
    Topology t = Topology::cluster(params.cell_radius);
    t.exclusion_radius = params.exclusion_radius;
    t.seed = seed;

    Rng rng(derive_seed(seed, 0));
    for (int c = 0; c < kClusterCells; ++c) {
        for (int k = 0; k < params.rrh_per_cell; ++k) {
            t.rrh_positions.push_back(uniform_in_hexagon(t.cell_centers[c], t.cell_radius, rng));
            t.rrh_cell.push_back(c);
        }
    }
    place_users(t, params.users_per_cell, derive_seed(seed, 1));
    return t;
}

void place_users(Topology& t, int users_per_cell, std::uint64_t seed)
{
    if (users_per_cell < 1)
        throw InvalidParameter("place_users: users_per_cell must be >= 1");
    t.user_positions.clear();
    t.user_cell.clear();
    Rng rng(seed);
    for (int c = 0; c < kClusterCells; ++c) {
        for (int k = 0; k < users_per_cell; ++k) {
            bool placed = false;
            for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
                const Point2 p = uniform_in_hexagon(t.cell_centers[c], t.cell_radius, rng);
                placed = std::all_of(t.rrh_positions.begin(), t.rrh_positions.end(), [&](const Point2& r) {
                    return wrap_distance(p, r, t) >= t.exclusion_radius;
                });
                if (placed) {
                    t.user_positions.push_back(p);
                    t.user_cell.push_back(c);
                }
            }
            if (!placed)
                throw DegenerateGeometry("place_users: no position in cell " + std::to_string(c) +
                                         " clears the exclusion radius after " +
                                         std::to_string(kMaxPlacementAttempts) + " attempts");
        }
    }
}

void TrafficPdf::validate() const
{
    double total = uniform_weight;
    if (!(uniform_weight >= 0.0 && uniform_weight <= 1.0))
        throw InvalidParameter("TrafficPdf: uniform_weight must lie in [0, 1]");
    for (const auto& h : hotspots) {
        if (!(h.weight >= 0.0 && h.weight <= 1.0))
            throw InvalidParameter("TrafficPdf: hotspot weight must lie in [0, 1]");
        Eigen::LLT<Eigen::Matrix2d> llt(h.covariance);
        if (llt.info() != Eigen::Success || !h.covariance.isApprox(h.covariance.transpose()))
            throw InvalidParameter("TrafficPdf: hotspot covariance must be symmetric positive-definite");
        total += h.weight;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw InvalidParameter("TrafficPdf: weights must sum to 1");
}

double TrafficPdf::density(const Point2& p, const Topology& topology) const
{
    if (!in_support(p, topology))
        return 0.0;
    double value = uniform_weight / support_area(topology);
    for (const auto& h : hotspots) {
        if (h.weight == 0.0)
            continue;
        const Eigen::Matrix2d inv = h.covariance.inverse();
        const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(h.covariance.determinant()));
        const Point2 c = wrap_into_support(h.center, topology);
        // The offsets are closed under negation, so each image appears once.
        for (const auto& off : image_offsets(topology)) {
            const Point2 d = p - c - off;
            value += h.weight * norm * std::exp(-0.5 * d.dot(inv * d));
        }
    }
    return value;
}

std::vector<Point2> sample_traffic(const TrafficPdf& pdf, std::size_t n, const Topology& topology,
                                   std::uint64_t seed)
{
    pdf.validate();
    std::vector<Point2> out;
    out.reserve(n);
    Rng rng(seed);

    std::vector<double> weights{pdf.uniform_weight};
    std::vector<Eigen::Matrix2d> factors;
    for (const auto& h : pdf.hotspots) {
        weights.push_back(h.weight);
        factors.push_back(Eigen::LLT<Eigen::Matrix2d>(h.covariance).matrixL());
    }
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    std::normal_distribution<double> gauss;
    const auto [lo, hi] = support_bounds(topology);
    std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y());

    while (out.size() < n) {
        const std::size_t k = pick(rng);
        if (k == 0) {
            Point2 p(ux(rng), uy(rng));
            while (!in_support(p, topology))
                p = Point2(ux(rng), uy(rng));
            out.push_back(p);
        } else {
            const Point2 z(gauss(rng), gauss(rng));
            out.push_back(wrap_into_support(pdf.hotspots[k - 1].center + factors[k - 1] * z, topology));
        }
    }
    return out;
}

namespace {

nlohmann::json points_to_json(const std::vector<Point2>& pts)
{
    auto arr = nlohmann::json::array();
    for (const auto& p : pts)
        arr.push_back({p.x(), p.y()});
    return arr;
}

std::vector<Point2> points_from_json(const nlohmann::json& arr)
{
    std::vector<Point2> out;
    for (const auto& p : arr)
        out.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    return out;
}

} // namespace

void to_json(nlohmann::json& j, const Topology& t)
{
    j = nlohmann::json{
        {"units", "meters"},
        {"seed", t.seed},
        {"cell_radius", t.cell_radius},
        {"exclusion_radius", t.exclusion_radius},
        {"cell_centers", points_to_json({t.cell_centers.begin(), t.cell_centers.end()})},
        {"wrap_vectors", points_to_json({t.wrap_vectors.begin(), t.wrap_vectors.end()})},
        {"rrh_positions", points_to_json(t.rrh_positions)},
        {"rrh_cell", t.rrh_cell},
        {"user_positions", points_to_json(t.user_positions)},
        {"user_cell", t.user_cell},
    };
}

void from_json(const nlohmann::json& j, Topology& t)
{
    t = Topology::cluster(j.at("cell_radius").get<double>());
    t.exclusion_radius = j.at("exclusion_radius").get<double>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.rrh_positions = points_from_json(j.at("rrh_positions"));
    t.user_positions = points_from_json(j.at("user_positions"));
    t.rrh_cell = j.at("rrh_cell").get<std::vector<int>>();
    t.user_cell = j.at("user_cell").get<std::vector<int>>();
    if (t.rrh_cell.size() != t.rrh_positions.size() || t.user_cell.size() != t.user_positions.size())
        throw InvalidParameter("Topology JSON: cell index arrays do not match position arrays");
}

} // namespace cfmimo
