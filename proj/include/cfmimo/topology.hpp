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

#ifndef CFMIMO_TOPOLOGY_HPP
#define CFMIMO_TOPOLOGY_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "cfmimo/types.hpp"

namespace cfmimo {

inline constexpr int kClusterCells = 7;

/// Seven flat-top hexagonal cells (center plus six neighbours) tiled periodically
/// over the plane. `cell_radius` is the center-to-vertex distance in meters.
struct Topology {
    double cell_radius = 400.0;
    double exclusion_radius = 20.0;
    std::array<Point2, kClusterCells> cell_centers;
    std::array<Point2, 6> wrap_vectors;
    std::vector<Point2> rrh_positions;
    std::vector<Point2> user_positions;
    std::vector<int> rrh_cell;   // cell index of each RRH
    std::vector<int> user_cell;  // cell index of each user
    std::uint64_t seed = 0;

    std::size_t num_rrhs() const { return rrh_positions.size(); }
    std::size_t num_users() const { return user_positions.size(); }

    /// Empty cluster geometry (centers and super-lattice), no nodes placed.
    static Topology cluster(double cell_radius);
};

struct TopologyParams {
    double cell_radius = 400.0;
    int rrh_per_cell = 3;
    int users_per_cell = 10;
    double exclusion_radius = 20.0;
};

inline constexpr int kMaxPlacementAttempts = 10000;

/// Places RRHs and users uniformly per cell; users closer than the exclusion
/// radius (wrap-around distance) to any RRH are redrawn.
Topology build_topology(const TopologyParams& params, std::uint64_t seed);

/// Redraws only the users of an existing topology, keeping its RRHs.
void place_users(Topology& topology, int users_per_cell, std::uint64_t seed);

bool in_hexagon(const Point2& p, const Point2& center, double radius);
bool in_support(const Point2& p, const Topology& topology);
/// Index of the cluster cell containing p, or -1 outside the support.
int cell_of(const Point2& p, const Topology& topology);
double support_area(const Topology& topology);

/// Shifts p by super-lattice vectors until it lies inside the 7-cell support.
Point2 wrap_into_support(const Point2& p, const Topology& topology);

/// Minimum Euclidean distance between a and b over super-lattice translations.
double wrap_distance(const Point2& a, const Point2& b, const Topology& topology);

/// Axis-aligned bounding box of the support: (min corner, max corner).
std::pair<Point2, Point2> support_bounds(const Topology& topology);

struct Hotspot {
    Point2 center = Point2::Zero();
    Eigen::Matrix2d covariance = Eigen::Matrix2d::Identity();
    double weight = 0.0;
};

/// Mixture of a uniform density over the support and Gaussian hotspots,
/// wrapped periodically onto the support.
struct TrafficPdf {
    double uniform_weight = 1.0;
    std::vector<Hotspot> hotspots;

    static TrafficPdf uniform() { return {}; }

    /// Throws InvalidParameter when the weights are invalid.
    void validate() const;
    double density(const Point2& p, const Topology& topology) const;
};

std::vector<Point2> sample_traffic(const TrafficPdf& pdf, std::size_t n, const Topology& topology,
                                   std::uint64_t seed);

void to_json(nlohmann::json& j, const Topology& topology);
void from_json(const nlohmann::json& j, Topology& topology);

} // namespace cfmimo

#endif
