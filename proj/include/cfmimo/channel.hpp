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

#ifndef CFMIMO_CHANNEL_HPP
#define CFMIMO_CHANNEL_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

#include "cfmimo/topology.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

struct ChannelParams {
    double carrier_freq_mhz = 1800.0;
    double tx_power_mw = 200.0;
    double noise_power_mw = 6.309573444801929e-10; // -92 dBm
    double shadowing_sigma_db = 4.0;
    int antennas_per_rrh = 8;
    double quantizer_gap = 1.0;

    void validate() const;
};

double dbm_to_mw(double dbm);
double db_to_linear(double db);

/// COST231 Walfisch-Ikegami pathloss at 1800 MHz; distance in km.
double pathloss_db(double distance_km);

/// Per-RRH channel matrices in the physical (antenna) basis, M x |U| each.
struct ChannelRealization {
    std::vector<CMat> channels;
    Vec noise_power;
    Mat shadowing_db;     // |R| x |U|
    Mat large_scale_gain; // |R| x |U|, linear psi * beta

    std::size_t num_rrhs() const { return channels.size(); }
    Eigen::Index num_users() const { return channels.empty() ? 0 : channels.front().cols(); }
    Eigen::Index antennas() const { return channels.empty() ? 0 : channels.front().rows(); }
};

/// Shadowing in dB, one independent draw per (RRH, user) pair.
Mat draw_shadowing(std::size_t num_rrhs, std::size_t num_users, double sigma_db, std::uint64_t seed);

/// Linear psi * beta for every (RRH, user) pair, using wrap-around distances.
Mat large_scale_gains(const Topology& topology, const Mat& shadowing_db);

ChannelRealization draw_channels(const Topology& topology, const ChannelParams& params, std::uint64_t seed);

/// Builds a realization from explicit matrices (equal noise on every RRH).
ChannelRealization make_realization(std::vector<CMat> channels, double noise_power);

/// One RRH after the unitary eigen-transform of p H H^H.
template <typename Real>
struct EigenChannel {
    VectorX<Real> eigenvalues;  // descending, >= 0
    CMatrixX<Real> basis;       // U_r, columns are eigenvectors
    CMatrixX<Real> channel;     // U_r^H H_r, M x |U|
    Real noise_power{};

    VectorX<Real> snr() const { return eigenvalues / noise_power; }
};

template <typename Real>
struct EigenChannelsT {
    std::vector<EigenChannel<Real>> rrh;
    Real tx_power{};

    std::size_t num_rrhs() const { return rrh.size(); }
    Eigen::Index num_users() const { return rrh.empty() ? 0 : rrh.front().channel.cols(); }
    Eigen::Index antennas() const { return rrh.empty() ? 0 : rrh.front().channel.rows(); }
};

using EigenChannels = EigenChannelsT<double>;

inline constexpr double kEigenClampRelative = 1e-12;

EigenChannels eigen_decompose(const ChannelRealization& realization, const ChannelParams& params);

/// Binary layout (little-endian): "CFCH", uint32 version=1, uint32 |R|, M, |U|,
/// then per RRH one float64 noise power followed by M*|U| complex entries
/// in row-major order, each as interleaved float64 (real, imaginary).
void write_realization(const ChannelRealization& realization, const std::filesystem::path& path);
ChannelRealization read_realization(const std::filesystem::path& path);

} // namespace cfmimo

#endif
