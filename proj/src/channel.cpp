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

#include "cfmimo/channel.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "cfmimo/random.hpp"

namespace cfmimo {

void ChannelParams::validate() const
{
    if (!(tx_power_mw > 0.0))
        throw InvalidParameter("ChannelParams: tx_power must be positive");
    if (!(noise_power_mw > 0.0))
        throw InvalidParameter("ChannelParams: noise_power must be positive");
    if (!(quantizer_gap >= 1.0))
        throw InvalidParameter("ChannelParams: quantizer_gap must be >= 1");
    if (antennas_per_rrh < 1)
        throw InvalidParameter("ChannelParams: antennas_per_rrh must be >= 1");
    if (!(shadowing_sigma_db >= 0.0))
        throw InvalidParameter("ChannelParams: shadowing_sigma must be non-negative");
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double pathloss_db(double distance_km)
{
    if (!(distance_km > 0.0))
        throw InvalidParameter("pathloss_db: distance must be positive");
    return -112.4271 - 38.0 * std::log10(distance_km);
}

Mat draw_shadowing(std::size_t num_rrhs, std::size_t num_users, double sigma_db, std::uint64_t seed)
{
    Mat out = Mat::Zero(num_rrhs, num_users);
    if (sigma_db == 0.0)
        return out;
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma_db);
    for (Eigen::Index r = 0; r < out.rows(); ++r)
        for (Eigen::Index u = 0; u < out.cols(); ++u)
            out(r, u) = gauss(rng);
    return out;
}

Mat large_scale_gains(const Topology& topology, const Mat& shadowing_db)
{
    const auto R = static_cast<Eigen::Index>(topology.num_rrhs());
    const auto U = static_cast<Eigen::Index>(topology.num_users());
    Mat gain(R, U);
    for (Eigen::Index r = 0; r < R; ++r) {
        for (Eigen::Index u = 0; u < U; ++u) {
            const double d_km = wrap_distance(topology.rrh_positions[r], topology.user_positions[u], topology) / 1000.0;
            gain(r, u) = db_to_linear(pathloss_db(d_km) + shadowing_db(r, u));
        }
    }
    return gain;
}

ChannelRealization draw_channels(const Topology& topology, const ChannelParams& params, std::uint64_t seed)
{
    params.validate();
    const std::size_t R = topology.num_rrhs();
    const std::size_t U = topology.num_users();
    const int M = params.antennas_per_rrh;

    ChannelRealization out;
    out.shadowing_db = draw_shadowing(R, U, params.shadowing_sigma_db, derive_seed(seed, 0));
    out.large_scale_gain = large_scale_gains(topology, out.shadowing_db);
    out.noise_power = Vec::Constant(static_cast<Eigen::Index>(R), params.noise_power_mw);

    // Unit-variance circularly-symmetric entries: real and imaginary parts each N(0, 1/2).
    Rng rng(derive_seed(seed, 1));
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    out.channels.reserve(R);
    for (std::size_t r = 0; r < R; ++r) {
        CMat h(M, static_cast<Eigen::Index>(U));
        for (Eigen::Index u = 0; u < h.cols(); ++u) {
            const double amplitude = std::sqrt(out.large_scale_gain(static_cast<Eigen::Index>(r), u));
            for (Eigen::Index m = 0; m < M; ++m) {
                const double re = gauss(rng);
                const double im = gauss(rng);
                h(m, u) = amplitude * std::complex<double>(re, im);
            }
        }
        out.channels.push_back(std::move(h));
    }
    return out;
}

ChannelRealization make_realization(std::vector<CMat> channels, double noise_power)
{
    ChannelRealization out;
    const auto R = static_cast<Eigen::Index>(channels.size());
    const Eigen::Index U = channels.empty() ? 0 : channels.front().cols();
    for (const auto& h : channels)
        if (h.cols() != U || h.rows() != channels.front().rows())
            throw InvalidParameter("make_realization: inconsistent channel shapes");
    out.channels = std::move(channels);
    out.noise_power = Vec::Constant(R, noise_power);
    out.shadowing_db = Mat::Zero(R, U);
    out.large_scale_gain = Mat::Zero(R, U);
    return out;
}

EigenChannels eigen_decompose(const ChannelRealization& realization, const ChannelParams& params)
{
    EigenChannels out;
    out.tx_power = params.tx_power_mw;
    out.rrh.reserve(realization.num_rrhs());
    for (std::size_t r = 0; r < realization.num_rrhs(); ++r) {
        const CMat& h = realization.channels[r];
        if (!h.allFinite())
            throw NumericalError("eigen_decompose: non-finite channel at RRH " + std::to_string(r));
        const CMat gram = params.tx_power_mw * h * h.adjoint();
        Eigen::SelfAdjointEigenSolver<CMat> evd(gram);
        if (evd.info() != Eigen::Success)
            throw NumericalError("eigen_decompose: EVD did not converge at RRH " + std::to_string(r));

        const Eigen::Index M = gram.rows();
        EigenChannel<double> ec;
        // Eigen returns ascending order; reverse to descending.
        ec.eigenvalues = evd.eigenvalues().reverse();
        ec.basis = evd.eigenvectors().rowwise().reverse();
        const double top = M > 0 ? std::max(ec.eigenvalues(0), 0.0) : 0.0;
        for (Eigen::Index m = 0; m < M; ++m)
            if (ec.eigenvalues(m) < kEigenClampRelative * top)
                ec.eigenvalues(m) = 0.0;
        ec.channel = ec.basis.adjoint() * h;
        ec.noise_power = realization.noise_power(static_cast<Eigen::Index>(r));
        out.rrh.push_back(std::move(ec));
    }
    return out;
}

namespace {

template <typename T>
void put_le(std::ostream& os, T value)
{
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes.begin(), bytes.end());
    os.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& is, const std::filesystem::path& path)
{
    std::array<char, sizeof(T)> bytes;
    if (!is.read(bytes.data(), bytes.size()))
        throw std::runtime_error("read_realization: truncated file " + path.string());
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

constexpr char kMagic[4] = {'C', 'F', 'C', 'H'};

} // namespace

void write_realization(const ChannelRealization& realization, const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("write_realization: cannot open " + path.string());
    os.write(kMagic, 4);
    put_le<std::uint32_t>(os, 1);
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(realization.num_rrhs()));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(realization.antennas()));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(realization.num_users()));
    for (std::size_t r = 0; r < realization.num_rrhs(); ++r) {
        put_le<double>(os, realization.noise_power(static_cast<Eigen::Index>(r)));
        const CMat& h = realization.channels[r];
        for (Eigen::Index m = 0; m < h.rows(); ++m) {
            for (Eigen::Index u = 0; u < h.cols(); ++u) {
                put_le<double>(os, h(m, u).real());
                put_le<double>(os, h(m, u).imag());
            }
        }
    }
    if (!os)
        throw std::runtime_error("write_realization: write failed for " + path.string());
}

ChannelRealization read_realization(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("read_realization: cannot open " + path.string());
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("read_realization: bad magic in " + path.string());
    if (get_le<std::uint32_t>(is, path) != 1)
        throw std::runtime_error("read_realization: unsupported version in " + path.string());
    const auto R = get_le<std::uint32_t>(is, path);
    const auto M = get_le<std::uint32_t>(is, path);
    const auto U = get_le<std::uint32_t>(is, path);

    std::vector<CMat> channels;
    Vec noise(R);
    for (std::uint32_t r = 0; r < R; ++r) {
        noise(r) = get_le<double>(is, path);
        CMat h(M, U);
        for (std::uint32_t m = 0; m < M; ++m) {
            for (std::uint32_t u = 0; u < U; ++u) {
                const double re = get_le<double>(is, path);
                const double im = get_le<double>(is, path);
                h(m, u) = {re, im};
            }
        }
        channels.push_back(std::move(h));
    }
    ChannelRealization out = make_realization(std::move(channels), 1.0);
    out.noise_power = noise;
    return out;
}

} // namespace cfmimo
