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

// Mutual-information expressions for compress-forward with per-eigen-channel
// compression rates. All rates are in bits/s/Hz.

#ifndef CFMIMO_INFO_RATES_HPP
#define CFMIMO_INFO_RATES_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "cfmimo/channel.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

/// Compression rates of one RRH and its fronthaul budget.
template <typename Real>
struct RrhRatesT {
    VectorX<Real> rates;
    Real budget{};

    Eigen::Index active_count() const { return (rates.array() > Real(0)).count(); }
    Real total() const { return rates.sum(); }
    bool feasible(Real slack = Real(kBudgetSlack)) const
    {
        return rates.allFinite() && (rates.array() >= Real(0)).all() && total() <= budget + slack;
    }
};

template <typename Real>
struct RateAllocationT {
    std::vector<RrhRatesT<Real>> rrh;

    std::size_t num_rrhs() const { return rrh.size(); }
    bool feasible(Real slack = Real(kBudgetSlack)) const
    {
        return std::all_of(rrh.begin(), rrh.end(), [&](const auto& a) { return a.feasible(slack); });
    }
};

using RrhRates = RrhRatesT<double>;
using RateAllocation = RateAllocationT<double>;

/// Effective eigenvalues for the generalized decentralized objective.
template <typename Real>
struct GeneralizedEigenvaluesT {
    VectorX<Real> information; // Lambda^(i)
    VectorX<Real> compression; // Lambda^(c)
};

using GeneralizedEigenvalues = GeneralizedEigenvaluesT<double>;

template <typename Real>
RateAllocationT<Real> zero_allocation(const EigenChannelsT<Real>& eigen, const std::vector<Real>& budgets)
{
    RateAllocationT<Real> out;
    for (std::size_t r = 0; r < eigen.num_rrhs(); ++r)
        out.rrh.push_back({VectorX<Real>::Zero(eigen.antennas()), budgets.at(r)});
    return out;
}

/// 2^-r with rates above the uncompressed threshold flushed to zero.
template <typename Real>
Real rate_decay(Real r)
{
    return r > Real(kUncompressedRateBits) ? Real(0) : std::exp2(-r);
}

/// Quantization-noise power that yields compression rate r on an eigen-channel
/// of power lambda; +inf when r <= 0 (the channel is dropped).
template <typename Real>
Real quantization_noise(Real lambda, Real sigma2, Real r)
{
    if (!(r > Real(0)))
        return std::numeric_limits<Real>::infinity();
    const Real t = std::exp2(-r);
    return t * (lambda + sigma2) / (Real(1) - t);
}

/// Diagonal of the compression penalty (I - R) / (N + Lambda_c R), per channel.
template <typename Real, typename DerivedL, typename DerivedR>
VectorX<Real> penalty_diagonal(const Eigen::MatrixBase<DerivedL>& lambda_c, Real sigma2,
                               const Eigen::MatrixBase<DerivedR>& rates)
{
    VectorX<Real> d(rates.size());
    for (Eigen::Index m = 0; m < rates.size(); ++m) {
        const Real t = rate_decay<Real>(rates(m));
        d(m) = (Real(1) - t) / (sigma2 + lambda_c(m) * t);
    }
    return d;
}

/// log2 det of a Hermitian positive-definite matrix via Cholesky.
template <typename Derived>
auto log2_det_hpd(const Eigen::MatrixBase<Derived>& a)
{
    using Scalar = typename Derived::Scalar;
    using Real = typename Eigen::NumTraits<Scalar>::Real;
    Eigen::LLT<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> llt(a);
    if (llt.info() != Eigen::Success)
        throw NumericalError("log2_det_hpd: argument is not positive-definite");
    Real acc = 0;
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i)
        acc += std::log(std::real(l(i, i)));
    return Real(2) * acc / std::numbers::ln2_v<Real>;
}

/// Local information rate from eigen-channel SNRs: sum_m log2((1+rho)/(1+rho 2^-r)).
template <typename DerivedS, typename DerivedR>
auto local_rate(const Eigen::MatrixBase<DerivedS>& snr, const Eigen::MatrixBase<DerivedR>& rates)
{
    using Real = typename DerivedS::Scalar;
    Real acc = 0;
    for (Eigen::Index m = 0; m < snr.size(); ++m)
        acc += std::log2((Real(1) + snr(m)) / (Real(1) + snr(m) * rate_decay<Real>(rates(m))));
    return acc;
}

template <typename Real>
Real local_rate(const EigenChannelsT<Real>& eigen, const RateAllocationT<Real>& alloc, std::size_t rrh)
{
    return local_rate(eigen.rrh.at(rrh).snr(), alloc.rrh.at(rrh).rates);
}

/// Local rate for a quantizer operating at gap `gap` from the rate-distortion limit.
template <typename Real, typename DerivedL, typename DerivedR>
Real local_rate_with_gap(const Eigen::MatrixBase<DerivedL>& lambda, Real sigma2,
                         const Eigen::MatrixBase<DerivedR>& rates, Real gap)
{
    Real acc = 0;
    for (Eigen::Index m = 0; m < lambda.size(); ++m) {
        const Real t = rate_decay<Real>(rates(m));
        const Real denom = sigma2 + (gap * lambda(m) + (gap - Real(1)) * sigma2) * t;
        acc += std::log2(Real(1) + lambda(m) * (Real(1) - t) / denom);
    }
    return acc;
}

/// Generalized decentralized objective; only scalar arithmetic.
template <typename Real, typename DerivedR>
Real generalized_objective(const GeneralizedEigenvaluesT<Real>& gev, const Eigen::MatrixBase<DerivedR>& rates,
                           Real sigma2)
{
    Real acc = 0;
    for (Eigen::Index m = 0; m < rates.size(); ++m) {
        const Real t = rate_decay<Real>(rates(m));
        acc += std::log2(Real(1) + gev.information(m) * (Real(1) - t) / (sigma2 + gev.compression(m) * t));
    }
    return acc;
}

/// d/dr_m of the generalized objective:
/// t li (s2 + lc) / ((s2 + lc t + li (1 - t)) (s2 + lc t)), t = 2^-r_m.
template <typename Real, typename DerivedR>
VectorX<Real> generalized_gradient(const GeneralizedEigenvaluesT<Real>& gev, const Eigen::MatrixBase<DerivedR>& rates,
                                   Real sigma2)
{
    VectorX<Real> g(rates.size());
    for (Eigen::Index m = 0; m < rates.size(); ++m) {
        const Real t = rate_decay<Real>(rates(m));
        const Real li = gev.information(m);
        const Real lc = gev.compression(m);
        const Real base = sigma2 + lc * t;
        g(m) = t * li * (sigma2 + lc) / ((base + li * (Real(1) - t)) * base);
    }
    return g;
}

/// I + p sum_r G_r^H diag(w_r) G_r, the argument of the global log-determinant.
template <typename Real>
CMatrixX<Real> global_information_matrix(const EigenChannelsT<Real>& eigen, const RateAllocationT<Real>& alloc,
                                         std::size_t skip_rrh = static_cast<std::size_t>(-1))
{
    const Eigen::Index U = eigen.num_users();
    CMatrixX<Real> a = CMatrixX<Real>::Identity(U, U);
    for (std::size_t r = 0; r < eigen.num_rrhs(); ++r) {
        if (r == skip_rrh)
            continue;
        const auto& ec = eigen.rrh[r];
        const VectorX<Real> w = penalty_diagonal(ec.eigenvalues, ec.noise_power, alloc.rrh.at(r).rates);
        a.noalias() += eigen.tx_power * ec.channel.adjoint() * w.asDiagonal() * ec.channel;
    }
    return a;
}

/// Global information rate in the eigen basis (rate-form penalty).
template <typename Real>
Real global_rate(const EigenChannelsT<Real>& eigen, const RateAllocationT<Real>& alloc)
{
    if (eigen.num_rrhs() == 0)
        return Real(0);
    return log2_det_hpd(global_information_matrix(eigen, alloc));
}

/// Information rate without compression, log2|I + sum_r p H_r^H H_r / s_r^2|.
template <typename Real>
Real uncompressed_rate(const EigenChannelsT<Real>& eigen)
{
    if (eigen.num_rrhs() == 0)
        return Real(0);
    const Eigen::Index U = eigen.num_users();
    CMatrixX<Real> a = CMatrixX<Real>::Identity(U, U);
    for (const auto& ec : eigen.rrh)
        a.noalias() += (eigen.tx_power / ec.noise_power) * ec.channel.adjoint() * ec.channel;
    return log2_det_hpd(a);
}

template <typename Real>
Real cutset_bound(const EigenChannelsT<Real>& eigen, const std::vector<Real>& budgets)
{
    const Real fronthaul = std::accumulate(budgets.begin(), budgets.end(), Real(0));
    return std::min(fronthaul, uncompressed_rate(eigen));
}

/// Conditional rate I(x; z_r | z_others) for a caller-supplied side-information matrix.
template <typename Real>
Real conditional_rate(const EigenChannelsT<Real>& eigen, const RateAllocationT<Real>& alloc, std::size_t rrh,
                      const CMatrixX<Real>& side_info)
{
    const auto& ec = eigen.rrh.at(rrh);
    if (side_info.rows() != eigen.num_users() || side_info.cols() != eigen.num_users())
        throw InvalidParameter("conditional_rate: side-information matrix has wrong shape");
    Eigen::LLT<CMatrixX<Real>> llt(side_info);
    if (llt.info() != Eigen::Success || !side_info.isApprox(side_info.adjoint()))
        throw InvalidParameter("conditional_rate: side-information matrix must be Hermitian positive-definite");
    const VectorX<Real> w = penalty_diagonal(ec.eigenvalues, ec.noise_power, alloc.rrh.at(rrh).rates);
    const VectorX<Real> sw = w.cwiseSqrt();
    // |I + K D| = |I + D^1/2 K D^1/2| keeps the argument Hermitian.
    const CMatrixX<Real> solved = llt.solve(CMatrixX<Real>(ec.channel.adjoint()));
    CMatrixX<Real> k = eigen.tx_power * (ec.channel * solved);
    k = sw.asDiagonal() * k * sw.asDiagonal();
    k = Real(0.5) * (k + k.adjoint()).eval();
    k.diagonal().array() += Real(1);
    return log2_det_hpd(k);
}

/// Fronthaul rate actually consumed by RRH `rrh` when the quantizer has gap `gap`:
/// distortions are chosen from the allocation and the compression rate is re-evaluated.
template <typename Real>
Real compression_rate_used(const EigenChannelsT<Real>& eigen, const RateAllocationT<Real>& alloc, std::size_t rrh,
                           Real gap)
{
    const auto& ec = eigen.rrh.at(rrh);
    const auto& rates = alloc.rrh.at(rrh).rates;
    Real acc = 0;
    for (Eigen::Index m = 0; m < rates.size(); ++m) {
        if (!(rates(m) > Real(0)))
            continue;
        const Real power = gap * (ec.eigenvalues(m) + ec.noise_power);
        const Real q = quantization_noise(power, Real(0), rates(m));
        acc += std::log2((power + q) / q);
    }
    return acc;
}

/// Gradient of the eigen-basis global rate with respect to every r_{r,m}:
/// t (s2 + l) / (s2 + l t)^2 * p g_m A^-1 g_m^H, g_m the m-th row of the eigen-basis channel.
template <typename Real>
std::vector<VectorX<Real>> global_rate_gradient(const EigenChannelsT<Real>& eigen, const RateAllocationT<Real>& alloc)
{
    const CMatrixX<Real> a = global_information_matrix(eigen, alloc);
    Eigen::LLT<CMatrixX<Real>> llt(a);
    if (llt.info() != Eigen::Success)
        throw NumericalError("global_rate_gradient: information matrix is not positive-definite");
    std::vector<VectorX<Real>> grad;
    grad.reserve(eigen.num_rrhs());
    for (std::size_t r = 0; r < eigen.num_rrhs(); ++r) {
        const auto& ec = eigen.rrh[r];
        const auto& rates = alloc.rrh.at(r).rates;
        // Rows of G A^-1 G^H diagonal: solve A X = G^H, then sum G .* X^T.
        const CMatrixX<Real> x = llt.solve(CMatrixX<Real>(ec.channel.adjoint()));
        VectorX<Real> g(rates.size());
        for (Eigen::Index m = 0; m < rates.size(); ++m) {
            const Real quad = std::real((ec.channel.row(m) * x.col(m)).value());
            const Real t = rate_decay<Real>(rates(m));
            const Real l = ec.eigenvalues(m);
            const Real s2 = ec.noise_power;
            g(m) = t * (s2 + l) / ((s2 + l * t) * (s2 + l * t)) * eigen.tx_power * quad;
        }
        grad.push_back(std::move(g));
    }
    return grad;
}

/// Global rate and its gradient over a flat rate vector (RRH-major), sharing one
/// Cholesky factor between the value and the gradient at the same point.
template <typename Real>
class GlobalRateEvaluator {
public:
    explicit GlobalRateEvaluator(const EigenChannelsT<Real>& eigen) : tx_power_(eigen.tx_power)
    {
        Eigen::Index rows = 0;
        for (const auto& ec : eigen.rrh)
            rows += ec.channel.rows();
        stacked_.resize(eigen.num_users(), rows);
        lambda_.resize(rows);
        sigma2_.resize(rows);
        Eigen::Index offset = 0;
        for (const auto& ec : eigen.rrh) {
            const Eigen::Index n = ec.channel.rows();
            stacked_.middleCols(offset, n) = ec.channel.adjoint();
            lambda_.segment(offset, n) = ec.eigenvalues;
            sigma2_.segment(offset, n).setConstant(ec.noise_power);
            offset += n;
        }
    }

    Eigen::Index dimension() const { return stacked_.cols(); }

    Real value(const VectorX<Real>& x) { return factor(x); }

    VectorX<Real> gradient(const VectorX<Real>& x)
    {
        factor(x);
        // diag(G A^-1 G^H) = column norms of L^-1 G^H.
        const CMatrixX<Real> y = llt_.matrixL().solve(stacked_);
        VectorX<Real> g(x.size());
        for (Eigen::Index m = 0; m < x.size(); ++m) {
            const Real t = rate_decay<Real>(x(m));
            const Real s2 = sigma2_(m), l = lambda_(m);
            g(m) = t * (s2 + l) / ((s2 + l * t) * (s2 + l * t)) * tx_power_ * y.col(m).squaredNorm();
        }
        return g;
    }

private:
    Real factor(const VectorX<Real>& x)
    {
        if (x.size() != dimension())
            throw InvalidParameter("GlobalRateEvaluator: rate vector has wrong length");
        if (has_cache_ && x == cached_x_)
            return cached_value_;
        const Eigen::Index U = stacked_.rows();
        CMatrixX<Real> w = stacked_;
        for (Eigen::Index m = 0; m < x.size(); ++m) {
            const Real t = rate_decay<Real>(x(m));
            w.col(m) *= std::sqrt(tx_power_ * (Real(1) - t) / (sigma2_(m) + lambda_(m) * t));
        }
        CMatrixX<Real> a = CMatrixX<Real>::Identity(U, U);
        a.noalias() += w * w.adjoint();
        llt_.compute(a);
        if (llt_.info() != Eigen::Success)
            throw NumericalError("GlobalRateEvaluator: information matrix is not positive-definite");
        Real acc = 0;
        for (Eigen::Index i = 0; i < U; ++i)
            acc += std::log(std::real(llt_.matrixLLT()(i, i)));
        cached_x_ = x;
        cached_value_ = Real(2) * acc / std::numbers::ln2_v<Real>;
        has_cache_ = true;
        return cached_value_;
    }

    Real tx_power_;
    CMatrixX<Real> stacked_; // G^H, users x (RRH, eigen-channel)
    VectorX<Real> lambda_, sigma2_;
    Eigen::LLT<CMatrixX<Real>, Eigen::Lower> llt_;
    VectorX<Real> cached_x_;
    Real cached_value_{};
    bool has_cache_ = false;
};

/// Global rate when RRH r quantizes each antenna (physical basis) with per-antenna
/// rates; scalar distortions follow from the per-antenna received power.
template <typename Real>
Real global_rate_physical(const std::vector<CMatrixX<Real>>& channels, const VectorX<Real>& noise_power,
                          const std::vector<VectorX<Real>>& antenna_rates, Real tx_power)
{
    if (channels.empty())
        return Real(0);
    const Eigen::Index U = channels.front().cols();
    CMatrixX<Real> a = CMatrixX<Real>::Identity(U, U);
    for (std::size_t r = 0; r < channels.size(); ++r) {
        const auto& h = channels[r];
        const VectorX<Real> power = tx_power * h.rowwise().squaredNorm();
        const VectorX<Real> w = penalty_diagonal(power, noise_power(static_cast<Eigen::Index>(r)), antenna_rates.at(r));
        a.noalias() += tx_power * h.adjoint() * w.asDiagonal() * h;
    }
    return log2_det_hpd(a);
}

} // namespace cfmimo

#endif
