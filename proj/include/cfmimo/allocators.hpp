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

#ifndef CFMIMO_ALLOCATORS_HPP
#define CFMIMO_ALLOCATORS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "cfmimo/info_rates.hpp"

namespace cfmimo {

struct PgdSettings {
    double step_size = 0.1;
    int max_iters = 2000;
    double convergence_tol = 1e-7; // relative objective change
    bool backtracking = true;
    double shrink = 0.5;
    int max_shrinks = 40;

    void validate() const
    {
        if (!(step_size > 0.0))
            throw InvalidParameter("PgdSettings: step_size must be positive");
        if (max_iters < 0)
            throw InvalidParameter("PgdSettings: max_iters must be non-negative");
        if (!(convergence_tol > 0.0))
            throw InvalidParameter("PgdSettings: convergence_tol must be positive");
        if (backtracking && !(shrink > 0.0 && shrink < 1.0))
            throw InvalidParameter("PgdSettings: shrink must lie in (0, 1)");
    }
};

/// Closed-form optimum of the local allocation problem for one RRH.
///
/// The active set is the largest n for which every one of the n strongest
/// channels gets a positive rate L/n + log2 rho_m - mean_{k<n} log2 rho_k.
/// Channels with rho = 0 never enter. Output order follows the input order.
template <typename Derived>
auto waterfill(const Eigen::MatrixBase<Derived>& snr, typename Derived::Scalar budget)
{
    using Real = typename Derived::Scalar;
    if (!(budget >= Real(0)))
        throw InvalidParameter("waterfill: budget must be non-negative");
    const Eigen::Index M = snr.size();
    RrhRatesT<Real> out{VectorX<Real>::Zero(M), budget};

    std::vector<Eigen::Index> order(static_cast<std::size_t>(M));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return snr(a) > snr(b); });
    auto n = static_cast<Eigen::Index>(std::count_if(order.begin(), order.end(), [&](auto i) { return snr(i) > Real(0); }));
    if (budget == Real(0) || n == 0)
        return out;

    for (; n >= 1; --n) {
        Real mean_log = 0;
        for (Eigen::Index k = 0; k < n; ++k)
            mean_log += std::log2(snr(order[k]));
        mean_log /= Real(n);
        const Real level = budget / Real(n) - mean_log;
        // The weakest active channel decides feasibility of this n.
        if (level + std::log2(snr(order[n - 1])) > Real(0)) {
            for (Eigen::Index k = 0; k < n; ++k)
                out.rates(order[k]) = level + std::log2(snr(order[k]));
            break;
        }
    }
    return out;
}

template <typename Real>
RateAllocationT<Real> waterfill_all(const EigenChannelsT<Real>& eigen, const std::vector<Real>& budgets)
{
    RateAllocationT<Real> out;
    for (std::size_t r = 0; r < eigen.num_rrhs(); ++r)
        out.rrh.push_back(waterfill(eigen.rrh[r].snr(), budgets.at(r)));
    return out;
}

enum class Basis { Physical, Eigen };

template <typename Real>
struct BasisRates {
    Basis basis;
    RrhRatesT<Real> rates;
};

template <typename Real>
BasisRates<Real> equal_split(Basis basis, Eigen::Index channels, Real budget)
{
    if (!(budget >= Real(0)))
        throw InvalidParameter("equal_split: budget must be non-negative");
    if (channels < 1)
        throw InvalidParameter("equal_split: need at least one channel");
    return {basis, {VectorX<Real>::Constant(channels, budget / Real(channels)), budget}};
}

template <typename Real>
RateAllocationT<Real> equal_split_all(const EigenChannelsT<Real>& eigen, const std::vector<Real>& budgets)
{
    RateAllocationT<Real> out;
    for (std::size_t r = 0; r < eigen.num_rrhs(); ++r)
        out.rrh.push_back(equal_split(Basis::Eigen, eigen.antennas(), budgets.at(r)).rates);
    return out;
}

/// Euclidean projection onto {r >= 0, sum r <= budget}.
template <typename Derived>
auto project_feasible(const Eigen::MatrixBase<Derived>& v, typename Derived::Scalar budget)
{
    using Real = typename Derived::Scalar;
    if (!(budget >= Real(0)))
        throw InvalidParameter("project_feasible: budget must be non-negative");
    VectorX<Real> clipped = v.cwiseMax(Real(0));
    if (clipped.sum() <= budget)
        return clipped;
    // Projection onto the face sum r = budget: r = max(v - theta, 0).
    std::vector<Real> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<Real>());
    Real cumulative = 0;
    Real theta = 0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        cumulative += sorted[k];
        const Real candidate = (cumulative - budget) / Real(k + 1);
        if (sorted[k] - candidate > Real(0))
            theta = candidate;
        else
            break;
    }
    VectorX<Real> out = (v.array() - theta).cwiseMax(Real(0)).matrix();
    // Guard the constraint against round-off in theta.
    const Real total = out.sum();
    if (total > budget && total > Real(0))
        out *= budget / total;
    return out;
}

template <typename Real>
struct PgdTrace {
    int iterations = 0;
    Real initial_objective{};
    Real final_objective{};
};

/// Projected gradient ascent with optional backtracking; never accepts a step
/// that decreases the objective.
template <typename Real>
VectorX<Real> projected_ascent(VectorX<Real> x, const std::function<Real(const VectorX<Real>&)>& objective,
                               const std::function<VectorX<Real>(const VectorX<Real>&)>& gradient,
                               const std::function<VectorX<Real>(const VectorX<Real>&)>& project,
                               const PgdSettings& settings, PgdTrace<Real>* trace = nullptr)
{
    settings.validate();
    Real f = objective(x);
    if (trace) {
        trace->initial_objective = f;
        trace->final_objective = f;
        trace->iterations = 0;
    }
    for (int it = 0; it < settings.max_iters; ++it) {
        const VectorX<Real> g = gradient(x);
        if (!g.allFinite())
            throw NumericalError("projected_ascent: non-finite gradient at iteration " + std::to_string(it) +
                                 " (objective " + std::to_string(static_cast<double>(f)) + ")");
        Real step = Real(settings.step_size);
        bool accepted = false;
        VectorX<Real> candidate;
        Real f_candidate{};
        for (int s = 0; s <= settings.max_shrinks; ++s) {
            candidate = project(x + step * g);
            f_candidate = objective(candidate);
            if (f_candidate >= f) {
                accepted = true;
                break;
            }
            if (!settings.backtracking)
                break;
            step *= Real(settings.shrink);
        }
        if (!accepted)
            break;
        const Real change = f_candidate - f;
        x = std::move(candidate);
        f = f_candidate;
        if (trace) {
            trace->iterations = it + 1;
            trace->final_objective = f;
        }
        if (change <= Real(settings.convergence_tol) * std::max(std::abs(f), Real(1e-12)))
            break;
    }
    return x;
}

template <typename Real>
VectorX<Real> flatten(const RateAllocationT<Real>& alloc)
{
    Eigen::Index total = 0;
    for (const auto& a : alloc.rrh)
        total += a.rates.size();
    VectorX<Real> out(total);
    Eigen::Index offset = 0;
    for (const auto& a : alloc.rrh) {
        out.segment(offset, a.rates.size()) = a.rates;
        offset += a.rates.size();
    }
    return out;
}

template <typename Real>
RateAllocationT<Real> unflatten(const VectorX<Real>& x, const RateAllocationT<Real>& shape)
{
    RateAllocationT<Real> out = shape;
    Eigen::Index offset = 0;
    for (auto& a : out.rrh) {
        a.rates = x.segment(offset, a.rates.size());
        offset += a.rates.size();
    }
    return out;
}

/// Centralized projected gradient ascent on the global rate.
template <typename Real>
RateAllocationT<Real> pgd_centralized(const EigenChannelsT<Real>& eigen, const std::vector<Real>& budgets,
                                      const PgdSettings& settings, const RateAllocationT<Real>& init,
                                      PgdTrace<Real>* trace = nullptr)
{
    if (init.num_rrhs() != eigen.num_rrhs() || budgets.size() != eigen.num_rrhs())
        throw InvalidParameter("pgd_centralized: allocation, budgets and channels disagree in size");
    if (!init.feasible())
        throw InvalidParameter("pgd_centralized: initial allocation is infeasible");
    RateAllocationT<Real> shape = init;
    for (std::size_t r = 0; r < shape.num_rrhs(); ++r)
        shape.rrh[r].budget = budgets[r];

    GlobalRateEvaluator<Real> evaluator(eigen);
    auto objective = [&](const VectorX<Real>& x) { return evaluator.value(x); };
    auto gradient = [&](const VectorX<Real>& x) { return evaluator.gradient(x); };
    auto project = [&](const VectorX<Real>& x) {
        VectorX<Real> out(x.size());
        Eigen::Index offset = 0;
        for (std::size_t r = 0; r < shape.num_rrhs(); ++r) {
            const Eigen::Index n = shape.rrh[r].rates.size();
            out.segment(offset, n) = project_feasible(x.segment(offset, n), budgets[r]);
            offset += n;
        }
        return out;
    };
    const VectorX<Real> x = projected_ascent<Real>(flatten(shape), objective, gradient, project, settings, trace);
    return unflatten(x, shape);
}

/// Per-RRH projected gradient ascent on the generalized decentralized objective.
template <typename Real>
RrhRatesT<Real> pgd_generalized(const GeneralizedEigenvaluesT<Real>& gev, Real budget, Real sigma2,
                                const PgdSettings& settings, const VectorX<Real>& init,
                                PgdTrace<Real>* trace = nullptr)
{
    if (gev.information.size() != init.size() || gev.compression.size() != init.size())
        throw InvalidParameter("pgd_generalized: eigenvalue and rate vectors disagree in size");
    if (!(RrhRatesT<Real>{init, budget}.feasible()))
        throw InvalidParameter("pgd_generalized: initial rates are infeasible");
    auto objective = [&](const VectorX<Real>& x) { return generalized_objective(gev, x, sigma2); };
    auto gradient = [&](const VectorX<Real>& x) { return generalized_gradient(gev, x, sigma2); };
    auto project = [&](const VectorX<Real>& x) { return project_feasible(x, budget); };
    return {projected_ascent<Real>(init, objective, gradient, project, settings, trace), budget};
}

} // namespace cfmimo

#endif
