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

#include "cfmimo/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cfmimo/types.hpp"

namespace cfmimo::oracle {

GridResult grid_search_allocation(int dims, double budget, const Objective& objective, const GridSpec& grid)
{
    if (dims < 1 || dims > std::min(grid.max_dims, 3))
        throw InvalidParameter("grid_search_allocation: refusing " + std::to_string(dims) + " dimensions");
    if (!(grid.step > 0.0))
        throw InvalidParameter("grid_search_allocation: step must be positive");
    const int steps = static_cast<int>(std::floor(budget / grid.step + 1e-9));

    GridResult best;
    best.value = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(dims);
    std::vector<int> k(static_cast<std::size_t>(dims), 0);
    // Odometer over all index tuples with sum(k) <= steps.
    while (true) {
        for (int d = 0; d < dims; ++d)
            x(d) = k[d] * grid.step;
        const double v = objective(x);
        if (v > best.value) {
            best.value = v;
            best.rates = x;
        }
        int d = 0;
        for (; d < dims; ++d) {
            ++k[d];
            int total = 0;
            for (int i = 0; i < dims; ++i)
                total += k[i];
            if (total <= steps)
                break;
            k[d] = 0;
        }
        if (d == dims)
            break;
    }
    return best;
}

Eigen::VectorXd finite_difference_gradient(const Objective& objective, const Eigen::VectorXd& point, double h)
{
    Eigen::VectorXd g(point.size());
    for (Eigen::Index i = 0; i < point.size(); ++i) {
        Eigen::VectorXd lo = point, hi = point;
        lo(i) -= h;
        hi(i) += h;
        g(i) = (objective(hi) - objective(lo)) / (2.0 * h);
    }
    return g;
}

double local_rate_reference(const Eigen::VectorXd& snr, const Eigen::VectorXd& rates)
{
    double acc = 0.0;
    for (Eigen::Index m = 0; m < snr.size(); ++m)
        acc += std::log2(1.0 + snr(m)) - std::log2(1.0 + snr(m) * std::pow(2.0, -rates(m)));
    return acc;
}

Eigen::VectorXd hermitian_eigenvalues_reference(const Eigen::MatrixXcd& a)
{
    const Eigen::Index n = a.rows();
    Eigen::MatrixXd s(2 * n, 2 * n);
    s << a.real(), -a.imag(), a.imag(), a.real();
    const Eigen::Index N = 2 * n;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < N; ++p)
            for (Eigen::Index q = p + 1; q < N; ++q)
                off += s(p, q) * s(p, q);
        if (off < 1e-30 * std::max(1.0, s.squaredNorm()))
            break;
        for (Eigen::Index p = 0; p < N; ++p) {
            for (Eigen::Index q = p + 1; q < N; ++q) {
                if (s(p, q) == 0.0)
                    continue;
                const double theta = (s(q, q) - s(p, p)) / (2.0 * s(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (Eigen::Index k = 0; k < N; ++k) {
                    const double skp = s(k, p), skq = s(k, q);
                    s(k, p) = c * skp - sn * skq;
                    s(k, q) = sn * skp + c * skq;
                }
                for (Eigen::Index k = 0; k < N; ++k) {
                    const double spk = s(p, k), sqk = s(q, k);
                    s(p, k) = c * spk - sn * sqk;
                    s(q, k) = sn * spk + c * sqk;
                }
            }
        }
    }
    std::vector<double> ev(static_cast<std::size_t>(N));
    for (Eigen::Index i = 0; i < N; ++i)
        ev[i] = s(i, i);
    std::sort(ev.begin(), ev.end(), std::greater<double>());
    // The real embedding repeats every eigenvalue twice.
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i)
        out(i) = 0.5 * (ev[2 * i] + ev[2 * i + 1]);
    return out;
}

Eigen::VectorXd projection_reference(const Eigen::VectorXd& v, double budget, double step)
{
    const auto dims = static_cast<int>(v.size());
    auto closeness = [&](const Eigen::VectorXd& x) { return -(x - v).squaredNorm(); };
    return grid_search_allocation(dims, budget, closeness, {step, 3}).rates;
}

} // namespace cfmimo::oracle
