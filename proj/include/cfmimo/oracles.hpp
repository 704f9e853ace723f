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

// Brute-force references used to check the allocators. Nothing in here calls
// into the allocator or rate code; objectives are supplied by the caller.

#ifndef CFMIMO_ORACLES_HPP
#define CFMIMO_ORACLES_HPP

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace cfmimo::oracle {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct GridSpec {
    double step = 0.05; // bits
    int max_dims = 3;
};

struct GridResult {
    Eigen::VectorXd rates;
    double value = 0.0;
};

/// Exhaustive search over {k * step : k >= 0, sum <= budget} in `dims` dimensions.
/// Refuses (InvalidParameter) more than min(grid.max_dims, 3) dimensions.
GridResult grid_search_allocation(int dims, double budget, const Objective& objective, const GridSpec& grid = {});

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h.
Eigen::VectorXd finite_difference_gradient(const Objective& objective, const Eigen::VectorXd& point, double h = 1e-5);

/// Scalar local rate from SNRs, written out independently of the library.
double local_rate_reference(const Eigen::VectorXd& snr, const Eigen::VectorXd& rates);

/// Dense Hermitian eigenvalues (descending) by Jacobi rotations on the real
/// 2n x 2n embedding; independent from the library's EVD path.
Eigen::VectorXd hermitian_eigenvalues_reference(const Eigen::MatrixXcd& a);

/// Euclidean projection by brute force on a grid over {r >= 0, sum r <= budget}, dims <= 3.
Eigen::VectorXd projection_reference(const Eigen::VectorXd& v, double budget, double step);

} // namespace cfmimo::oracle

#endif
