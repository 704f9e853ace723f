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

#ifndef CFMIMO_TYPES_HPP
#define CFMIMO_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cfmimo {

template <typename Real>
using VectorX = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <typename Real>
using MatrixX = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using CMatrixX = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

using Vec = VectorX<double>;
using Mat = MatrixX<double>;
using CMat = CMatrixX<double>;
using Point2 = Eigen::Vector2d;

// Rates above this many bits are treated as uncompressed: 2^-r is flushed to zero.
inline constexpr double kUncompressedRateBits = 60.0;

// Slack allowed on the fronthaul constraint sum_m r_m <= L.
inline constexpr double kBudgetSlack = 1e-9;

class InvalidParameter : public std::invalid_argument {
public:
    explicit InvalidParameter(const std::string& what) : std::invalid_argument(what) {}
};

class DegenerateGeometry : public std::runtime_error {
public:
    explicit DegenerateGeometry(const std::string& what) : std::runtime_error(what) {}
};

class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace cfmimo

#endif
