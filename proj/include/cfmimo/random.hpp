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

#ifndef CFMIMO_RANDOM_HPP
#define CFMIMO_RANDOM_HPP

#include <cstdint>
#include <random>

namespace cfmimo {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Child seed for an independent stream: splitmix64(splitmix64(parent) ^ stream).
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream)
{
    return splitmix64(splitmix64(parent) ^ (stream * 0xD1B54A32D192ED03ull + 1));
}

} // namespace cfmimo

#endif
