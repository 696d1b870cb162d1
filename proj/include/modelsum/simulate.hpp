// Copyright 2026 The modelsum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Synthetic benchmark data:
//
//   f(x) = 4 x1 + 4 x2 + 4 x4 x3^2,   y = f(x) + e,   e ~ N(0, (noise * max(f, 0))^2)
//
// x1..x3 ~ U(0,1), x4 ~ Bernoulli(0.75) stored as 0/1, x5 categorical with
// levels a..e drawn uniformly, x6..xp ~ N(0,1).

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "modelsum/error.hpp"
#include "modelsum/frame.hpp"
#include "modelsum/random.hpp"

namespace modelsum {

inline constexpr double kDefaultNoise = 0.1;

inline double simulation_signal(double x1, double x2, double x3, double x4) {
  return 4.0 * x1 + 4.0 * x2 + 4.0 * x4 * x3 * x3;
}

/// Columns x1..xp then y. Row i draws from its own stream derive_seed(seed, {i}).
inline Frame simulate(std::size_t n, std::size_t p, std::uint64_t seed, double noise = kDefaultNoise) {
  if (p < 5) throw UsageError("simulation needs p >= 5, got " + std::to_string(p));
  if (n < 1) throw UsageError("simulation needs n >= 1");
  if (noise < 0) throw UsageError("noise must be non-negative");
  static const std::vector<std::string> levels = {"a", "b", "c", "d", "e"};
  std::vector<std::vector<double>> x(p, std::vector<double>(n));
  std::vector<std::uint32_t> x5(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = make_rng(derive_seed(seed, {i}));
    x[0][i] = uniform01(rng);
    x[1][i] = uniform01(rng);
    x[2][i] = uniform01(rng);
    x[3][i] = uniform01(rng) < 0.75 ? 1.0 : 0.0;
    x5[i] = static_cast<std::uint32_t>(uniform_index(rng, levels.size()));
    for (std::size_t j = 5; j < p; ++j) x[j][i] = standard_normal(rng);
    const double f = simulation_signal(x[0][i], x[1][i], x[2][i], x[3][i]);
    y[i] = f + noise * std::max(f, 0.0) * standard_normal(rng);
  }
  std::vector<Column> cols;
  for (std::size_t j = 0; j < p; ++j) {
    const std::string name = "x" + std::to_string(j + 1);
    if (j == 4) {
      cols.push_back(Column::categorical(name, x5, levels));
    } else {
      cols.push_back(Column::numeric(name, std::move(x[j])));
    }
  }
  cols.push_back(Column::numeric("y", std::move(y)));
  return Frame(std::move(cols));
}

}  // namespace modelsum
