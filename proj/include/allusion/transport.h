// Copyright 2026 The Allusion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace allusion {

struct Flow {
  std::size_t source = 0;
  std::size_t target = 0;
  double mass = 0.0;
};

struct TransportPlan {
  double cost = 0.0;
  std::vector<Flow> flows;  // basic cells with positive mass, row-major order
  std::size_t pivots = 0;
};

// Exact balanced transportation problem
//
//   minimize   sum_ij cost[i * n + j] * x_ij
//   subject to sum_j x_ij = supply[i],  sum_i x_ij = demand[j],  x >= 0
//
// solved with the transportation simplex (u-v potentials on a spanning-tree
// basis, northwest-corner start). Supplies and demands must be non-negative
// with equal totals (relative tolerance 1e-9); throws std::invalid_argument
// otherwise.
TransportPlan solve_transport(std::span<const double> supply, std::span<const double> demand,
                              std::span<const double> cost);

}  // namespace allusion
