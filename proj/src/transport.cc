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

#include "allusion/transport.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace allusion {

namespace {

void validate(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument(std::string("transport: negative or non-finite ") + what);
    }
  }
}

// Spanning-tree basis over m row nodes [0, m) and n column nodes [m, m + n).
class Basis {
 public:
  Basis(std::size_t m, std::size_t n)
      : m_(m), n_(n), basic_(m * n, false), flow_(m * n, 0.0) {}

  bool basic(std::size_t cell) const { return basic_[cell]; }
  double flow(std::size_t cell) const { return flow_[cell]; }
  void set(std::size_t cell, double x) {
    basic_[cell] = true;
    flow_[cell] = x;
  }
  void add(std::size_t cell, double dx) { flow_[cell] += dx; }
  void drop(std::size_t cell) {
    basic_[cell] = false;
    flow_[cell] = 0.0;
  }

  // Potentials with u_0 = 0 so that cost = u_i + v_j on every basic cell.
  void potentials(std::span<const double> cost, std::vector<double>& u,
                  std::vector<double>& v) const {
    const double unset = std::numeric_limits<double>::quiet_NaN();
    u.assign(m_, unset);
    v.assign(n_, unset);
    u[0] = 0.0;
    std::vector<std::size_t> stack{0};
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      if (node < m_) {
        for (std::size_t j = 0; j < n_; ++j) {
          const std::size_t c = node * n_ + j;
          if (basic_[c] && std::isnan(v[j])) {
            v[j] = cost[c] - u[node];
            stack.push_back(m_ + j);
          }
        }
      } else {
        const std::size_t j = node - m_;
        for (std::size_t i = 0; i < m_; ++i) {
          const std::size_t c = i * n_ + j;
          if (basic_[c] && std::isnan(u[i])) {
            u[i] = cost[c] - v[j];
            stack.push_back(i);
          }
        }
      }
    }
  }

  // Cells on the tree path from row `row` to column `col`, listed from the
  // row end.
  std::vector<std::size_t> path(std::size_t row, std::size_t col) const {
    const std::size_t nodes = m_ + n_;
    const std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> parent(nodes, none);
    std::vector<std::size_t> queue{row};
    parent[row] = row;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t node = queue[head];
      if (node == m_ + col) break;
      if (node < m_) {
        for (std::size_t j = 0; j < n_; ++j) {
          if (basic_[node * n_ + j] && parent[m_ + j] == none) {
            parent[m_ + j] = node;
            queue.push_back(m_ + j);
          }
        }
      } else {
        const std::size_t j = node - m_;
        for (std::size_t i = 0; i < m_; ++i) {
          if (basic_[i * n_ + j] && parent[i] == none) {
            parent[i] = node;
            queue.push_back(i);
          }
        }
      }
    }
    if (parent[m_ + col] == none) throw std::logic_error("transport: basis is not a tree");
    std::vector<std::size_t> cells;
    for (std::size_t node = m_ + col; node != row; node = parent[node]) {
      const std::size_t prev = parent[node];
      const std::size_t i = node < m_ ? node : prev;
      const std::size_t j = node < m_ ? prev - m_ : node - m_;
      cells.push_back(i * n_ + j);
    }
    std::reverse(cells.begin(), cells.end());
    return cells;
  }

 private:
  std::size_t m_, n_;
  std::vector<bool> basic_;
  std::vector<double> flow_;
};

}  // namespace

TransportPlan solve_transport(std::span<const double> supply, std::span<const double> demand,
                              std::span<const double> cost) {
  const std::size_t m = supply.size();
  const std::size_t n = demand.size();
  if (m == 0 || n == 0) throw std::invalid_argument("transport: empty supply or demand");
  if (cost.size() != m * n) throw std::invalid_argument("transport: cost matrix size");
  validate(supply, "supply");
  validate(demand, "demand");
  for (double c : cost) {
    if (!std::isfinite(c)) throw std::invalid_argument("transport: non-finite cost");
  }
  double total_supply = 0.0, total_demand = 0.0, max_cost = 0.0;
  for (double s : supply) total_supply += s;
  for (double d : demand) total_demand += d;
  for (double c : cost) max_cost = std::max(max_cost, std::abs(c));
  if (std::abs(total_supply - total_demand) > 1e-9 * std::max(1.0, total_supply)) {
    throw std::invalid_argument("transport: supply and demand totals differ");
  }

  // Northwest corner: m + n - 1 basic cells, some possibly degenerate.
  Basis basis(m, n);
  {
    std::vector<double> a(supply.begin(), supply.end());
    std::vector<double> b(demand.begin(), demand.end());
    std::size_t i = 0, j = 0;
    while (true) {
      const double x = std::min(a[i], b[j]);
      basis.set(i * n + j, x);
      a[i] -= x;
      b[j] -= x;
      if (i == m - 1 && j == n - 1) break;
      if (i == m - 1) {
        ++j;
      } else if (j == n - 1) {
        ++i;
      } else if (a[i] <= b[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  TransportPlan plan;
  const double tolerance = 1e-12 * std::max(1.0, max_cost);
  // Dantzig pricing first; Bland's smallest-index rule afterwards guarantees
  // termination under degeneracy.
  const std::size_t bland_after = 50 * (m + n);
  const std::size_t max_pivots = 5000 * (m + n) + m * n;
  std::vector<double> u, v;
  while (true) {
    basis.potentials(cost, u, v);
    const bool bland = plan.pivots >= bland_after;
    std::size_t entering = m * n;
    double best = -tolerance;
    for (std::size_t i = 0; i < m && !(bland && entering < m * n); ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t c = i * n + j;
        if (basis.basic(c)) continue;
        const double reduced = cost[c] - u[i] - v[j];
        if (reduced < best) {
          best = reduced;
          entering = c;
          if (bland) break;
        }
      }
    }
    if (entering == m * n) break;
    if (++plan.pivots > max_pivots) throw std::runtime_error("transport: pivot limit");

    const std::size_t row = entering / n;
    const std::size_t col = entering % n;
    // Path from row to col; signs alternate starting with '-' at the row end
    // (the path has an odd number of cells).
    const auto cycle = basis.path(row, col);
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leaving = m * n;
    for (std::size_t k = 0; k < cycle.size(); k += 2) {
      const double x = basis.flow(cycle[k]);
      if (x < theta || (x == theta && cycle[k] < leaving)) {
        theta = x;
        leaving = cycle[k];
      }
    }
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      basis.add(cycle[k], k % 2 == 0 ? -theta : theta);
    }
    basis.set(entering, theta);
    basis.drop(leaving);
  }

  for (std::size_t c = 0; c < m * n; ++c) {
    if (!basis.basic(c)) continue;
    const double x = std::max(0.0, basis.flow(c));
    if (x <= 0.0) continue;
    plan.flows.push_back({c / n, c % n, x});
    plan.cost += x * cost[c];
  }
  return plan;
}

}  // namespace allusion
