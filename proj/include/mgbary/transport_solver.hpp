#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mgbary {

struct Flow {
  std::size_t source = 0;
  std::size_t target = 0;
  double mass = 0.0;
};

struct TransportSolution {
  std::vector<Flow> flows;  // sorted by (source, target), positive masses only
  double cost = 0.0;
};

// Exact balanced transportation problem
//   min sum_ij cost[i * m + j] * f_ij  s.t.  row sums = supply, column sums = demand
// solved by successive shortest augmenting paths with Johnson potentials on
// the complete bipartite residual graph. Ties are broken by smallest node
// index, so the returned plan is a deterministic function of the input.
TransportSolution solve_transport(std::span<const double> supply, std::span<const double> demand,
                                  std::span<const double> cost);

}  // namespace mgbary
