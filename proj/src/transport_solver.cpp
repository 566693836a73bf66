#include "mgbary/transport_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mgbary {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kResidualEps = 1e-15;
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

}  // namespace

TransportSolution solve_transport(std::span<const double> supply, std::span<const double> demand,
                                  std::span<const double> cost) {
  const std::size_t n = supply.size();
  const std::size_t m = demand.size();
  if (cost.size() != n * m) throw std::invalid_argument("cost matrix has the wrong size");

  std::vector<double> left(supply.begin(), supply.end());
  std::vector<double> need(demand.begin(), demand.end());
  std::vector<double> flow(n * m, 0.0);

  // Nodes 0..n-1 are sources, n..n+m-1 sinks. Reduced cost of a residual arc
  // u->v is c(u,v) + pot[u] - pot[v] >= 0.
  std::vector<double> pot(n + m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    double best = kInf;
    for (std::size_t i = 0; i < n; ++i) best = std::min(best, cost[i * m + j]);
    pot[n + j] = n > 0 ? best : 0.0;
  }

  std::vector<double> dist(n + m);
  std::vector<std::size_t> pred(n + m);
  std::vector<char> done(n + m);

  auto open = [](const std::vector<double>& v) {
    return std::any_of(v.begin(), v.end(), [](double x) { return x > kResidualEps; });
  };

  while (open(left) && open(need)) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(pred.begin(), pred.end(), kNone);
    std::fill(done.begin(), done.end(), 0);
    for (std::size_t i = 0; i < n; ++i)
      if (left[i] > kResidualEps) dist[i] = 0.0;

    std::size_t sink = kNone;
    while (true) {
      std::size_t u = kNone;
      for (std::size_t v = 0; v < n + m; ++v)
        if (!done[v] && dist[v] < kInf && (u == kNone || dist[v] < dist[u])) u = v;
      if (u == kNone) break;
      done[u] = 1;
      if (u >= n && need[u - n] > kResidualEps) {
        sink = u;
        break;
      }
      if (u < n) {
        for (std::size_t j = 0; j < m; ++j) {
          const std::size_t v = n + j;
          if (done[v]) continue;
          const double rc = std::max(0.0, cost[u * m + j] + pot[u] - pot[v]);
          if (dist[u] + rc < dist[v]) {
            dist[v] = dist[u] + rc;
            pred[v] = u;
          }
        }
      } else {
        const std::size_t j = u - n;
        for (std::size_t i = 0; i < n; ++i) {
          if (done[i] || flow[i * m + j] <= kResidualEps) continue;
          const double rc = std::max(0.0, -cost[i * m + j] + pot[u] - pot[i]);
          if (dist[u] + rc < dist[i]) {
            dist[i] = dist[u] + rc;
            pred[i] = u;
          }
        }
      }
    }
    if (sink == kNone) throw std::runtime_error("transport problem is unbalanced");

    const double reach = dist[sink];
    for (std::size_t v = 0; v < n + m; ++v) pot[v] += std::min(dist[v], reach);

    double push = need[sink - n];
    std::size_t v = sink;
    while (pred[v] != kNone) {
      const std::size_t u = pred[v];
      if (u >= n) push = std::min(push, flow[v * m + (u - n)]);  // reverse arc u(sink)->v(source)
      v = u;
    }
    push = std::min(push, left[v]);

    v = sink;
    while (pred[v] != kNone) {
      const std::size_t u = pred[v];
      if (u < n)
        flow[u * m + (v - n)] += push;
      else
        flow[v * m + (u - n)] -= push;
      v = u;
    }
    left[v] -= push;
    need[sink - n] -= push;
  }

  TransportSolution sol;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const double f = flow[i * m + j];
      if (f > kResidualEps) {
        sol.flows.push_back({i, j, f});
        sol.cost += f * cost[i * m + j];
      }
    }
  return sol;
}

}  // namespace mgbary
