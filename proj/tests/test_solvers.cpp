#include <gtest/gtest.h>

#include <random>

#include "mgbary/simplex.hpp"
#include "mgbary/transport_solver.hpp"
#include "support.hpp"

using namespace mgbary;
using testing_support::lp_transport_cost;
using testing_support::permutation_w2;

namespace {

lp::LinearProgram dense(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                        const std::vector<double>& c) {
  lp::LinearProgram p(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) p.set_rhs(i, b[i]);
  for (std::size_t j = 0; j < c.size(); ++j) {
    std::vector<lp::Entry> col;
    for (std::size_t i = 0; i < b.size(); ++i)
      if (a[i][j] != 0.0) col.push_back({i, a[i][j]});
    p.add_column(c[j], col);
  }
  return p;
}

}  // namespace

// min -x - y  s.t.  x + 2y + s1 = 4,  3x + y + s2 = 6; optimum at (8/5, 6/5).
TEST(Simplex, SmallStandardForm) {
  const auto p = dense({{1, 2, 1, 0}, {3, 1, 0, 1}}, {4, 6}, {-1, -1, 0, 0});
  const auto r = lp::solve(p);
  ASSERT_EQ(r.status, lp::LpStatus::kOptimal);
  EXPECT_NEAR(r.objective, -14.0 / 5.0, 1e-12);
  EXPECT_NEAR(r.x[0], 8.0 / 5.0, 1e-12);
  EXPECT_NEAR(r.x[1], 6.0 / 5.0, 1e-12);
}

TEST(Simplex, NegativeRightHandSide) {
  // -x - y = -2 with x, y >= 0, min x + 3y gives x = 2.
  const auto p = dense({{-1, -1}}, {-2}, {1, 3});
  const auto r = lp::solve(p);
  ASSERT_EQ(r.status, lp::LpStatus::kOptimal);
  EXPECT_NEAR(r.x[0], 2.0, 1e-12);
  EXPECT_NEAR(r.objective, 2.0, 1e-12);
}

TEST(Simplex, DetectsInfeasible) {
  const auto p = dense({{1, 1}, {1, 1}}, {1, 2}, {1, 1});
  EXPECT_EQ(lp::solve(p).status, lp::LpStatus::kInfeasible);
}

TEST(Simplex, DetectsUnbounded) {
  const auto p = dense({{1, -1}}, {1}, {-1, 0});
  EXPECT_EQ(lp::solve(p).status, lp::LpStatus::kUnbounded);
}

TEST(Simplex, RedundantRowsAndDegeneracy) {
  // Transportation constraints are rank deficient by one.
  std::vector<double> a = {0.5, 0.5}, b = {0.5, 0.5};
  const double v = lp_transport_cost(a, b, [](std::size_t i, std::size_t j) { return i == j ? 0.0 : 1.0; });
  EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(Simplex, DualsCertifyOptimality) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 4, n = 9;
    std::vector<std::vector<double>> a(m, std::vector<double>(n));
    std::vector<double> x0(n), c(n), b(m, 0.0);
    for (auto& row : a)
      for (auto& v : row) v = u(rng);
    for (auto& v : x0) v = u(rng);
    for (auto& v : c) v = u(rng);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) b[i] += a[i][j] * x0[j];
    const auto r = lp::solve(dense(a, b, c));
    ASSERT_EQ(r.status, lp::LpStatus::kOptimal);
    double dual_obj = 0.0;
    for (std::size_t i = 0; i < m; ++i) dual_obj += r.duals[i] * b[i];
    EXPECT_NEAR(dual_obj, r.objective, 1e-9);
    for (std::size_t j = 0; j < n; ++j) {
      double reduced = c[j];
      for (std::size_t i = 0; i < m; ++i) reduced -= r.duals[i] * a[i][j];
      EXPECT_GE(reduced, -1e-9);
      EXPECT_GE(r.x[j], -1e-12);
    }
  }
}

TEST(Transport, MatchesPermutationsOnUniformMarginals) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 5;
    std::vector<double> cost(n * n);
    for (auto& c : cost) c = u(rng);
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    const auto sol = solve_transport(w, w, cost);
    EXPECT_NEAR(sol.cost, permutation_w2(cost, n), 1e-12);
  }
}

TEST(Transport, MatchesSimplexOnGeneralMarginals) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 7, m = 1 + (trial * 3) % 6;
    auto a = testing_support::random_masses(n, rng), b = testing_support::random_masses(m, rng);
    double sa = 0, sb = 0;
    for (double x : a) sa += x;
    for (double x : b) sb += x;
    for (double& x : a) x /= sa;
    for (double& x : b) x /= sb;
    std::vector<double> cost(n * m);
    for (auto& c : cost) c = u(rng);
    const auto sol = solve_transport(a, b, cost);
    EXPECT_NEAR(sol.cost, lp_transport_cost(a, b, [&](std::size_t i, std::size_t j) { return cost[i * m + j]; }),
                1e-12);

    std::vector<double> rows(n, 0.0), cols(m, 0.0);
    for (const auto& f : sol.flows) {
      EXPECT_GT(f.mass, 0.0);
      rows[f.source] += f.mass;
      cols[f.target] += f.mass;
    }
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(rows[i], a[i], 1e-12);
    for (std::size_t j = 0; j < m; ++j) EXPECT_NEAR(cols[j], b[j], 1e-12);
  }
}

TEST(Transport, DeterministicOnTies) {
  const std::vector<double> w = {0.5, 0.5};
  const std::vector<double> cost = {1, 1, 1, 1};
  const auto a = solve_transport(w, w, cost);
  const auto b = solve_transport(w, w, cost);
  ASSERT_EQ(a.flows.size(), b.flows.size());
  for (std::size_t i = 0; i < a.flows.size(); ++i) {
    EXPECT_EQ(a.flows[i].source, b.flows[i].source);
    EXPECT_EQ(a.flows[i].target, b.flows[i].target);
    EXPECT_EQ(a.flows[i].mass, b.flows[i].mass);
  }
}
