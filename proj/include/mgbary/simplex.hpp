#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace mgbary::lp {

struct Entry {
  std::size_t row = 0;
  double value = 0.0;
};

// min c^T x  subject to  A x = b, x >= 0, with A stored column-wise.
class LinearProgram {
 public:
  explicit LinearProgram(std::size_t num_rows) : rhs_(num_rows, 0.0) {}

  std::size_t num_rows() const { return rhs_.size(); }
  std::size_t num_columns() const { return costs_.size(); }

  std::size_t add_column(double cost, std::span<const Entry> entries);
  void set_rhs(std::size_t row, double value) { rhs_.at(row) = value; }

  double cost(std::size_t j) const { return costs_[j]; }
  std::span<const Entry> column(std::size_t j) const {
    return {entries_.data() + starts_[j], entries_.data() + starts_[j + 1]};
  }
  const std::vector<double>& rhs() const { return rhs_; }

 private:
  std::vector<double> costs_;
  std::vector<std::size_t> starts_{0};
  std::vector<Entry> entries_;
  std::vector<double> rhs_;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit, kNumericalFailure };

struct LpResult {
  LpStatus status = LpStatus::kNumericalFailure;
  double objective = 0.0;
  std::vector<double> x;
  std::vector<double> duals;
  std::size_t iterations = 0;
};

struct SimplexOptions {
  std::size_t max_iterations = 0;  // 0 selects 50 * (rows + columns)
  std::size_t refactor_interval = 64;
  double feasibility_tolerance = 1e-9;
  double optimality_tolerance = 1e-10;
  double pivot_tolerance = 1e-9;
};

// Two-phase primal revised simplex. Phase I starts from an all-artificial
// basis; artificial variables that stay basic on redundant rows are held at
// zero in Phase II. Pricing is Dantzig's rule, switching to Bland's rule
// during long runs of degenerate pivots.
LpResult solve(const LinearProgram& program, const SimplexOptions& options = {});

}  // namespace mgbary::lp
