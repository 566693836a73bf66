#include "mgbary/simplex.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

namespace mgbary::lp {

std::size_t LinearProgram::add_column(double cost, std::span<const Entry> entries) {
  for (const Entry& e : entries) {
    if (e.row >= rhs_.size()) throw std::out_of_range("LP column references a missing row");
    if (e.value != 0.0) entries_.push_back(e);
  }
  costs_.push_back(cost);
  starts_.push_back(entries_.size());
  return costs_.size() - 1;
}

namespace {

constexpr std::size_t kNotBasic = std::numeric_limits<std::size_t>::max();

class RevisedSimplex {
 public:
  RevisedSimplex(const LinearProgram& program, const SimplexOptions& options)
      : lp_(program),
        opt_(options),
        m_(program.num_rows()),
        n_(program.num_columns()),
        sign_(m_, 1.0),
        rhs_(m_),
        head_(m_),
        position_(n_ + m_, kNotBasic),
        x_basic_(m_, 0.0),
        cost_(n_ + m_, 0.0) {
    if (opt_.max_iterations == 0) opt_.max_iterations = 50 * (m_ + n_) + 1000;
    for (std::size_t i = 0; i < m_; ++i) {
      if (lp_.rhs()[i] < 0.0) sign_[i] = -1.0;
      rhs_[i] = sign_[i] * lp_.rhs()[i];
    }
    double cmax = 1.0;
    for (std::size_t j = 0; j < n_; ++j) cmax = std::max(cmax, std::abs(lp_.cost(j)));
    dual_tol_ = opt_.optimality_tolerance * cmax;
    double bsum = 0.0;
    for (double b : rhs_) bsum += b;
    primal_tol_ = opt_.feasibility_tolerance * std::max(1.0, bsum);
  }

  LpResult run() {
    LpResult result;
    for (std::size_t i = 0; i < m_; ++i) {
      head_[i] = n_ + i;
      position_[n_ + i] = i;
    }
    if (!refactor()) return result;

    // Phase I: minimise the sum of artificials.
    for (std::size_t j = 0; j < n_ + m_; ++j) cost_[j] = j >= n_ ? 1.0 : 0.0;
    phase_two_ = false;
    LpStatus s = iterate(result.iterations);
    if (s != LpStatus::kOptimal) {
      result.status = s;
      return result;
    }
    double infeasibility = 0.0;
    for (std::size_t r = 0; r < m_; ++r)
      if (head_[r] >= n_) infeasibility += std::abs(x_basic_[r]);
    if (infeasibility > primal_tol_) {
      result.status = LpStatus::kInfeasible;
      return result;
    }

    // Phase II: artificials are fixed at zero and never re-enter.
    for (std::size_t j = 0; j < n_ + m_; ++j) cost_[j] = j < n_ ? lp_.cost(j) : 0.0;
    phase_two_ = true;
    s = iterate(result.iterations);
    result.status = s;
    if (s != LpStatus::kOptimal) return result;

    result.x.assign(n_, 0.0);
    for (std::size_t r = 0; r < m_; ++r)
      if (head_[r] < n_) result.x[head_[r]] = std::max(0.0, x_basic_[r]);
    result.objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j) result.objective += lp_.cost(j) * result.x[j];
    Eigen::VectorXd y = duals();
    result.duals.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) result.duals[i] = sign_[i] * y[static_cast<Eigen::Index>(i)];
    return result;
  }

 private:
  struct Eta {
    std::size_t row;
    double pivot_inverse;
    std::vector<std::pair<std::size_t, double>> others;
  };

  template <class Fn>
  void for_column(std::size_t j, Fn&& fn) const {
    if (j >= n_) {
      fn(j - n_, 1.0);
      return;
    }
    for (const Entry& e : lp_.column(j)) fn(e.row, sign_[e.row] * e.value);
  }

  bool refactor() {
    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t r = 0; r < m_; ++r)
      for_column(head_[r], [&](std::size_t row, double v) {
        triplets.emplace_back(static_cast<int>(row), static_cast<int>(r), v);
      });
    Eigen::SparseMatrix<double> basis(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_));
    basis.setFromTriplets(triplets.begin(), triplets.end());
    basis.makeCompressed();
    lu_.analyzePattern(basis);
    lu_.factorize(basis);
    if (lu_.info() != Eigen::Success) return false;
    etas_.clear();

    Eigen::VectorXd b(static_cast<Eigen::Index>(m_));
    for (std::size_t i = 0; i < m_; ++i) b[static_cast<Eigen::Index>(i)] = rhs_[i];
    Eigen::VectorXd xb = ftran(b);
    for (std::size_t r = 0; r < m_; ++r) x_basic_[r] = xb[static_cast<Eigen::Index>(r)];
    return true;
  }

  Eigen::VectorXd ftran(const Eigen::VectorXd& a) const {
    Eigen::VectorXd x = lu_.solve(a);
    for (const Eta& eta : etas_) {
      const double xr = x[static_cast<Eigen::Index>(eta.row)];
      if (xr == 0.0) continue;
      x[static_cast<Eigen::Index>(eta.row)] = xr * eta.pivot_inverse;
      for (const auto& [i, v] : eta.others) x[static_cast<Eigen::Index>(i)] += v * xr;
    }
    return x;
  }

  Eigen::VectorXd btran(Eigen::VectorXd c) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double acc = c[static_cast<Eigen::Index>(it->row)] * it->pivot_inverse;
      for (const auto& [i, v] : it->others) acc += c[static_cast<Eigen::Index>(i)] * v;
      c[static_cast<Eigen::Index>(it->row)] = acc;
    }
    return lu_.transpose().solve(c);
  }

  Eigen::VectorXd duals() const {
    Eigen::VectorXd cb(static_cast<Eigen::Index>(m_));
    for (std::size_t r = 0; r < m_; ++r) cb[static_cast<Eigen::Index>(r)] = cost_[head_[r]];
    return btran(cb);
  }

  bool eligible(std::size_t j) const { return position_[j] == kNotBasic && !(phase_two_ && j >= n_); }

  double reduced_cost(std::size_t j, const Eigen::VectorXd& y) const {
    double d = cost_[j];
    for_column(j, [&](std::size_t row, double v) { d -= y[static_cast<Eigen::Index>(row)] * v; });
    return d;
  }

  // Entering variable or kNotBasic when the current basis is optimal.
  std::size_t price(const Eigen::VectorXd& y) const {
    std::size_t best = kNotBasic;
    double best_d = -dual_tol_;
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      if (!eligible(j)) continue;
      const double d = reduced_cost(j, y);
      if (bland_) {
        if (d < -dual_tol_) return j;
      } else if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    return best;
  }

  bool fixed_at_zero(std::size_t var) const { return phase_two_ && var >= n_; }

  // Leaving basis position or kNotBasic if the direction is unbounded.
  std::size_t ratio_test(const Eigen::VectorXd& alpha) const {
    const double piv = opt_.pivot_tolerance;
    if (bland_) {
      std::size_t leave = kNotBasic;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m_; ++r) {
        const double a = alpha[static_cast<Eigen::Index>(r)];
        double ratio;
        if (fixed_at_zero(head_[r])) {
          if (std::abs(a) <= piv) continue;
          ratio = 0.0;
        } else {
          if (a <= piv) continue;
          ratio = std::max(0.0, x_basic_[r]) / a;
        }
        if (ratio < best - 1e-14 || (ratio <= best + 1e-14 && leave != kNotBasic && head_[r] < head_[leave])) {
          best = std::min(best, ratio);
          leave = r;
        }
      }
      return leave;
    }
    // Harris two-pass: relax bounds by the feasibility tolerance, then pick
    // the largest pivot among the candidates within the relaxed step.
    double theta_max = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < m_; ++r) {
      const double a = alpha[static_cast<Eigen::Index>(r)];
      if (fixed_at_zero(head_[r])) {
        if (std::abs(a) > piv) theta_max = std::min(theta_max, (std::abs(x_basic_[r]) + opt_.feasibility_tolerance) / std::abs(a));
      } else if (a > piv) {
        theta_max = std::min(theta_max, (std::max(0.0, x_basic_[r]) + opt_.feasibility_tolerance) / a);
      }
    }
    if (!std::isfinite(theta_max)) return kNotBasic;
    std::size_t leave = kNotBasic;
    double best_pivot = 0.0;
    for (std::size_t r = 0; r < m_; ++r) {
      const double a = alpha[static_cast<Eigen::Index>(r)];
      double ratio;
      double magnitude;
      if (fixed_at_zero(head_[r])) {
        if (std::abs(a) <= piv) continue;
        ratio = 0.0;
        magnitude = std::abs(a) * 1e3;  // evict artificials first
      } else {
        if (a <= piv) continue;
        ratio = std::max(0.0, x_basic_[r]) / a;
        magnitude = a;
      }
      if (ratio <= theta_max && magnitude > best_pivot) {
        best_pivot = magnitude;
        leave = r;
      }
    }
    return leave;
  }

  void pivot(std::size_t entering, std::size_t leave, const Eigen::VectorXd& alpha) {
    const double a_r = alpha[static_cast<Eigen::Index>(leave)];
    double theta = fixed_at_zero(head_[leave]) ? 0.0 : std::max(0.0, x_basic_[leave]) / a_r;
    for (std::size_t r = 0; r < m_; ++r) {
      if (r == leave) continue;
      x_basic_[r] -= theta * alpha[static_cast<Eigen::Index>(r)];
      if (x_basic_[r] < 0.0 && x_basic_[r] > -opt_.feasibility_tolerance && !fixed_at_zero(head_[r]))
        x_basic_[r] = 0.0;
    }
    x_basic_[leave] = theta;
    last_step_ = theta;

    Eta eta{leave, 1.0 / a_r, {}};
    for (std::size_t r = 0; r < m_; ++r) {
      const double a = alpha[static_cast<Eigen::Index>(r)];
      if (r != leave && a != 0.0) eta.others.emplace_back(r, -a / a_r);
    }
    etas_.push_back(std::move(eta));

    position_[head_[leave]] = kNotBasic;
    head_[leave] = entering;
    position_[entering] = leave;
  }

  LpStatus iterate(std::size_t& iterations) {
    std::size_t degenerate_run = 0;
    const std::size_t bland_trigger = std::max<std::size_t>(50, m_ / 4);
    bland_ = false;
    bool fresh = false;
    while (true) {
      if (iterations >= opt_.max_iterations) return LpStatus::kIterationLimit;
      Eigen::VectorXd y = duals();
      const std::size_t entering = price(y);
      if (entering == kNotBasic) {
        // Confirm optimality on a fresh factorisation before stopping.
        if (fresh || etas_.empty()) return LpStatus::kOptimal;
        if (!refactor()) return LpStatus::kNumericalFailure;
        fresh = true;
        continue;
      }
      fresh = false;
      Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
      for_column(entering, [&](std::size_t row, double v) { a[static_cast<Eigen::Index>(row)] += v; });
      const Eigen::VectorXd alpha = ftran(a);
      const std::size_t leave = ratio_test(alpha);
      if (leave == kNotBasic) return LpStatus::kUnbounded;
      pivot(entering, leave, alpha);
      ++iterations;

      if (last_step_ <= 1e-14) {
        if (++degenerate_run >= bland_trigger) bland_ = true;
      } else {
        degenerate_run = 0;
        bland_ = false;
      }
      if (etas_.size() >= opt_.refactor_interval && !refactor()) return LpStatus::kNumericalFailure;
    }
  }

  const LinearProgram& lp_;
  SimplexOptions opt_;
  std::size_t m_;
  std::size_t n_;
  std::vector<double> sign_;
  std::vector<double> rhs_;
  std::vector<std::size_t> head_;
  std::vector<std::size_t> position_;
  std::vector<double> x_basic_;
  std::vector<double> cost_;
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
  double dual_tol_ = 0.0;
  double primal_tol_ = 0.0;
  double last_step_ = 0.0;
  bool phase_two_ = false;
  bool bland_ = false;
};

}  // namespace

LpResult solve(const LinearProgram& program, const SimplexOptions& options) {
  if (program.num_rows() == 0) {
    LpResult r;
    r.status = LpStatus::kOptimal;
    r.x.assign(program.num_columns(), 0.0);
    return r;
  }
  RevisedSimplex simplex(program, options);
  return simplex.run();
}

}  // namespace mgbary::lp
