#ifndef QIF_SIMPLEX_HPP
#define QIF_SIMPLEX_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "qif/error.hpp"

namespace qif {

enum class Sense { Minimize, Maximize };
enum class Relation { LessEqual, Equal, GreaterEqual };
enum class LPStatus { Optimal, Infeasible, Unbounded, IterationLimit };

constexpr const char* to_string(LPStatus s) {
  switch (s) {
    case LPStatus::Optimal: return "optimal";
    case LPStatus::Infeasible: return "infeasible";
    case LPStatus::Unbounded: return "unbounded";
    case LPStatus::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

/// Dense linear program: optimize c'x subject to rows `a_i x (<=|=|>=) b_i`
/// and per-variable bounds (default [0, +inf)).
template <typename Scalar>
struct LinearProgram {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

  struct Constraint {
    RowVector coeffs;
    Relation relation;
    Scalar rhs;
  };
  struct Bounds {
    Scalar lower = 0;
    Scalar upper = std::numeric_limits<Scalar>::infinity();
  };

  LinearProgram() = default;
  explicit LinearProgram(Eigen::Index num_vars, Sense s = Sense::Minimize)
      : objective(Vector::Zero(num_vars)), sense(s), bounds(static_cast<std::size_t>(num_vars)) {}

  Eigen::Index num_variables() const { return objective.size(); }

  void add_constraint(RowVector coeffs, Relation rel, Scalar rhs) {
    if (coeffs.size() != num_variables()) {
      throw Error(ErrorKind::TypeMismatch, "constraint has " + std::to_string(coeffs.size()) +
                                               " coefficients for " + std::to_string(num_variables()) +
                                               " variables");
    }
    constraints.push_back({std::move(coeffs), rel, rhs});
  }

  void set_free(Eigen::Index j) { bounds[static_cast<std::size_t>(j)].lower = -std::numeric_limits<Scalar>::infinity(); }

  Vector objective;
  Sense sense = Sense::Minimize;
  std::vector<Constraint> constraints;
  std::vector<Bounds> bounds;
};

template <typename Scalar>
struct LPSolution {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  LPStatus status = LPStatus::Infeasible;
  Vector primal;
  /// Shadow prices: d(objective)/d(rhs_i) for each constraint, in input order.
  Vector duals;
  Scalar objective = 0;
  Scalar duality_gap = 0;
  Scalar primal_residual = 0;
  int iterations = 0;

  bool optimal() const { return status == LPStatus::Optimal; }
};

struct SimplexOptions {
  double tol = 1e-9;
  int max_iterations = 2'000'000;
  /// Rebuild the tableau from the original data after this many pivots.
  int refactor_every = 100;
  /// Tableau dump after each pivot when set.
  std::ostream* trace = nullptr;
};

namespace detail {

template <typename Scalar>
class SimplexTableau {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  SimplexTableau(Matrix a, Vector b, Vector cost, std::vector<Eigen::Index> basis, Eigen::Index first_artificial,
                 const SimplexOptions& opt)
      : a0_(a), b0_(b), cost_(std::move(cost)), basis_(std::move(basis)), first_artificial_(first_artificial), opt_(opt) {
    const Eigen::Index m = a.rows();
    const Eigen::Index n = a.cols();
    t_ = Matrix::Zero(m + 1, n + 1);
    t_.topLeftCorner(m, n) = a;
    t_.topRightCorner(m, 1) = b;
  }

  Eigen::Index rows() const { return t_.rows() - 1; }
  Eigen::Index cols() const { return t_.cols() - 1; }

  // Phase 1 minimizes the sum of artificials.
  LPStatus phase_one(int& iterations) {
    active_cost_ = Vector::Zero(cols());
    for (Eigen::Index j = first_artificial_; j < cols(); ++j) active_cost_(j) = 1;
    load_objective(active_cost_);
    LPStatus st = iterate(cols(), iterations);
    if (st != LPStatus::Optimal) return st;
    const Scalar scale = std::max<Scalar>(1, t_.topRightCorner(rows(), 1).cwiseAbs().maxCoeff());
    if (-t_(rows(), cols()) > Scalar(1e3) * opt_.tol * scale) return LPStatus::Infeasible;
    drive_out_artificials();
    return LPStatus::Optimal;
  }

  LPStatus phase_two(int& iterations) {
    active_cost_ = cost_;
    load_objective(active_cost_);
    return iterate(first_artificial_, iterations);
  }

  Vector basic_solution() const {
    Vector x = Vector::Zero(cols());
    for (Eigen::Index i = 0; i < rows(); ++i) x(basis_[static_cast<std::size_t>(i)]) = t_(i, cols());
    return x;
  }

  /// y with B'y = c_B for the final basis.
  Vector basis_duals() const {
    const Eigen::Index m = rows();
    Matrix basis_matrix(m, m);
    Vector cb(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const Eigen::Index j = basis_[static_cast<std::size_t>(i)];
      basis_matrix.col(i) = a0_.col(j);
      cb(i) = j < first_artificial_ ? cost_(j) : Scalar(0);
    }
    return basis_matrix.transpose().fullPivLu().solve(cb);
  }

 private:
  static constexpr Scalar kPivotShare = Scalar(1e-2);

  void load_objective(const Vector& c) {
    const Eigen::Index m = rows();
    t_.row(m).setZero();
    t_.row(m).head(cols()) = c.transpose();
    for (Eigen::Index i = 0; i < m; ++i) {
      const Scalar cb = c(basis_[static_cast<std::size_t>(i)]);
      if (cb != 0) t_.row(m) -= cb * t_.row(i);
    }
  }

  // Bland's rule: lowest-index improving column, ties in the ratio test broken
  // by the lowest basic variable index.
  LPStatus iterate(Eigen::Index allowed_cols, int& iterations) {
    const Eigen::Index m = rows();
    int since_refactor = 0;
    bool fresh = false;
    while (true) {
      if (since_refactor >= opt_.refactor_every) {
        refactor();
        since_refactor = 0;
      }
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < allowed_cols; ++j) {
        if (t_(m, j) < -opt_.tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) {
        if (fresh || since_refactor == 0) return LPStatus::Optimal;
        // Confirm optimality on a tableau rebuilt from the original data.
        refactor();
        since_refactor = 0;
        fresh = true;
        continue;
      }
      fresh = false;
      if (iterations >= opt_.max_iterations) return LPStatus::IterationLimit;

      // Minimum ratio first. Among rows tying on it, Bland's lowest basic
      // index, restricted to pivots within a factor of the largest tied pivot
      // (tiny pivots on degenerate rows blow the tableau up).
      Scalar best = std::numeric_limits<Scalar>::infinity();
      for (Eigen::Index i = 0; i < m; ++i) {
        const Scalar piv = t_(i, enter);
        if (piv > opt_.tol) best = std::min(best, std::max<Scalar>(t_(i, cols()), 0) / piv);
      }
      if (!std::isfinite(best)) return LPStatus::Unbounded;
      const Scalar tie = best + Scalar(1e-12) * (1 + best);
      Scalar max_piv = 0;
      for (Eigen::Index i = 0; i < m; ++i) {
        const Scalar piv = t_(i, enter);
        if (piv > opt_.tol && std::max<Scalar>(t_(i, cols()), 0) / piv <= tie) max_piv = std::max(max_piv, piv);
      }
      Eigen::Index leave = -1;
      for (Eigen::Index i = 0; i < m; ++i) {
        const Scalar piv = t_(i, enter);
        if (piv < kPivotShare * max_piv || piv <= opt_.tol) continue;
        if (std::max<Scalar>(t_(i, cols()), 0) / piv > tie) continue;
        if (leave < 0 || basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]) leave = i;
      }
      pivot(leave, enter);
      ++iterations;
      ++since_refactor;
    }
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    const Eigen::RowVectorX<Scalar> prow = t_.row(r);
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const Scalar f = t_(i, c);
      if (f != 0) t_.row(i) -= f * prow;
      if (i < rows() && t_(i, cols()) < 0 && t_(i, cols()) > -opt_.tol) t_(i, cols()) = 0;
    }
    basis_[static_cast<std::size_t>(r)] = c;
    if (opt_.trace) {
      *opt_.trace << "pivot row " << r << " col " << c << "\n" << t_ << "\n\n";
    }
  }

  // Tableau = B^-1 [A | b] for the current basis, objective row re-priced.
  void refactor() {
    const Eigen::Index m = rows();
    Matrix basis_matrix(m, m);
    for (Eigen::Index i = 0; i < m; ++i) basis_matrix.col(i) = a0_.col(basis_[static_cast<std::size_t>(i)]);
    const Eigen::PartialPivLU<Matrix> lu(basis_matrix);
    t_.topLeftCorner(m, cols()) = lu.solve(a0_);
    t_.topRightCorner(m, 1) = lu.solve(b0_);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (t_(i, cols()) < 0 && t_(i, cols()) > -opt_.tol) t_(i, cols()) = 0;
    }
    load_objective(active_cost_);
  }

  void drive_out_artificials() {
    for (Eigen::Index i = 0; i < rows(); ++i) {
      if (basis_[static_cast<std::size_t>(i)] < first_artificial_) continue;
      for (Eigen::Index j = 0; j < first_artificial_; ++j) {
        if (std::abs(t_(i, j)) > opt_.tol) {
          pivot(i, j);
          break;
        }
      }
      // A row with no usable column is redundant; its artificial stays basic at zero.
    }
  }

  Matrix a0_;
  Vector b0_;
  Matrix t_;
  Vector cost_;
  Vector active_cost_;
  std::vector<Eigen::Index> basis_;
  Eigen::Index first_artificial_;
  SimplexOptions opt_;
};

}  // namespace detail

/// Dense two-phase primal simplex with Bland's anti-cycling rule.
///
/// Free and bounded variables are reduced to non-negative ones (shift, mirror
/// or split); finite upper bounds become extra rows. Duals come from solving
/// B'y = c_B on the final basis, so they are shadow prices of the input rows.
template <typename Scalar>
LPSolution<Scalar> lp_solve(const LinearProgram<Scalar>& lp, const SimplexOptions& opt = {}) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();

  const Eigen::Index n = lp.num_variables();
  if (static_cast<Eigen::Index>(lp.bounds.size()) != n) {
    throw Error(ErrorKind::TypeMismatch, "bounds list does not match variable count");
  }

  // Variable substitution x_j = offset_j + sign_j * s_k (- s_{k+1} when split).
  struct VarMap {
    Eigen::Index col;
    Scalar sign;
    Scalar offset;
    bool split;
  };
  std::vector<VarMap> vmap(static_cast<std::size_t>(n));
  Eigen::Index ns = 0;
  std::vector<std::pair<Eigen::Index, Scalar>> upper_rows;  // (std col, width)
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& bd = lp.bounds[static_cast<std::size_t>(j)];
    if (bd.lower > bd.upper) {
      LPSolution<Scalar> sol;
      sol.status = LPStatus::Infeasible;
      return sol;
    }
    if (std::isfinite(bd.lower)) {
      vmap[static_cast<std::size_t>(j)] = {ns, 1, bd.lower, false};
      if (std::isfinite(bd.upper)) upper_rows.emplace_back(ns, bd.upper - bd.lower);
      ns += 1;
    } else if (std::isfinite(bd.upper)) {
      vmap[static_cast<std::size_t>(j)] = {ns, -1, bd.upper, false};
      ns += 1;
    } else {
      vmap[static_cast<std::size_t>(j)] = {ns, 1, 0, true};
      ns += 2;
    }
  }

  const Eigen::Index m_user = static_cast<Eigen::Index>(lp.constraints.size());
  const Eigen::Index m = m_user + static_cast<Eigen::Index>(upper_rows.size());
  Matrix a = Matrix::Zero(m, ns);
  Vector b(m);
  std::vector<Relation> rel(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m_user; ++i) {
    const auto& con = lp.constraints[static_cast<std::size_t>(i)];
    Scalar rhs = con.rhs;
    for (Eigen::Index j = 0; j < n; ++j) {
      const Scalar aij = con.coeffs(j);
      if (aij == 0) continue;
      const auto& vm = vmap[static_cast<std::size_t>(j)];
      rhs -= aij * vm.offset;
      a(i, vm.col) += aij * vm.sign;
      if (vm.split) a(i, vm.col + 1) -= aij;
    }
    b(i) = rhs;
    rel[static_cast<std::size_t>(i)] = con.relation;
  }
  for (std::size_t k = 0; k < upper_rows.size(); ++k) {
    const Eigen::Index i = m_user + static_cast<Eigen::Index>(k);
    a(i, upper_rows[k].first) = 1;
    b(i) = upper_rows[k].second;
    rel[static_cast<std::size_t>(i)] = Relation::LessEqual;
  }

  Vector cost = Vector::Zero(ns);
  Scalar cost_offset = 0;
  const Scalar dir = lp.sense == Sense::Minimize ? Scalar(1) : Scalar(-1);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Scalar cj = dir * lp.objective(j);
    const auto& vm = vmap[static_cast<std::size_t>(j)];
    cost_offset += cj * vm.offset;
    cost(vm.col) += cj * vm.sign;
    if (vm.split) cost(vm.col + 1) -= cj;
  }

  // Non-negative right-hand sides; remember flips for the duals.
  Vector row_sign = Vector::Ones(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (b(i) < 0) {
      a.row(i) *= -1;
      b(i) = -b(i);
      row_sign(i) = -1;
      auto& r = rel[static_cast<std::size_t>(i)];
      if (r == Relation::LessEqual) r = Relation::GreaterEqual;
      else if (r == Relation::GreaterEqual) r = Relation::LessEqual;
    }
  }

  Eigen::Index num_slack = 0;
  Eigen::Index num_art = 0;
  for (auto r : rel) {
    if (r != Relation::Equal) ++num_slack;
    if (r != Relation::LessEqual) ++num_art;
  }
  const Eigen::Index first_slack = ns;
  const Eigen::Index first_art = ns + num_slack;
  const Eigen::Index total = first_art + num_art;

  Matrix full = Matrix::Zero(m, total);
  full.leftCols(ns) = a;
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  Eigen::Index s = first_slack;
  Eigen::Index t = first_art;
  for (Eigen::Index i = 0; i < m; ++i) {
    switch (rel[static_cast<std::size_t>(i)]) {
      case Relation::LessEqual:
        full(i, s) = 1;
        basis[static_cast<std::size_t>(i)] = s++;
        break;
      case Relation::GreaterEqual:
        full(i, s++) = -1;
        full(i, t) = 1;
        basis[static_cast<std::size_t>(i)] = t++;
        break;
      case Relation::Equal:
        full(i, t) = 1;
        basis[static_cast<std::size_t>(i)] = t++;
        break;
    }
  }
  Vector full_cost = Vector::Zero(total);
  full_cost.head(ns) = cost;

  detail::SimplexTableau<Scalar> tab(full, b, full_cost, basis, first_art, opt);
  LPSolution<Scalar> sol;
  if (num_art > 0) {
    sol.status = tab.phase_one(sol.iterations);
    if (sol.status != LPStatus::Optimal) return sol;
  }
  sol.status = tab.phase_two(sol.iterations);
  if (sol.status != LPStatus::Optimal) return sol;

  const Vector xs = tab.basic_solution();
  sol.primal = Vector(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& vm = vmap[static_cast<std::size_t>(j)];
    Scalar v = vm.offset + vm.sign * xs(vm.col);
    if (vm.split) v -= xs(vm.col + 1);
    sol.primal(j) = v;
  }
  sol.objective = lp.objective.dot(sol.primal);

  const Vector y = tab.basis_duals();
  sol.duals = Vector(m_user);
  for (Eigen::Index i = 0; i < m_user; ++i) sol.duals(i) = dir * row_sign(i) * y(i);

  const Scalar primal_std = full_cost.dot(xs);
  const Scalar dual_std = b.dot(y);
  sol.duality_gap = std::abs(primal_std - dual_std);

  Scalar resid = 0;
  for (Eigen::Index i = 0; i < m_user; ++i) {
    const auto& con = lp.constraints[static_cast<std::size_t>(i)];
    const Scalar lhs = con.coeffs.dot(sol.primal.transpose());
    Scalar viol = 0;
    switch (con.relation) {
      case Relation::LessEqual: viol = lhs - con.rhs; break;
      case Relation::GreaterEqual: viol = con.rhs - lhs; break;
      case Relation::Equal: viol = std::abs(lhs - con.rhs); break;
    }
    resid = std::max(resid, viol);
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& bd = lp.bounds[static_cast<std::size_t>(j)];
    if (std::isfinite(bd.lower)) resid = std::max(resid, bd.lower - sol.primal(j));
    if (std::isfinite(bd.upper)) resid = std::max(resid, sol.primal(j) - bd.upper);
  }
  sol.primal_residual = std::max<Scalar>(resid, 0);
  (void)cost_offset;
  (void)inf;
  return sol;
}

}  // namespace qif

#endif  // QIF_SIMPLEX_HPP
