#ifndef QIF_MINIMAX_HPP
#define QIF_MINIMAX_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qif/error.hpp"
#include "qif/simplex.hpp"

namespace qif {

struct SolverDiagnostics {
  std::string solver;
  Eigen::Index lp_rows = 0;
  Eigen::Index lp_cols = 0;
  int iterations = 0;
  double duality_gap = 0;
  double primal_residual = 0;
};

template <typename Scalar>
struct MatrixGameSolution {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Scalar value = 0;
  Vector defender;  // row minimizer
  Vector attacker;  // column maximizer
  SolverDiagnostics diagnostics;
};

namespace detail {

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> to_distribution(Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v) {
  v = v.cwiseMax(Scalar(0));
  const Scalar s = v.sum();
  if (s > 0) v /= s;
  return v;
}

template <typename Scalar>
void fill_diagnostics(SolverDiagnostics& d, const LinearProgram<Scalar>& lp, const LPSolution<Scalar>& sol,
                      const char* name) {
  d.solver = name;
  d.lp_rows = static_cast<Eigen::Index>(lp.constraints.size());
  d.lp_cols = lp.num_variables();
  d.iterations = sol.iterations;
  d.duality_gap = static_cast<double>(sol.duality_gap);
  d.primal_residual = static_cast<double>(sol.primal_residual);
}

}  // namespace detail

/// Zero-sum game, rows minimize, columns maximize.
/// min v s.t. (delta' M)_j <= v for all j, sum delta = 1; the column strategy
/// is read off the duals of the per-column rows.
template <typename Scalar>
MatrixGameSolution<Scalar> solve_matrix_game(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m,
                                             const SimplexOptions& opt = {}) {
  using RowVector = typename LinearProgram<Scalar>::RowVector;
  const Eigen::Index nr = m.rows();
  const Eigen::Index nc = m.cols();
  if (nr == 0 || nc == 0) throw Error(ErrorKind::TypeMismatch, "empty payoff matrix");

  LinearProgram<Scalar> lp(nr + 1, Sense::Minimize);
  lp.objective(nr) = 1;
  lp.set_free(nr);
  for (Eigen::Index j = 0; j < nc; ++j) {
    RowVector r(nr + 1);
    r.head(nr) = m.col(j).transpose();
    r(nr) = -1;
    lp.add_constraint(std::move(r), Relation::LessEqual, 0);
  }
  RowVector ones = RowVector::Ones(nr + 1);
  ones(nr) = 0;
  lp.add_constraint(std::move(ones), Relation::Equal, 1);

  const auto sol = lp_solve(lp, opt);
  if (!sol.optimal()) throw Error(ErrorKind::SolverFailure, std::string("matrix game LP ") + to_string(sol.status));

  MatrixGameSolution<Scalar> out;
  out.value = sol.objective;
  out.defender = detail::to_distribution<Scalar>(sol.primal.head(nr));
  out.attacker = detail::to_distribution<Scalar>(-sol.duals.head(nc));
  detail::fill_diagnostics(out.diagnostics, lp, sol, "matrix-game-lp");
  return out;
}

template <typename Scalar>
struct ClosedForm2x2 {
  Scalar value;
  Scalar defender0;  // probability of row 0
  Scalar attacker0;  // probability of column 0
};

/// Indifference formulas for a 2x2 game; nullopt when degenerate or when a
/// probability falls outside [0, 1].
template <typename Scalar>
std::optional<ClosedForm2x2<Scalar>> closed_form_2x2(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& u) {
  if (u.rows() != 2 || u.cols() != 2) throw Error(ErrorKind::TypeMismatch, "closed form needs a 2x2 matrix");
  const Scalar den = u(0, 0) - u(0, 1) - u(1, 0) + u(1, 1);
  if (den == 0) return std::nullopt;
  const Scalar d = (u(1, 1) - u(1, 0)) / den;
  const Scalar a = (u(1, 1) - u(0, 1)) / den;
  if (d < 0 || d > 1 || a < 0 || a > 1) return std::nullopt;
  const Scalar value = a * u(0, 0) + (1 - a) * u(0, 1);
  return ClosedForm2x2<Scalar>{value, d, a};
}

/// min over delta of max over a of f_a(delta), f_a(delta) = sum_y max_w (P_{a,y} delta)_w.
/// pieces[a][y] is a W x D block. Solved as one epigraph LP; the attacker
/// mixture is read off the duals of the per-a rows.
template <typename Scalar>
MatrixGameSolution<Scalar> solve_convex_linear_game(
    const std::vector<std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>>& pieces,
    const SimplexOptions& opt = {}) {
  using RowVector = typename LinearProgram<Scalar>::RowVector;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (pieces.empty()) throw Error(ErrorKind::TypeMismatch, "no attacker actions");
  Eigen::Index nd = -1;
  Eigen::Index nt = 0;
  for (const auto& per_a : pieces) {
    for (const auto& blk : per_a) {
      if (nd < 0) nd = blk.cols();
      if (blk.cols() != nd) throw Error(ErrorKind::TypeMismatch, "pieces disagree on the number of defender actions");
    }
    nt += static_cast<Eigen::Index>(per_a.size());
  }
  if (nd <= 0) throw Error(ErrorKind::TypeMismatch, "no defender actions");

  const Eigen::Index nvar = nd + nt + 1;
  const Eigen::Index z = nd + nt;
  LinearProgram<Scalar> lp(nvar, Sense::Minimize);
  lp.objective(z) = 1;
  for (Eigen::Index k = nd; k < nvar; ++k) lp.set_free(k);

  Eigen::Index t = nd;
  std::vector<Eigen::Index> t_of_a;
  for (const auto& per_a : pieces) {
    t_of_a.push_back(t);
    for (const Matrix& blk : per_a) {
      // Pieces dominated entrywise by another piece never bind.
      for (Eigen::Index w = 0; w < blk.rows(); ++w) {
        bool dominated = false;
        for (Eigen::Index w2 = 0; w2 < blk.rows() && !dominated; ++w2) {
          if (w2 == w) continue;
          const bool ge = (blk.row(w2).array() >= blk.row(w).array()).all();
          const bool eq = blk.row(w2) == blk.row(w);
          dominated = ge && (!eq || w2 < w);
        }
        if (dominated) continue;
        RowVector r = RowVector::Zero(nvar);
        r.head(nd) = blk.row(w);
        r(t) = -1;
        lp.add_constraint(std::move(r), Relation::LessEqual, 0);
      }
      if (blk.rows() == 0) {
        RowVector r = RowVector::Zero(nvar);
        r(t) = -1;
        lp.add_constraint(std::move(r), Relation::LessEqual, 0);
      }
      ++t;
    }
  }
  const auto first_attacker_row = static_cast<Eigen::Index>(lp.constraints.size());
  for (std::size_t a = 0; a < pieces.size(); ++a) {
    RowVector r = RowVector::Zero(nvar);
    for (std::size_t y = 0; y < pieces[a].size(); ++y) r(t_of_a[a] + static_cast<Eigen::Index>(y)) = 1;
    r(z) = -1;
    lp.add_constraint(std::move(r), Relation::LessEqual, 0);
  }
  RowVector ones = RowVector::Zero(nvar);
  ones.head(nd).setOnes();
  lp.add_constraint(std::move(ones), Relation::Equal, 1);

  const auto sol = lp_solve(lp, opt);
  if (!sol.optimal()) throw Error(ErrorKind::SolverFailure, std::string("epigraph LP ") + to_string(sol.status));

  MatrixGameSolution<Scalar> out;
  out.value = sol.objective;
  out.defender = detail::to_distribution<Scalar>(sol.primal.head(nd));
  out.attacker = detail::to_distribution<Scalar>(
      -sol.duals.segment(first_attacker_row, static_cast<Eigen::Index>(pieces.size())));
  detail::fill_diagnostics(out.diagnostics, lp, sol, "epigraph-lp");
  return out;
}

/// f_a(delta) for one attacker action, evaluated directly from the pieces.
template <typename Scalar>
Scalar convex_payoff(const std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>& per_a,
                     const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& delta) {
  Scalar v = 0;
  for (const auto& blk : per_a) {
    if (blk.rows() > 0) v += (blk * delta).maxCoeff();
  }
  return v;
}

template <typename Scalar>
struct FictitiousPlayResult {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Scalar lower = 0;
  Scalar upper = 0;
  Vector defender;  // empirical row frequencies
  Vector attacker;  // empirical column frequencies
};

/// Brown's fictitious play; [lower, upper] brackets the game value.
/// The seed picks the opening actions.
template <typename Scalar>
FictitiousPlayResult<Scalar> fictitious_play(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m,
                                             int iters, std::uint64_t seed) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (iters < 1) throw Error(ErrorKind::SolverFailure, "fictitious play needs at least one iteration");
  const Eigen::Index nr = m.rows();
  const Eigen::Index nc = m.cols();
  std::mt19937_64 rng(seed);
  Eigen::Index i = std::uniform_int_distribution<Eigen::Index>(0, nr - 1)(rng);
  Eigen::Index j = std::uniform_int_distribution<Eigen::Index>(0, nc - 1)(rng);

  Vector row_counts = Vector::Zero(nr);
  Vector col_counts = Vector::Zero(nc);
  Vector row_payoff = Vector::Zero(nc);  // cumulative delta' M
  Vector col_payoff = Vector::Zero(nr);  // cumulative M alpha
  Scalar lower = -std::numeric_limits<Scalar>::infinity();
  Scalar upper = std::numeric_limits<Scalar>::infinity();
  for (int k = 1; k <= iters; ++k) {
    row_counts(i) += 1;
    col_counts(j) += 1;
    row_payoff += m.row(i).transpose();
    col_payoff += m.col(j);
    upper = std::min(upper, row_payoff.maxCoeff() / k);
    lower = std::max(lower, col_payoff.minCoeff() / k);
    row_payoff.maxCoeff(&j);
    col_payoff.minCoeff(&i);
  }
  FictitiousPlayResult<Scalar> out;
  out.lower = lower;
  out.upper = upper;
  out.defender = row_counts / iters;
  out.attacker = col_counts / iters;
  return out;
}

}  // namespace qif

#endif  // QIF_MINIMAX_HPP
