#ifndef QIF_CHANNEL_HPP
#define QIF_CHANNEL_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qif/distribution.hpp"
#include "qif/error.hpp"
#include "qif/labeled_matrix.hpp"
#include "qif/simplex.hpp"

namespace qif {

inline constexpr double kChannelTol = 1e-9;
inline constexpr double kEquivalenceTol = 1e-7;

/// Row-stochastic labeled matrix, rows = secrets, columns = observables.
template <typename Scalar>
class Channel {
 public:
  using Matrix = typename LabeledMatrix<Scalar>::Matrix;

  Channel() = default;

  /// Validates entries and row sums to `tol`, then clamps and renormalizes rows.
  explicit Channel(LabeledMatrix<Scalar> m, Scalar tol = Scalar(kChannelTol)) {
    Matrix data = m.data();
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      for (Eigen::Index j = 0; j < data.cols(); ++j) {
        const Scalar v = data(i, j);
        if (!(v >= -tol && v <= 1 + tol)) {
          throw Error(ErrorKind::BadChannel, "entry (" + m.rows()[static_cast<std::size_t>(i)].to_string() + ", " +
                                                 m.cols()[static_cast<std::size_t>(j)].to_string() +
                                                 ") outside [0, 1]");
        }
        data(i, j) = std::clamp(v, Scalar(0), Scalar(1));
      }
      const Scalar s = data.row(i).sum();
      if (!(std::abs(s - 1) <= tol)) {
        throw Error(ErrorKind::BadChannel,
                    "row '" + m.rows()[static_cast<std::size_t>(i)].to_string() + "' sums to " + std::to_string(s));
      }
      data.row(i) /= s;
    }
    m_ = LabeledMatrix<Scalar>(m.rows(), m.cols(), std::move(data));
  }

  Channel(Labels rows, Labels cols, Matrix data) : Channel(LabeledMatrix<Scalar>(std::move(rows), std::move(cols), std::move(data))) {}

  const LabeledMatrix<Scalar>& matrix() const noexcept { return m_; }
  const Labels& rows() const noexcept { return m_.rows(); }
  const Labels& cols() const noexcept { return m_.cols(); }
  const Matrix& data() const noexcept { return m_.data(); }
  Eigen::Index num_rows() const noexcept { return m_.num_rows(); }
  Eigen::Index num_cols() const noexcept { return m_.num_cols(); }
  Scalar at(const Label& x, const Label& y) const { return m_.at(x, y); }

  bool compatible_with(const Channel& o) const { return m_.compatible_with(o.m_); }
  bool same_type_as(const Channel& o) const { return m_.same_type_as(o.m_); }

  friend bool operator==(const Channel& a, const Channel& b) { return a.m_ == b.m_; }

 private:
  LabeledMatrix<Scalar> m_;
};

using Channeld = Channel<double>;

template <typename Scalar>
using ChannelFamily = std::vector<std::pair<std::string, Channel<Scalar>>>;

namespace detail {

template <typename Scalar>
const Channel<Scalar>& family_member(const ChannelFamily<Scalar>& family, const std::string& index) {
  for (const auto& [k, c] : family) {
    if (k == index) return c;
  }
  throw Error(ErrorKind::LabelMismatch, "family has no channel for index '" + index + "'");
}

}  // namespace detail

/// Hidden choice: sum over supp(mu) of mu(i) C_i. Channels in the support must
/// share rows and columns; the result uses the first supported channel's layout.
template <typename Scalar>
Channel<Scalar> hidden_choice(const IndexDistribution<Scalar>& mu, const ChannelFamily<Scalar>& family) {
  std::vector<LabeledMatrix<Scalar>> terms;
  const Channel<Scalar>* first = nullptr;
  for (const auto& [index, w] : mu) {
    if (w == 0) continue;
    const auto& c = detail::family_member(family, index);
    if (first && !first->same_type_as(c)) {
      throw Error(ErrorKind::TypeMismatch, "channel '" + index + "' has a different type from the rest of the support");
    }
    if (!first) first = &c;
    terms.push_back(scalar_mul(w, c.matrix()));
  }
  if (terms.empty()) throw Error(ErrorKind::BadDistribution, "empty support");
  return Channel<Scalar>(sum(terms));
}

/// Visible choice: concatenation of mu(i) C_i tagged by i, over every index
/// listed in mu (zero weights give zero columns).
template <typename Scalar>
Channel<Scalar> visible_choice(const IndexDistribution<Scalar>& mu, const ChannelFamily<Scalar>& family) {
  IndexedFamily<Scalar> parts;
  for (const auto& [index, w] : mu) {
    parts.emplace_back(index, scalar_mul(w, detail::family_member(family, index).matrix()));
  }
  return Channel<Scalar>(concat(parts));
}

namespace detail {

template <typename Scalar>
IndexDistribution<Scalar> binary_mu(Scalar p, const std::string& t1, const std::string& t2) {
  if (!(p >= 0 && p <= 1)) throw Error(ErrorKind::BadDistribution, "p = " + std::to_string(p) + " outside [0, 1]");
  if (t1 == t2) throw Error(ErrorKind::DuplicateIndex, "index '" + t1 + "' repeats");
  return IndexDistribution<Scalar>({{t1, p}, {t2, Scalar(1) - p}});
}

}  // namespace detail

template <typename Scalar>
Channel<Scalar> binary_hidden(Scalar p, const Channel<Scalar>& c1, const Channel<Scalar>& c2,
                              const std::string& t1 = "1", const std::string& t2 = "2") {
  return hidden_choice(detail::binary_mu(p, t1, t2), ChannelFamily<Scalar>{{t1, c1}, {t2, c2}});
}

template <typename Scalar>
Channel<Scalar> binary_visible(Scalar p, const Channel<Scalar>& c1, const Channel<Scalar>& c2,
                               const std::string& t1 = "1", const std::string& t2 = "2") {
  return visible_choice(detail::binary_mu(p, t1, t2), ChannelFamily<Scalar>{{t1, c1}, {t2, c2}});
}

/// Adds one all-zero column under a label not already in use.
template <typename Scalar>
Channel<Scalar> zero_extend(const Channel<Scalar>& c) {
  std::string name = "y0";
  for (int k = 0; c.matrix().col_of(Label(name)); ++k) name = "y0_" + std::to_string(k);
  Labels cols = c.cols();
  cols.emplace_back(name);
  typename Channel<Scalar>::Matrix data(c.data().rows(), c.data().cols() + 1);
  data.leftCols(c.data().cols()) = c.data();
  data.col(c.data().cols()).setZero();
  return Channel<Scalar>(c.rows(), std::move(cols), std::move(data));
}

template <typename Scalar>
struct Refinement {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  /// Row-stochastic R (source cols x target cols) with source * R ~ target.
  Matrix post_processing;
  /// Largest entrywise |source * R - target|.
  Scalar residual = 0;
  /// Target column with the largest residual.
  Label worst_column;
};

template <typename Scalar>
struct EquivalenceResult {
  bool equivalent = false;
  Refinement<Scalar> forward;   // c1 rebuilt from c2
  Refinement<Scalar> backward;  // c2 rebuilt from c1
};

/// Best post-processing of `source` towards `target` in the inf-norm.
/// LP over R >= 0 with unit row sums and a bound e on every residual; minimize e.
template <typename Scalar>
Refinement<Scalar> best_post_processing(const Channel<Scalar>& source, const Channel<Scalar>& target) {
  if (!source.compatible_with(target)) throw Error(ErrorKind::IncompatibleRows, "channels have different secret sets");
  using RowVector = typename LinearProgram<Scalar>::RowVector;
  const auto s = source.data();
  const auto t = target.matrix().rows_aligned_to(source.rows());
  const Eigen::Index nx = s.rows();
  const Eigen::Index ns = s.cols();
  const Eigen::Index nt = t.cols();
  const Eigen::Index nvar = ns * nt + 1;
  const Eigen::Index eps = ns * nt;
  auto var = [nt](Eigen::Index i, Eigen::Index j) { return i * nt + j; };

  LinearProgram<Scalar> lp(nvar, Sense::Minimize);
  lp.objective(eps) = 1;
  for (Eigen::Index i = 0; i < ns; ++i) {
    RowVector r = RowVector::Zero(nvar);
    for (Eigen::Index j = 0; j < nt; ++j) r(var(i, j)) = 1;
    lp.add_constraint(std::move(r), Relation::Equal, 1);
  }
  for (Eigen::Index x = 0; x < nx; ++x) {
    for (Eigen::Index j = 0; j < nt; ++j) {
      RowVector r = RowVector::Zero(nvar);
      for (Eigen::Index i = 0; i < ns; ++i) r(var(i, j)) = s(x, i);
      RowVector up = r;
      up(eps) = -1;
      lp.add_constraint(std::move(up), Relation::LessEqual, t(x, j));
      r(eps) = 1;
      lp.add_constraint(std::move(r), Relation::GreaterEqual, t(x, j));
    }
  }
  const auto sol = lp_solve(lp);
  if (!sol.optimal()) throw Error(ErrorKind::SolverFailure, std::string("equivalence LP ") + to_string(sol.status));

  Refinement<Scalar> out;
  out.post_processing.resize(ns, nt);
  for (Eigen::Index i = 0; i < ns; ++i) {
    for (Eigen::Index j = 0; j < nt; ++j) out.post_processing(i, j) = std::max<Scalar>(0, sol.primal(var(i, j)));
  }
  const typename Refinement<Scalar>::Matrix diff = (s * out.post_processing - t).cwiseAbs();
  Eigen::Index wr = 0;
  Eigen::Index wc = 0;
  out.residual = nt > 0 ? diff.maxCoeff(&wr, &wc) : Scalar(0);
  if (nt > 0) out.worst_column = target.cols()[static_cast<std::size_t>(wc)];
  return out;
}

/// Two channels on the same secrets are equivalent when each is a
/// post-processing of the other, each up to `tol` in the inf-norm.
template <typename Scalar>
EquivalenceResult<Scalar> equivalent(const Channel<Scalar>& c1, const Channel<Scalar>& c2,
                                     Scalar tol = Scalar(kEquivalenceTol)) {
  if (!c1.compatible_with(c2)) throw Error(ErrorKind::IncompatibleRows, "channels have different secret sets");
  EquivalenceResult<Scalar> out;
  out.forward = best_post_processing(c2, c1);
  out.backward = best_post_processing(c1, c2);
  out.equivalent = out.forward.residual <= tol && out.backward.residual <= tol;
  return out;
}

}  // namespace qif

#endif  // QIF_CHANNEL_HPP
