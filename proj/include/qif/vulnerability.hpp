#ifndef QIF_VULNERABILITY_HPP
#define QIF_VULNERABILITY_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "qif/channel.hpp"
#include "qif/distribution.hpp"
#include "qif/error.hpp"
#include "qif/labeled_matrix.hpp"

namespace qif {

/// g(w, x): rows are guesses, columns are secrets.
template <typename Scalar>
class GainFunction {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  GainFunction() = default;
  GainFunction(Labels guesses, Labels secrets, Matrix gain) : m_(std::move(guesses), std::move(secrets), std::move(gain)) {
    if (!m_.data().allFinite()) throw Error(ErrorKind::Parse, "gain function has non-finite entries");
  }

  /// g(w, x) = [w == x]; the gain form of Bayes vulnerability.
  static GainFunction identity(const Labels& secrets) {
    const auto n = static_cast<Eigen::Index>(secrets.size());
    return GainFunction(secrets, secrets, Matrix::Identity(n, n));
  }

  const Labels& guesses() const noexcept { return m_.rows(); }
  const Labels& secrets() const noexcept { return m_.cols(); }
  const Matrix& gain() const noexcept { return m_.data(); }
  const LabeledMatrix<Scalar>& matrix() const noexcept { return m_; }

  /// Gain matrix with columns in the given secret order.
  Matrix aligned_to(const Labels& secrets) const {
    if (!detail::same_label_set(secrets, m_.cols())) {
      throw Error(ErrorKind::LabelMismatch, "gain function secrets differ from the prior's secrets");
    }
    return m_.aligned_to(m_.rows(), secrets);
  }

 private:
  LabeledMatrix<Scalar> m_;
};

/// Bayes vulnerability, or g-vulnerability for an explicit gain function.
template <typename Scalar>
class VulnMeasure {
 public:
  static VulnMeasure bayes() { return VulnMeasure(); }
  static VulnMeasure gain(GainFunction<Scalar> g) {
    VulnMeasure v;
    v.g_ = std::move(g);
    return v;
  }

  bool is_bayes() const noexcept { return !g_.has_value(); }
  const GainFunction<Scalar>& gain_function() const { return *g_; }

  /// Gain matrix (guesses x secrets, columns in `secrets` order) with its guess labels.
  std::pair<Labels, typename GainFunction<Scalar>::Matrix> resolve(const Labels& secrets) const {
    if (g_) return {g_->guesses(), g_->aligned_to(secrets)};
    const auto n = static_cast<Eigen::Index>(secrets.size());
    return {secrets, GainFunction<Scalar>::Matrix::Identity(n, n)};
  }

 private:
  VulnMeasure() = default;
  std::optional<GainFunction<Scalar>> g_;
};

using VulnMeasured = VulnMeasure<double>;
using GainFunctiond = GainFunction<double>;

namespace detail {

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> prior_vector(const Prior<Scalar>& pi) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> p(static_cast<Eigen::Index>(pi.size()));
  Eigen::Index i = 0;
  for (const auto& e : pi) p(i++) = e.second;
  return p;
}

/// J(x, y) = pi(x) C(x, y), rows in prior order.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> joint(const Prior<Scalar>& pi, const Channel<Scalar>& c) {
  const Labels xs = pi.keys();
  if (!detail::same_label_set(xs, c.rows())) {
    throw Error(ErrorKind::LabelMismatch, "channel rows differ from the prior's secrets");
  }
  return prior_vector(pi).asDiagonal() * c.matrix().rows_aligned_to(xs);
}

// Lowest-label index among entries within `tol` of the column maximum.
template <typename Scalar, typename Vec>
Eigen::Index argmax_lowest_label(const Vec& v, const Labels& labels, Scalar tol) {
  const Scalar best = v.maxCoeff();
  Eigen::Index pick = -1;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) >= best - tol && (pick < 0 || labels[static_cast<std::size_t>(i)] < labels[static_cast<std::size_t>(pick)])) {
      pick = i;
    }
  }
  return pick;
}

}  // namespace detail

/// max_w sum_x pi(x) g(w, x)
template <typename Scalar>
Scalar prior_vuln(const VulnMeasure<Scalar>& v, const Prior<Scalar>& pi) {
  const auto p = detail::prior_vector(pi);
  if (v.is_bayes()) return p.maxCoeff();
  const auto [ws, g] = v.resolve(pi.keys());
  return (g * p).maxCoeff();
}

/// sum_y max_w sum_x pi(x) C(x, y) g(w, x), computed on the joint matrix.
template <typename Scalar>
Scalar posterior_vuln(const VulnMeasure<Scalar>& v, const Prior<Scalar>& pi, const Channel<Scalar>& c) {
  const auto j = detail::joint(pi, c);
  if (j.cols() == 0) return Scalar(0);
  if (v.is_bayes()) return j.colwise().maxCoeff().sum();
  const auto [ws, g] = v.resolve(pi.keys());
  return (g * j).colwise().maxCoeff().sum();
}

/// Optimal guess per observable (ties to the lowest guess label).
template <typename Scalar>
std::vector<std::pair<Label, Label>> best_guesses(const VulnMeasure<Scalar>& v, const Prior<Scalar>& pi,
                                                  const Channel<Scalar>& c, Scalar tol = Scalar(1e-12)) {
  const auto j = detail::joint(pi, c);
  const auto [ws, g] = v.resolve(pi.keys());
  const auto gj = (g * j).eval();
  std::vector<std::pair<Label, Label>> out;
  for (Eigen::Index y = 0; y < gj.cols(); ++y) {
    const Eigen::Index w = detail::argmax_lowest_label(gj.col(y), ws, tol);
    out.emplace_back(c.cols()[static_cast<std::size_t>(y)], ws[static_cast<std::size_t>(w)]);
  }
  return out;
}

template <typename Scalar>
struct MonteCarloEstimate {
  Scalar estimate = 0;
  Scalar std_error = 0;
  std::size_t samples = 0;
};

/// Samples x ~ pi, y ~ C(x, .), picks the empirical best guess per y and
/// scores it on the same sample.
template <typename Scalar>
MonteCarloEstimate<Scalar> posterior_vuln_mc(const VulnMeasure<Scalar>& v, const Prior<Scalar>& pi,
                                             const Channel<Scalar>& c, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw Error(ErrorKind::BadDistribution, "samples must be positive");
  const Labels xs = pi.keys();
  if (!detail::same_label_set(xs, c.rows())) {
    throw Error(ErrorKind::LabelMismatch, "channel rows differ from the prior's secrets");
  }
  const auto cm = c.matrix().rows_aligned_to(xs);
  const auto [ws, g] = v.resolve(xs);

  std::mt19937_64 rng(seed);
  std::vector<double> pw;
  for (const auto& e : pi) pw.push_back(static_cast<double>(e.second));
  std::discrete_distribution<Eigen::Index> draw_x(pw.begin(), pw.end());
  std::vector<std::discrete_distribution<Eigen::Index>> draw_y;
  for (Eigen::Index x = 0; x < cm.rows(); ++x) {
    std::vector<double> row(static_cast<std::size_t>(cm.cols()));
    for (Eigen::Index y = 0; y < cm.cols(); ++y) row[static_cast<std::size_t>(y)] = static_cast<double>(cm(x, y));
    draw_y.emplace_back(row.begin(), row.end());
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> counts =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(cm.rows(), cm.cols());
  for (std::size_t s = 0; s < samples; ++s) {
    const Eigen::Index x = draw_x(rng);
    counts(x, draw_y[static_cast<std::size_t>(x)](rng)) += 1;
  }

  // Per-sample gain of the chosen guess; mean and standard error from its moments.
  const auto gc = (g * counts).eval();
  Scalar total = 0;
  Scalar total_sq = 0;
  for (Eigen::Index y = 0; y < cm.cols(); ++y) {
    if (counts.col(y).sum() == 0) continue;
    const Eigen::Index w = detail::argmax_lowest_label(gc.col(y), ws, Scalar(0));
    total += gc(w, y);
    total_sq += counts.col(y).dot(g.row(w).transpose().cwiseAbs2());
  }
  const Scalar n = static_cast<Scalar>(samples);
  MonteCarloEstimate<Scalar> out;
  out.samples = samples;
  out.estimate = total / n;
  const Scalar var = std::max<Scalar>(0, total_sq / n - out.estimate * out.estimate);
  out.std_error = std::sqrt(var / n);
  return out;
}

enum class LeakageMode { Additive, Multiplicative };

template <typename Scalar>
Scalar leakage(const VulnMeasure<Scalar>& v, const Prior<Scalar>& pi, const Channel<Scalar>& c, LeakageMode mode) {
  const Scalar prior = prior_vuln(v, pi);
  const Scalar post = posterior_vuln(v, pi, c);
  if (mode == LeakageMode::Additive) return post - prior;
  if (prior == 0) throw Error(ErrorKind::DivideByZero, "prior vulnerability is zero");
  return post / prior;
}

/// Linear pieces of delta -> V[pi, hidden choice over d of C_d], one W x D
/// block per observable: entry (w, d) = sum_x pi(x) C_d(x, y) g(w, x).
/// All channels must share one type; observables follow the first channel.
template <typename Scalar>
std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> hidden_choice_pieces(
    const VulnMeasure<Scalar>& v, const Prior<Scalar>& pi, const std::vector<const Channel<Scalar>*>& channels) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (channels.empty()) throw Error(ErrorKind::TypeMismatch, "no channels");
  const Labels xs = pi.keys();
  const Labels& ys = channels.front()->cols();
  const auto [ws, g] = v.resolve(xs);
  const auto p = detail::prior_vector(pi);
  const auto nd = static_cast<Eigen::Index>(channels.size());
  std::vector<Matrix> pieces(ys.size(), Matrix(g.rows(), nd));
  for (Eigen::Index d = 0; d < nd; ++d) {
    const auto& c = *channels[static_cast<std::size_t>(d)];
    if (!c.same_type_as(*channels.front())) {
      throw Error(ErrorKind::TypeMismatch, "hidden choice needs channels of one type");
    }
    if (!detail::same_label_set(xs, c.rows())) {
      throw Error(ErrorKind::LabelMismatch, "channel rows differ from the prior's secrets");
    }
    const Matrix gj = g * (p.asDiagonal() * c.matrix().aligned_to(xs, ys));
    for (std::size_t y = 0; y < ys.size(); ++y) pieces[y].col(d) = gj.col(static_cast<Eigen::Index>(y));
  }
  return pieces;
}

}  // namespace qif

#endif  // QIF_VULNERABILITY_HPP
