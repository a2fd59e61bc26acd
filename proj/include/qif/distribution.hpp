#ifndef QIF_DISTRIBUTION_HPP
#define QIF_DISTRIBUTION_HPP

#include <cmath>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "qif/error.hpp"
#include "qif/label.hpp"

namespace qif {

inline constexpr double kDistributionTol = 1e-9;

namespace detail {
inline std::string key_text(const std::string& k) { return k; }
inline std::string key_text(const Label& k) { return k.to_string(); }
}  // namespace detail

/// Finite probability distribution with an ordered, duplicate-free support list.
/// Weights within tolerance of a distribution are renormalized to sum exactly 1.
template <typename Key, typename Scalar = double>
class Distribution {
 public:
  using Entry = std::pair<Key, Scalar>;

  Distribution() = default;

  explicit Distribution(std::vector<Entry> entries, Scalar tol = Scalar(kDistributionTol))
      : entries_(std::move(entries)) {
    validate_keys();
    Scalar total = 0;
    for (auto& [k, w] : entries_) {
      if (!(w >= -tol)) throw Error(ErrorKind::BadDistribution, "negative weight on '" + detail::key_text(k) + "'");
      if (w < 0) w = 0;
      total += w;
    }
    if (!(std::abs(total - Scalar(1)) <= tol)) {
      std::ostringstream os;
      os.precision(17);
      os << "weights sum to " << total;
      throw Error(ErrorKind::BadDistribution, os.str());
    }
    for (auto& e : entries_) e.second /= total;
  }

  /// Scales arbitrary non-negative weights (positive total) to a distribution.
  static Distribution normalized(std::vector<Entry> entries) {
    Scalar total = 0;
    for (const auto& [k, w] : entries) {
      if (!(w >= 0)) throw Error(ErrorKind::BadDistribution, "negative weight on '" + detail::key_text(k) + "'");
      total += w;
    }
    if (!(total > 0)) throw Error(ErrorKind::BadDistribution, "weights have zero total");
    for (auto& e : entries) e.second /= total;
    return Distribution(std::move(entries));
  }

  static Distribution point(Key k) { return Distribution({{std::move(k), Scalar(1)}}); }

  static Distribution uniform(const std::vector<Key>& keys) {
    if (keys.empty()) throw Error(ErrorKind::BadDistribution, "uniform over an empty set");
    std::vector<Entry> entries;
    for (const auto& k : keys) entries.emplace_back(k, Scalar(1) / static_cast<Scalar>(keys.size()));
    return Distribution(std::move(entries));
  }

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  std::vector<Key> keys() const {
    std::vector<Key> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.first);
    return out;
  }

  /// Weight of k; zero when k is not listed.
  Scalar operator()(const Key& k) const {
    for (const auto& [key, w] : entries_) {
      if (key == k) return w;
    }
    return Scalar(0);
  }

  bool contains(const Key& k) const {
    for (const auto& e : entries_) {
      if (e.first == k) return true;
    }
    return false;
  }

 private:
  void validate_keys() const {
    std::unordered_set<std::string> seen;
    for (const auto& e : entries_) {
      if (!seen.insert(detail::key_text(e.first)).second) {
        throw Error(ErrorKind::BadDistribution, "key '" + detail::key_text(e.first) + "' repeats");
      }
    }
  }

  std::vector<Entry> entries_;
};

template <typename Scalar = double>
using IndexDistribution = Distribution<std::string, Scalar>;

template <typename Scalar = double>
using Prior = Distribution<Label, Scalar>;

using IndexDistributiond = IndexDistribution<double>;
using Priord = Prior<double>;

}  // namespace qif

#endif  // QIF_DISTRIBUTION_HPP
