#ifndef QIF_LABELED_MATRIX_HPP
#define QIF_LABELED_MATRIX_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "qif/error.hpp"
#include "qif/label.hpp"

namespace qif {

namespace detail {

inline std::unordered_map<Label, Eigen::Index> index_labels(const Labels& labels, const char* what) {
  std::unordered_map<Label, Eigen::Index> out;
  out.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!out.emplace(labels[i], static_cast<Eigen::Index>(i)).second) {
      throw Error(ErrorKind::DuplicateLabel, std::string("duplicate ") + what + " label '" +
                                                 labels[i].to_string() + "'");
    }
  }
  return out;
}

inline bool same_label_set(const Labels& a, const Labels& b) {
  if (a.size() != b.size()) return false;
  std::unordered_set<Label> sa(a.begin(), a.end());
  return std::all_of(b.begin(), b.end(), [&](const Label& l) { return sa.count(l) != 0; });
}

}  // namespace detail

/// Dense real matrix whose rows and columns are addressed by Label.
///
/// Row and column orders are part of the value (they drive file and table
/// layout) but every operator matches by label, never by position.
template <typename Scalar>
class LabeledMatrix {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  LabeledMatrix() = default;

  LabeledMatrix(Labels rows, Labels cols, Matrix data)
      : rows_(std::move(rows)), cols_(std::move(cols)), data_(std::move(data)) {
    if (data_.rows() != static_cast<Eigen::Index>(rows_.size()) ||
        data_.cols() != static_cast<Eigen::Index>(cols_.size())) {
      throw Error(ErrorKind::TypeMismatch, "matrix shape " + std::to_string(data_.rows()) + "x" +
                                               std::to_string(data_.cols()) + " does not match " +
                                               std::to_string(rows_.size()) + " row and " +
                                               std::to_string(cols_.size()) + " column labels");
    }
    row_index_ = detail::index_labels(rows_, "row");
    col_index_ = detail::index_labels(cols_, "column");
  }

  static LabeledMatrix zero(Labels rows, Labels cols) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    return LabeledMatrix(std::move(rows), std::move(cols), std::move(m));
  }

  const Labels& rows() const noexcept { return rows_; }
  const Labels& cols() const noexcept { return cols_; }
  const Matrix& data() const noexcept { return data_; }
  Eigen::Index num_rows() const noexcept { return data_.rows(); }
  Eigen::Index num_cols() const noexcept { return data_.cols(); }

  std::optional<Eigen::Index> row_of(const Label& l) const {
    auto it = row_index_.find(l);
    return it == row_index_.end() ? std::nullopt : std::optional<Eigen::Index>(it->second);
  }
  std::optional<Eigen::Index> col_of(const Label& l) const {
    auto it = col_index_.find(l);
    return it == col_index_.end() ? std::nullopt : std::optional<Eigen::Index>(it->second);
  }

  Scalar at(const Label& row, const Label& col) const {
    auto r = row_of(row);
    auto c = col_of(col);
    if (!r || !c) {
      throw Error(ErrorKind::LabelMismatch, "no entry (" + row.to_string() + ", " + col.to_string() + ")");
    }
    return data_(*r, *c);
  }

  /// Same row label set (order may differ).
  bool compatible_with(const LabeledMatrix& other) const { return detail::same_label_set(rows_, other.rows_); }
  /// Same row and column label sets.
  bool same_type_as(const LabeledMatrix& other) const {
    return compatible_with(other) && detail::same_label_set(cols_, other.cols_);
  }

  /// Data re-laid out in the given label orders; labels must be the same sets.
  Matrix aligned_to(const Labels& rows, const Labels& cols) const {
    Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    std::vector<Eigen::Index> ci(cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      auto c = col_of(cols[j]);
      if (!c) throw Error(ErrorKind::TypeMismatch, "missing column '" + cols[j].to_string() + "'");
      ci[j] = *c;
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      auto r = row_of(rows[i]);
      if (!r) throw Error(ErrorKind::IncompatibleRows, "missing row '" + rows[i].to_string() + "'");
      for (std::size_t j = 0; j < cols.size(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = data_(*r, ci[j]);
    }
    return out;
  }

  Matrix rows_aligned_to(const Labels& rows) const { return aligned_to(rows, cols_); }

  /// Columns relabeled (y, index); entries untouched.
  LabeledMatrix tag_columns(const std::string& index) const {
    Labels cols;
    cols.reserve(cols_.size());
    for (const auto& c : cols_) cols.push_back(Label::tagged(c, index));
    return LabeledMatrix(rows_, std::move(cols), data_);
  }

  friend bool operator==(const LabeledMatrix& a, const LabeledMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  Labels rows_;
  Labels cols_;
  Matrix data_;
  std::unordered_map<Label, Eigen::Index> row_index_;
  std::unordered_map<Label, Eigen::Index> col_index_;
};

using LabeledMatrixd = LabeledMatrix<double>;

/// r * M, labels unchanged.
template <typename Scalar>
LabeledMatrix<Scalar> scalar_mul(Scalar r, const LabeledMatrix<Scalar>& m) {
  return LabeledMatrix<Scalar>(m.rows(), m.cols(), r * m.data());
}

template <typename Scalar>
LabeledMatrix<Scalar> operator*(Scalar r, const LabeledMatrix<Scalar>& m) {
  return scalar_mul(r, m);
}

/// Entrywise sum of a family of same-type matrices, laid out like the first.
template <typename Scalar>
LabeledMatrix<Scalar> sum(std::span<const LabeledMatrix<Scalar>> family) {
  if (family.empty()) throw Error(ErrorKind::TypeMismatch, "sum of an empty family");
  const auto& first = family.front();
  typename LabeledMatrix<Scalar>::Matrix acc = first.data();
  for (std::size_t i = 1; i < family.size(); ++i) {
    if (!first.same_type_as(family[i])) {
      throw Error(ErrorKind::TypeMismatch, "summand " + std::to_string(i) + " has a different type");
    }
    acc += family[i].aligned_to(first.rows(), first.cols());
  }
  return LabeledMatrix<Scalar>(first.rows(), first.cols(), std::move(acc));
}

template <typename Scalar>
LabeledMatrix<Scalar> sum(const std::vector<LabeledMatrix<Scalar>>& family) {
  return sum(std::span<const LabeledMatrix<Scalar>>(family));
}

template <typename Scalar>
LabeledMatrix<Scalar> operator+(const LabeledMatrix<Scalar>& a, const LabeledMatrix<Scalar>& b) {
  return sum(std::vector<LabeledMatrix<Scalar>>{a, b});
}

template <typename Scalar>
using IndexedFamily = std::vector<std::pair<std::string, LabeledMatrix<Scalar>>>;

/// Column concatenation: entry (x, (y, j)) = M_j(x, y). Rows follow the first
/// matrix; columns follow family order, then each matrix's own column order.
template <typename Scalar>
LabeledMatrix<Scalar> concat(const IndexedFamily<Scalar>& family) {
  if (family.empty()) throw Error(ErrorKind::IncompatibleRows, "concatenation of an empty family");
  std::unordered_set<std::string> seen;
  const Labels& rows = family.front().second.rows();
  Eigen::Index total = 0;
  for (const auto& [index, m] : family) {
    if (!seen.insert(index).second) throw Error(ErrorKind::DuplicateIndex, "index '" + index + "' repeats");
    if (!family.front().second.compatible_with(m)) {
      throw Error(ErrorKind::IncompatibleRows, "matrix '" + index + "' has a different row set");
    }
    total += m.num_cols();
  }

  typename LabeledMatrix<Scalar>::Matrix out(static_cast<Eigen::Index>(rows.size()), total);
  Labels cols;
  cols.reserve(static_cast<std::size_t>(total));
  Eigen::Index offset = 0;
  for (const auto& [index, m] : family) {
    out.middleCols(offset, m.num_cols()) = m.rows_aligned_to(rows);
    for (const auto& c : m.cols()) cols.push_back(Label::tagged(c, index));
    offset += m.num_cols();
  }
  return LabeledMatrix<Scalar>(rows, std::move(cols), std::move(out));
}

}  // namespace qif

#endif  // QIF_LABELED_MATRIX_HPP
