#ifndef QIF_LABEL_HPP
#define QIF_LABEL_HPP

#include <compare>
#include <functional>
#include <initializer_list>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace qif {

/// Row/column identifier of a LabeledMatrix.
///
/// A label is either an atom ("y1") or a tagged label (inner, index) produced
/// by concatenation. Tagging nests: tagging (y1, 1) with 3 gives ((y1, 1), 3).
/// Internally this is the atom followed by the stack of tags, innermost first.
class Label {
 public:
  Label() = default;
  Label(std::string atom) : atom_(std::move(atom)) {}  // NOLINT: implicit by design of the API
  Label(const char* atom) : atom_(atom) {}             // NOLINT

  static Label tagged(Label inner, std::string index) {
    inner.tags_.push_back(std::move(index));
    return inner;
  }

  bool is_atom() const noexcept { return tags_.empty(); }
  const std::string& atom() const noexcept { return atom_; }
  const std::vector<std::string>& tags() const noexcept { return tags_; }
  std::size_t depth() const noexcept { return tags_.size(); }

  /// Outermost index; only valid on tagged labels.
  const std::string& index() const { return tags_.back(); }
  /// The label one tagging level down; only valid on tagged labels.
  Label inner() const {
    Label out = *this;
    out.tags_.pop_back();
    return out;
  }

  /// "inner@tag" rendering with '@' and '\' escaped inside atoms and tags.
  std::string to_string() const;
  static Label parse(std::string_view text);

  friend bool operator==(const Label&, const Label&) = default;
  friend std::strong_ordering operator<=>(const Label& a, const Label& b);

 private:
  std::string atom_;
  std::vector<std::string> tags_;
};

std::ostream& operator<<(std::ostream& os, const Label& label);

using Labels = std::vector<Label>;

inline Labels make_labels(std::initializer_list<const char*> names) {
  Labels out;
  out.reserve(names.size());
  for (const char* n : names) out.emplace_back(n);
  return out;
}

}  // namespace qif

template <>
struct std::hash<qif::Label> {
  std::size_t operator()(const qif::Label& label) const noexcept {
    std::size_t h = std::hash<std::string>{}(label.atom());
    for (const auto& t : label.tags()) {
      h ^= std::hash<std::string>{}(t) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

#endif  // QIF_LABEL_HPP
