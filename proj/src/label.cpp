#include "qif/label.hpp"

#include "qif/error.hpp"

namespace qif {

namespace {

void append_escaped(std::string& out, const std::string& text) {
  for (char c : text) {
    if (c == '@' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
}

std::string unescape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\\') {
      if (i + 1 == text.size()) throw Error(ErrorKind::Parse, "dangling escape in label");
      ++i;
    }
    out.push_back(text[i]);
  }
  return out;
}

// Lexicographic on (inner, index), recursing on depth; atoms sort before tagged.
std::strong_ordering compare_prefix(const Label& a, std::size_t da, const Label& b, std::size_t db) {
  if (da == 0 || db == 0) {
    if (da == 0 && db == 0) return a.atom() <=> b.atom();
    return da == 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  if (auto c = compare_prefix(a, da - 1, b, db - 1); c != 0) return c;
  return a.tags()[da - 1] <=> b.tags()[db - 1];
}

}  // namespace

std::string Label::to_string() const {
  std::string out;
  append_escaped(out, atom_);
  for (const auto& t : tags_) {
    out.push_back('@');
    append_escaped(out, t);
  }
  return out;
}

Label Label::parse(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\\') {
      ++i;
      continue;
    }
    if (text[i] == '@') {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  parts.push_back(text.substr(start));

  Label out(unescape(parts.front()));
  for (std::size_t i = 1; i < parts.size(); ++i) out.tags_.push_back(unescape(parts[i]));
  return out;
}

std::strong_ordering operator<=>(const Label& a, const Label& b) {
  return compare_prefix(a, a.depth(), b, b.depth());
}

std::ostream& operator<<(std::ostream& os, const Label& label) { return os << label.to_string(); }

}  // namespace qif
