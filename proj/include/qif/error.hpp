#ifndef QIF_ERROR_HPP
#define QIF_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace qif {

enum class ErrorKind {
  TypeMismatch,
  IncompatibleRows,
  DuplicateIndex,
  DuplicateLabel,
  BadDistribution,
  BadChannel,
  LabelMismatch,
  DivideByZero,
  UnknownAction,
  TooLarge,
  BadPermutation,
  SolverFailure,
  Parse,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::IncompatibleRows: return "IncompatibleRows";
    case ErrorKind::DuplicateIndex: return "DuplicateIndex";
    case ErrorKind::DuplicateLabel: return "DuplicateLabel";
    case ErrorKind::BadDistribution: return "BadDistribution";
    case ErrorKind::BadChannel: return "BadChannel";
    case ErrorKind::LabelMismatch: return "LabelMismatch";
    case ErrorKind::DivideByZero: return "DivideByZero";
    case ErrorKind::UnknownAction: return "UnknownAction";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::BadPermutation: return "BadPermutation";
    case ErrorKind::SolverFailure: return "SolverFailure";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

// Every library failure is reported through this type; `kind()` is stable and
// is what the CLI prints in its structured error message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qif

#endif  // QIF_ERROR_HPP
