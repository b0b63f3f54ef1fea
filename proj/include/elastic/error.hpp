#pragma once

#include <stdexcept>
#include <string>

namespace elastic {

enum class ErrorKind {
  InvariantViolation,
  InvalidArgument,
  UnsupportedLength,
  KeyUnderrun,
  KeyMismatch,
  CostGuard,
  ReductionFailed,
  BadContainer,
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvariantViolation: return "invariant violation";
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::UnsupportedLength: return "unsupported length";
    case ErrorKind::KeyUnderrun: return "key underrun";
    case ErrorKind::KeyMismatch: return "key mismatch";
    case ErrorKind::CostGuard: return "cost guard";
    case ErrorKind::ReductionFailed: return "reduction failed";
    case ErrorKind::BadContainer: return "bad container";
  }
  return "unknown";
}

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace elastic
