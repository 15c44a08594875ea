#ifndef MSPEC_ERROR_HPP
#define MSPEC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mspec {

enum class ErrorKind {
  ShapeMismatch,
  MemoryBudget,
  InvalidArgument,
  Singular,
  Overflow,
  Io,
  Parse,
};

/// Structured error carried through every module; callers can branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::ShapeMismatch: return "shape-mismatch";
    case ErrorKind::MemoryBudget: return "memory-budget";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Singular: return "singular";
    case ErrorKind::Overflow: return "overflow";
    case ErrorKind::Io: return "io";
    case ErrorKind::Parse: return "parse";
  }
  return "unknown";
}

}  // namespace mspec

#endif
