#pragma once

#include <stdexcept>
#include <string>

namespace mcfa {

/// Shapes or indices that do not fit together.
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An argument outside the domain of the operation (non-positive gamma,
/// empty split, n = 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed input text.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input carrying values the model cannot accept.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite objective or similar breakdown inside a solver.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mcfa
