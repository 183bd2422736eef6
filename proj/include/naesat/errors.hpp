#pragma once

#include <stdexcept>
#include <string>

namespace naesat {

// Bad parameters or malformed input; the CLI maps these to exit code 2.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Instance too large for an exhaustive routine.
class SizeGuardError : public InputError {
 public:
  using InputError::InputError;
};

// Search or iteration hit its configured budget; exit code 3 in the CLI.
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BudgetExhausted : public NonConvergence {
 public:
  using NonConvergence::NonConvergence;
};

// An identity that must hold at a valid fixed point did not.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ParseErrorKind { MalformedHeader, DegreeMismatch, Arity, IndexOutOfRange, Io };

class ParseError : public InputError {
 public:
  ParseError(ParseErrorKind kind, const std::string& msg) : InputError(msg), kind_(kind) {}
  ParseErrorKind kind() const { return kind_; }

 private:
  ParseErrorKind kind_;
};

}  // namespace naesat
