#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cbsq {

// Every failure the library reports maps onto one of these kinds; the CLI
// turns each kind into a distinct, documented exit code.
enum class ErrorKind {
  usage,          // caller broke an API precondition (lattice mismatch, wrong frame)
  config,         // bad configuration document or infeasible targets
  io,             // unreadable/corrupt files
  verification,   // a numerical property check failed
  confinement,    // spectral confinement monitor tripped
  nan_abort,      // non-finite values appeared during time stepping
  accuracy,       // quadrature could not meet its tolerance
  domain,         // argument outside the mathematical domain of an operator
  precondition,   // input field violates an operator precondition
};

std::string_view to_string(ErrorKind kind);

// Process exit status for each error kind (0 is success, 1 is reserved for
// unexpected exceptions).
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0, int column = 0);
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace cbsq
