#include "cbsq/errors.hpp"

namespace cbsq {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage: return "usage";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
    case ErrorKind::verification: return "verification";
    case ErrorKind::confinement: return "confinement";
    case ErrorKind::nan_abort: return "nan_abort";
    case ErrorKind::accuracy: return "accuracy";
    case ErrorKind::domain: return "domain";
    case ErrorKind::precondition: return "precondition";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage:
    case ErrorKind::config: return 2;
    case ErrorKind::io: return 3;
    case ErrorKind::verification: return 4;
    case ErrorKind::confinement: return 5;
    case ErrorKind::nan_abort: return 6;
    case ErrorKind::accuracy: return 7;
    case ErrorKind::domain:
    case ErrorKind::precondition: return 8;
  }
  return 1;
}

namespace {
std::string located(const std::string& what, int line, int column) {
  if (line <= 0) return what;
  return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what;
}
}  // namespace

ConfigError::ConfigError(const std::string& what, int line, int column)
    : Error(ErrorKind::config, located(what, line, column)), line_(line), column_(column) {}

}  // namespace cbsq
