#pragma once

#include <stdexcept>
#include <string>

namespace pbe {

/// Root of all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (e.g. exp overflow).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Evaluation of a point-charge potential at (or too near) a charge.
class SingularityError : public Error {
public:
  using Error::Error;
};

/// Invalid geometric configuration or resolution.
class GeometryError : public Error {
public:
  using Error::Error;
};

class MeshError : public Error {
public:
  using Error::Error;
};

/// Malformed text input; carries the 1-based line number (0 if not applicable).
class ParseError : public Error {
public:
  ParseError(const std::string &what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

/// Linear or nonlinear solver failure (breakdown, nonconvergence).
class SolverError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  ConfigError(const std::string &what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

} // namespace pbe
