#pragma once

#include <stdexcept>
#include <string>

namespace pathid {

/// Base class for every error raised by the library. The CLI maps the
/// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed setup text. Carries the 1-based line number of the offending line.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A well-formed request that violates a precondition (bad element ordering,
/// |T| > 1, PBS on a photon without H/V polarization, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A symbolic parameter was referenced but never bound.
class UnboundParameter : public ValidationError {
 public:
  explicit UnboundParameter(const std::string& name)
      : ValidationError("unbound parameter '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Numerically degenerate request (zero-norm state, divergent series, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace pathid
