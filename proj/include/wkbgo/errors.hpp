#pragma once

#include <stdexcept>
#include <string>

namespace wkbgo {

/// Vectors or fields of incompatible shape were combined.
class DimensionMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An integrator left the region where its solution is known to exist.
class BlowUpError : public std::runtime_error {
public:
  BlowUpError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

private:
  double time_;
};

/// NaN or overflow detected in a numerical state.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed scenario or mode-set document. `where()` names the offending field.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(where) {}
  const std::string& where() const noexcept { return where_; }

private:
  std::string where_;
};

}  // namespace wkbgo
