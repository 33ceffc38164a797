#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ifs_cuntz {

/// Base class for everything the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments: bad branch index, invalid weights, malformed words.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A measure or density cannot be evaluated at the requested cylinder depth.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// The geometry tag does not support a metric query.
class UnsupportedGeometry : public Error {
 public:
  using Error::Error;
};

/// Malformed text input (configs, CSV, JSON).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Raised when a Radon-Nikodym derivative does not exist. `witness()` is the
/// textual (0-based) form of the offending cylinder or atom.
class NotAbsolutelyContinuous : public Error {
 public:
  NotAbsolutelyContinuous(const std::string& what, std::string witness)
      : Error(what + " (witness " + witness + ")"), witness_(std::move(witness)) {}

  const std::string& witness() const noexcept { return witness_; }

 private:
  std::string witness_;
};

}  // namespace ifs_cuntz
