#pragma once

#include <stdexcept>
#include <string>

namespace hodgekit {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A truncation window cannot certify the requested coefficients.
class ExactnessViolation : public Error {
 public:
  using Error::Error;
};

class IntegrityError : public Error {
 public:
  using Error::Error;
};

class ResourceLimit : public Error {
 public:
  using Error::Error;
};

class DegenerateGrid : public Error {
 public:
  using Error::Error;
};

class PolynomialityViolation : public Error {
 public:
  using Error::Error;
};

class StructureViolation : public Error {
 public:
  using Error::Error;
};

/// Corrupt or partial cache file; the message names the offending line.
class CacheIntegrity : public Error {
 public:
  CacheIntegrity(std::size_t line, const std::string& what)
      : Error("cache line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace hodgekit
