#pragma once

#include <stdexcept>
#include <string>

namespace kickchain {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters or configuration. `key()` names the offending field when
// one is known.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg, std::string key = {})
      : Error(msg), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// A dense or memory-bounded operation was asked to exceed its cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Vector or matrix dimensions do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Argument outside the supported numerical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Not enough data points for a fit.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// Reading or writing an output file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace kickchain
