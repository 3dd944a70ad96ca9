#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace softcap {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or spec (maps to CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed trace or profile file. Carries the offending step when known.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, std::optional<std::size_t> step = std::nullopt)
      : Error(what), step_(step) {}
  std::optional<std::size_t> step() const { return step_; }

 private:
  std::optional<std::size_t> step_;
};

/// A referenced reference-profile file does not exist.
class MissingProfileError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class StateError : public Error {
 public:
  using Error::Error;
};

class OrderingError : public Error {
 public:
  using Error::Error;
};

/// Cache requested beyond the max-skip distance.
class GuardViolation : public Error {
 public:
  using Error::Error;
};

class AccountingError : public Error {
 public:
  using Error::Error;
};

class DegenerateProfileError : public Error {
 public:
  using Error::Error;
};

}  // namespace softcap
