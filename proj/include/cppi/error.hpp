#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cppi {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A parameter violates its documented invariant. `field()` names the offender.
class ValidationError : public Error {
public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

class NonPsdError : public Error {
public:
  using Error::Error;
};

// Floor at t=0 is at or above the initial portfolio value: no risk budget.
class InfeasibleGuarantee : public Error {
public:
  using Error::Error;
};

class ZeroPortfolio : public Error {
public:
  using Error::Error;
};

class InsufficientPaths : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class NonMonotoneDates : public ParseError {
public:
  using ParseError::ParseError;
};

class NonPositivePrice : public ParseError {
public:
  using ParseError::ParseError;
};

// File could not be opened, read or written.
class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace cppi
