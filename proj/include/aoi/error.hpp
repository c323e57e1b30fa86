#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace aoi {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: out-of-range parameters, malformed configuration.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class InvalidRate : public ValidationError {
 public:
  explicit InvalidRate(double rate)
      : ValidationError("arrival rate must lie in (0, 1], got " + std::to_string(rate)), rate_(rate) {}
  double rate() const noexcept { return rate_; }

 private:
  double rate_;
};

// The staleness function never reaches the update cost.
class NoCapExists : public ValidationError {
 public:
  NoCapExists() : ValidationError("staleness function stays below the update cost; no cap threshold exists") {}
};

// Configuration error that remembers the offending field, e.g. "model.staleness.values[2]".
class ConfigError : public ValidationError {
 public:
  ConfigError(std::string field, const std::string& what)
      : ValidationError(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyTrace : public Error {
 public:
  EmptyTrace() : Error("trace contains no valid timestamps") {}
};

class ReactiveWithoutRequest : public Error {
 public:
  ReactiveWithoutRequest() : Error("reactive policy queried on a slot without a request") {}
};

class NotReactive : public Error {
 public:
  explicit NotReactive(std::int64_t slot)
      : Error("schedule updates at request-free slot " + std::to_string(slot)), slot_(slot) {}
  std::int64_t slot() const noexcept { return slot_; }

 private:
  std::int64_t slot_;
};

class NoCompletedInterval : public Error {
 public:
  NoCompletedInterval() : Error("simulation recorded no completed renewal interval") {}
};

class NoConvergence : public Error {
 public:
  NoConvergence(std::size_t iterations, double residual)
      : Error("value iteration did not converge after " + std::to_string(iterations) +
              " iterations (residual " + std::to_string(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}
  std::size_t iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  std::size_t iterations_;
  double residual_;
};

class TooLarge : public Error {
 public:
  TooLarge(std::size_t n, std::size_t limit)
      : Error("instance with " + std::to_string(n) + " decision points exceeds enumeration bound " +
              std::to_string(limit)) {}
};

}  // namespace aoi
