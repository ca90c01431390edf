#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ghyp {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Iterative or adaptive routine stopped before meeting its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Malformed input text. `line()` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// The data or the requested combination of models cannot support the
// requested statistic (empty graph, non-nested pair, infeasible moments...).
class StatisticalError : public Error {
 public:
  using Error::Error;
};

}  // namespace ghyp
