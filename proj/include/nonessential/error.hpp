#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace nonessential {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression source. `position` is a byte offset into the input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Division by zero, domain errors, or a diverging state trajectory.
class EvalError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> problems)
      : Error(join(problems)), problems_(std::move(problems)) {}

  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out = "invalid problem:";
    for (const auto& item : items) out += " " + item + ";";
    return out;
  }

  std::vector<std::string> problems_;
};

/// No feasible point was found by a solver run.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace nonessential
