#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace riskprop {

// Base for every failure raised by the library. Callers that only need a
// message catch this; the CLI maps it to exit code 1.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Input text that cannot be interpreted. line() is 1-based, 0 when unknown.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

}  // namespace riskprop
