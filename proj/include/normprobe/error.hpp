#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace normprobe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Bad or inconsistent configuration (missing column, missing path, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside an operation's domain (k out of range, negative alpha, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A statistic that is undefined for the given input (constant vector,
/// zero vector, no positive gold labels, rank-deficient design).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A key (word, concept, synset) that could not be resolved.
class LookupError : public Error {
 public:
  using Error::Error;
};

}  // namespace normprobe
