#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uniloc {

// Input outside the mathematical domain of an operation (nonpositive depth,
// vector outside [0,1], dimension below its prior, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A camera-frame point that does not lie inside the box it was labeled against.
class OutsideBoxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfImageError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Zero-baseline rig, all-zero MultiBin offsets and similar unobservable setups.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An alignment problem without a single foreground element.
class NoSupportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OvercrowdedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  // 1-based; 0 when the error is not tied to a line.
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class LengthError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace uniloc
