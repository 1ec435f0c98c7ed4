#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace augcl {

// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A value lies outside the domain of the requested operation (log(0), ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// The caller violated a documented precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed dataset input. Carries the file and 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), file_(file), line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

}  // namespace augcl
