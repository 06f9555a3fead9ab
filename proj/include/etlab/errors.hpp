#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace etlab {

/// Base of every error raised by the library. Each subclass names one
/// failure family so callers can map it to a report reason or exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, const std::string& message)
      : Error("syntax error at offset " + std::to_string(offset) + ": " +
              message),
        offset_(offset),
        message_(message) {}
  std::size_t offset() const noexcept { return offset_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::size_t offset_;
  std::string message_;
};

class UnknownFunction : public Error {
 public:
  explicit UnknownFunction(const std::string& name, const std::string& context = "")
      : Error((context.empty() ? "" : context + ": ") + "unknown function '" + name + "'"),
        name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class UnboundVariable : public Error {
 public:
  explicit UnboundVariable(const std::string& name, const std::string& context = "")
      : Error((context.empty() ? "" : context + ": ") + "unbound variable '" + name + "'"),
        name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Jets or tensors combined with incompatible shapes.
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

// A derivative was requested beyond the truncation order of a jet.
class OrderExceeded : public Error {
 public:
  using Error::Error;
};

class HeadroomExceeded : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class SingularMetric : public Error {
 public:
  using Error::Error;
};

class MissingStructure : public Error {
 public:
  using Error::Error;
};

class DegenerateWarp : public Error {
 public:
  using Error::Error;
};

class StepFailure : public Error {
 public:
  using Error::Error;
};

class UnsupportedGeometry : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace etlab
