#pragma once

#include <stdexcept>
#include <string>

namespace fjs {

// Categories map one-to-one onto CLI exit codes and C API status codes.
enum class ErrorKind {
  input = 1,
  numerical = 2,
  size_guard = 3,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::input, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::numerical, what) {}
};

class SizeGuardError : public Error {
 public:
  explicit SizeGuardError(const std::string& what)
      : Error(ErrorKind::size_guard, what) {}
};

}  // namespace fjs
