#pragma once

#include <stdexcept>
#include <string>

namespace somchange {

// Coarse failure classes. The CLI maps them to exit codes and the HTTP layer
// to status codes.
enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  Data,
  Numeric,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace somchange
