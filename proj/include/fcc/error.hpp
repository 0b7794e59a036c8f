#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fcc {

enum class ErrorKind {
  MalformedInput,
  Dimension,
  Argument,
  Infeasible,
  Capability,
  Inconsistent,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library, tagged with its kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fcc
