#pragma once

#include <stdexcept>
#include <string>

namespace wis {

enum class ErrorKind {
  invalid_parameter,
  girth_unsatisfiable,
  malformed_input,
  not_simple,
  not_regular,
  disconnected,
  precondition_violation,
  degenerate_fitness,
  unsupported,
  instance_too_large,
  invalid_chain,
  bound_not_applicable,
  numerical_failure,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it to an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace wis
