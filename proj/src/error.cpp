#include "wis/error.hpp"

namespace wis {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::girth_unsatisfiable: return "girth-unsatisfiable";
    case ErrorKind::malformed_input: return "malformed-input";
    case ErrorKind::not_simple: return "not-simple";
    case ErrorKind::not_regular: return "non-regular";
    case ErrorKind::disconnected: return "disconnected";
    case ErrorKind::precondition_violation: return "precondition-violation";
    case ErrorKind::degenerate_fitness: return "degenerate-fitness";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::instance_too_large: return "instance-too-large";
    case ErrorKind::invalid_chain: return "invalid-chain";
    case ErrorKind::bound_not_applicable: return "bound-not-applicable";
    case ErrorKind::numerical_failure: return "numerical-failure";
  }
  return "unknown";
}

}  // namespace wis
