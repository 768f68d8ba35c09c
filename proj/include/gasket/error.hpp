#pragma once

#include <stdexcept>
#include <string>

namespace gasket {

// Error taxonomy mirrored by the CLI exit codes: parse 2, domain 3, contract 4.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Violated precondition on an input object (missing samples, level mismatch, ...).
struct ContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requested level exceeds the configured cap.
struct LevelCapError : DomainError {
  using DomainError::DomainError;
};

// Must-not-happen conditions (singular targeting system, solver breakdown).
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace gasket
