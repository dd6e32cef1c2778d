#pragma once

#include <stdexcept>
#include <string>

namespace rotp {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Requested more basis-key bits than the pad holds.
class PadExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Protocol step invoked out of order, e.g. recycling after a failed check.
class ProtocolViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Evaluation too close to a declared pole.
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Bad user configuration (CLI or SessionConfig).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace rotp
