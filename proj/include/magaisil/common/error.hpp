#pragma once

#include <stdexcept>
#include <string>

namespace magaisil {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (task files, demo files, checkpoints, configs).
class ParseError : public Error {
 public:
  using Error::Error;
};

// A value parsed fine but breaks a domain invariant. `field()` names the
// offending field.
class InvariantError : public Error {
 public:
  InvariantError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Caller broke an operation precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Non-finite values or other numerical failures during training.
class TrainingFault : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace magaisil
