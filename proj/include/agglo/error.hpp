#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace agglo {

// Problems with user-supplied input: malformed files, bad expressions,
// unusable configurations. The CLI maps these to exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public InputError {
 public:
  using InputError::InputError;
};

class ValidationError : public InputError {
 public:
  using InputError::InputError;
};

class EmptyLogError : public InputError {
 public:
  using InputError::InputError;
};

class UsageError : public InputError {
 public:
  using InputError::InputError;
};

class SyntaxError : public InputError {
 public:
  SyntaxError(const std::string& what, std::size_t position)
      : InputError(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

// Automaton or enumeration grew past a documented guard.
class CapacityError : public InputError {
 public:
  using InputError::InputError;
};

class GenerationError : public InputError {
 public:
  using InputError::InputError;
};

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

// A broken internal invariant (a bug, not bad input). Exit code 2.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace agglo
