#pragma once

#include <stdexcept>
#include <string>

namespace uscgibbs {

// Input violates a type invariant (non-Hermitian matrix, dimension mismatch, beta <= 0, ...).
class InvariantError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// A numerical precondition does not hold for otherwise well-formed input,
// e.g. a thermal well that leaks into the grid walls.
class PreconditionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace uscgibbs
