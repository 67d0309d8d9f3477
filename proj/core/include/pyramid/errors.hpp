#pragma once

#include <stdexcept>
#include <string>

namespace pyramid {

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A population or plan violates its invariants.
class InvalidConfig : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

// The experiment config file could not be read or parsed.
class ConfigError : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

// A market order asked for more units than rest on the opposite side. In this
// model the main fund must never be able to swallow a whole side.
class BookExhausted : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

// A limit order would have crossed the book on placement. The engine never
// produces crossing quotes, so this indicates a sequencing bug.
class CrossedBook : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

class NonTermination : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

class InvariantViolation : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

// Closed-form evaluation ran past the end of an activated ladder.
class InsufficientDepth : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

}  // namespace pyramid
