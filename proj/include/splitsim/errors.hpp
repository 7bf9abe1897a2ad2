#pragma once

#include <stdexcept>
#include <string>

namespace splitsim {

// Base class for every error raised by the library. The CLI maps each
// subclass to a distinct exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or unreadable model profile file.
class ProfileError : public Error {
 public:
  using Error::Error;
};

// Malformed run configuration (file, override, or value range).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Violated precondition or invariant during simulation/solving.
class SimError : public Error {
 public:
  using Error::Error;
};

// A link whose rate is zero while data must cross it.
class UnreachableLinkError : public SimError {
 public:
  using SimError::SimError;
};

}  // namespace splitsim
