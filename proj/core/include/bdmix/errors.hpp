#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bdmix {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (bad chain, bad parameter, bad file).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// The operation needs an irreducible chain and did not get one.
class ReducibleChain : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// An iterative search ran past its step budget without reaching its target
/// (e.g. a periodic chain that never mixes).
class HorizonExceeded : public Error {
 public:
  HorizonExceeded(const std::string& what, std::size_t horizon)
      : Error(what), horizon_(horizon) {}
  std::size_t horizon() const noexcept { return horizon_; }

 private:
  std::size_t horizon_;
};

/// Floating-point drift beyond what the tolerance policy allows.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace bdmix
