#pragma once

#include <stdexcept>
#include <string>

namespace hspec {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Trimming removed every symbol: no bi-infinite sequence survives.
class EmptySystem : public Error {
 public:
  using Error::Error;
};

class InadmissibleWord : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class NoCycle : public Error {
 public:
  using Error::Error;
};

class DegenerateSet : public Error {
 public:
  using Error::Error;
};

// The threshold-pruned system contains no subhorseshoe.
class EmptyPrune : public Error {
 public:
  using Error::Error;
};

class BoundExceeded : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hspec
