#pragma once

#include <stdexcept>
#include <string>

namespace pdflow {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// matrixcore
class RankDeficient : public Error {
 public:
  using Error::Error;
};
class NotSymmetric : public Error {
 public:
  using Error::Error;
};
class NotHermitian : public Error {
 public:
  using Error::Error;
};
class Singular : public Error {
 public:
  using Error::Error;
};
class NoConvergence : public Error {
 public:
  using Error::Error;
};

// problem
class DeclarationViolated : public Error {
 public:
  using Error::Error;
};

// dynamics
class Diverged : public Error {
 public:
  using Error::Error;
};
class NonFiniteGradient : public Error {
 public:
  using Error::Error;
};
class InsufficientDecay : public Error {
 public:
  using Error::Error;
};

// certify
class NotCertifiable : public Error {
 public:
  using Error::Error;
};
class RequiresStrictSubspace : public Error {
 public:
  using Error::Error;
};

// graph
class Disconnected : public Error {
 public:
  using Error::Error;
};

// cli / configuration
class ConfigError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace pdflow
