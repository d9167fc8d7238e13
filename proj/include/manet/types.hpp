#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace manet {

using NodeId = std::uint32_t;
using SeqNo = std::uint32_t;

struct Vec2 {
  double x{0.0};
  double y{0.0};

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

// Ground-truth geometry. Every component that needs a true inter-node
// distance goes through this one function so results stay bit-identical.
inline double euclidean(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonPositiveDistance : public Error {
 public:
  using Error::Error;
};

class NonPositivePower : public Error {
 public:
  using Error::Error;
};

class InvalidRadioParams : public Error {
 public:
  using Error::Error;
};

class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

class NoValidReference : public Error {
 public:
  using Error::Error;
};

class SelfDestination : public Error {
 public:
  using Error::Error;
};

class TooFewNodes : public Error {
 public:
  using Error::Error;
};

/// Scenario validation failure. `field()` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Raised by the engine when a run-time invariant breaks (co-location,
/// out-of-area position, event time regression).
class RuntimeInvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace manet
