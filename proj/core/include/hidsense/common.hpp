#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hidsense {

using Bytes = std::vector<std::uint8_t>;

/// Simulated time in microseconds since simulation start.
using Micros = std::int64_t;

constexpr Micros kMicrosPerMilli = 1'000;
constexpr Micros kMicrosPerSecond = 1'000'000;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input bytes or text.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration (clock plan, sensor spec, register overrides).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A descriptor that violates its own invariants and cannot be serialized.
class SerializeError : public Error {
 public:
  using Error::Error;
};

/// USB-level failure: stall, request on an unconfigured device, etc.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Operation called in the wrong state (double attach, time regression, ...).
class StateError : public Error {
 public:
  using Error::Error;
};

std::string hex_byte(std::uint8_t b);
std::string hex_bytes(const Bytes& bytes, char sep = ' ');

}  // namespace hidsense
