#pragma once

#include "hidsense/common.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace hidsense::firmware {

enum class SignalKind { Constant, Ramp, Sine, Steps };

/// Voltage source on AN0 standing in for the potentiometer / sensor.
///
///   Constant: volts
///   Ramp:     volts + rate * t
///   Sine:     offset + amplitude * sin(2 pi freq t)
///   Steps:    offset + volts * floor(freq * t)
///
/// Uniform noise in [-noise, +noise] is added, drawn from a hash of
/// (seed, t) so evaluation order does not matter. The result is clamped to
/// the 0-5 V input range.
struct SensorSignal {
  SignalKind kind = SignalKind::Constant;
  double volts = 0.0;
  double rate = 0.0;  // V/s
  double freq = 0.0;  // Hz
  double amplitude = 0.0;
  double offset = 0.0;
  double noise = 0.0;
  std::uint64_t seed = 0;

  friend bool operator==(const SensorSignal&, const SensorSignal&) = default;
};

double sensor_eval(const SensorSignal& signal, Micros t);

/// `kind:arg:arg...` as accepted on the command line:
///   constant:V | ramp:START:RATE | sine:OFFSET:AMPLITUDE:FREQ | steps:OFFSET:STEP:FREQ
SensorSignal parse_sensor_spec(std::string_view spec);

/// key=value lines (kind, volts, rate, freq, amplitude, offset, noise, seed);
/// '#' starts a comment.
SensorSignal parse_sensor_file(std::string_view text);

std::string_view to_string(SignalKind kind);
std::string describe(const SensorSignal& signal);

}  // namespace hidsense::firmware
