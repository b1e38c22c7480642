#pragma once

// The firmware's sample-to-report conversion chain and Timer0 arithmetic.
//
//   code -> volts (code * 5 / 1024) -> Celsius (volts * 100) -> int (truncate)
//        -> 12-char right-justified decimal -> 4-char left-packed report
//
// Every stage is a separate function so the chain can be checked step by step.

#include "hidsense/common.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace hidsense::firmware {

/// A 10-bit conversion result.
class AdcCode {
 public:
  static constexpr int kMax = 1023;

  /// Throws ConfigError outside 0..=1023.
  explicit AdcCode(int code);

  int value() const { return code_; }

  friend bool operator==(AdcCode, AdcCode) = default;

 private:
  int code_;
};

constexpr double kFullScaleVolts = 5.0;

/// floor(v * 1024 / 5) clamped to 0..=1023. Inputs outside [0, 5] clamp too.
AdcCode adc_sample(double volts);

double code_to_voltage(AdcCode code);
double voltage_to_celsius(double volts);

/// C cast semantics: truncation toward zero.
std::int64_t celsius_to_int(double celsius);

constexpr std::size_t kOpWidth = 12;
using OpBuffer = std::array<char, kOpWidth>;

/// Decimal text right-justified in 12 characters, space padded. Throws Error
/// when the text (sign included) does not fit.
OpBuffer long_to_str(std::int64_t n);

std::string_view as_text(const OpBuffer& op);

/// Four ASCII bytes carried by one interrupt-IN transfer. Bytes are digits,
/// '-' or space, with all spaces trailing.
class TemperatureReport {
 public:
  static constexpr std::size_t kSize = 4;

  TemperatureReport();  // four spaces

  /// Throws ParseError when the bytes violate the report invariants.
  static TemperatureReport from_bytes(std::span<const std::uint8_t> bytes);
  static TemperatureReport from_text(std::string_view text);

  std::string_view text() const { return {chars_.data(), chars_.size()}; }
  Bytes bytes() const;

  friend bool operator==(const TemperatureReport&, const TemperatureReport&) = default;

 private:
  explicit TemperatureReport(const std::array<char, kSize>& chars) : chars_(chars) {}

  std::array<char, kSize> chars_;
};

struct BlankRemoval {
  TemperatureReport report;
  /// More than four non-blank characters were present; the rest were dropped.
  bool truncated = false;
};

BlankRemoval remove_blank(const OpBuffer& op);

struct ConversionTrace {
  AdcCode vin{0};
  double voltage = 0.0;
  double celsius = 0.0;
  std::int64_t cint = 0;
  OpBuffer op{};
  TemperatureReport report;
  bool truncated = false;
};

ConversionTrace make_report(AdcCode code);

/// Timer0 overflow period: (overflow - reload) * prescale ticks of 1/f_cpu,
/// where overflow is 256 in 8-bit mode and 65536 in 16-bit mode. The tick is
/// taken as one CPU clock period, not Fosc/4.
struct TimerPeriod {
  std::uint64_t ticks = 0;
  std::uint64_t f_cpu_hz = 1;

  double micros() const;
  /// Whether the period is a whole number of nanoseconds.
  bool exact_on_ns_grid() const;
  std::int64_t nanos() const;  // rounded to nearest
  /// Period on the simulator's microsecond grid: rounded, at least 1.
  Micros sim_micros() const;
};

TimerPeriod timer0_interval(int prescale, int reload, std::uint64_t f_cpu_hz,
                            bool eight_bit_mode = true);

}  // namespace hidsense::firmware
