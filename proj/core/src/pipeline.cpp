#include "hidsense/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace hidsense::firmware {

AdcCode::AdcCode(int code) : code_(code) {
  if (code < 0 || code > kMax) {
    throw ConfigError("ADC code " + std::to_string(code) + " outside 0..1023");
  }
}

AdcCode adc_sample(double volts) {
  if (!(volts > 0.0)) return AdcCode(0);  // also catches NaN
  const double scaled = std::floor(volts * 1024.0 / kFullScaleVolts);
  return AdcCode(scaled >= AdcCode::kMax ? AdcCode::kMax : static_cast<int>(scaled));
}

double code_to_voltage(AdcCode code) { return (code.value() * 5.0) / 1024.0; }

double voltage_to_celsius(double volts) { return volts * 100.0; }

std::int64_t celsius_to_int(double celsius) { return static_cast<std::int64_t>(celsius); }

OpBuffer long_to_str(std::int64_t n) {
  std::array<char, 24> digits{};
  const auto [end, ec] = std::to_chars(digits.data(), digits.data() + digits.size(), n);
  const auto len = static_cast<std::size_t>(end - digits.data());
  if (ec != std::errc{} || len > kOpWidth) {
    throw Error("LongToStr: " + std::to_string(n) + " does not fit in 12 characters");
  }
  OpBuffer op;
  op.fill(' ');
  std::copy(digits.data(), end, op.begin() + static_cast<std::ptrdiff_t>(kOpWidth - len));
  return op;
}

std::string_view as_text(const OpBuffer& op) { return {op.data(), op.size()}; }

TemperatureReport::TemperatureReport() { chars_.fill(' '); }

TemperatureReport TemperatureReport::from_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kSize) {
    throw ParseError("temperature report must be 4 bytes, got " + std::to_string(bytes.size()));
  }
  std::array<char, kSize> chars{};
  bool seen_space = false;
  for (std::size_t i = 0; i < kSize; ++i) {
    const auto c = static_cast<char>(bytes[i]);
    const bool digit = c >= '0' && c <= '9';
    if (c == ' ') {
      seen_space = true;
    } else if (!digit && c != '-') {
      throw ParseError("temperature report byte 0x" + hex_byte(bytes[i]) + " is not a digit");
    } else if (seen_space) {
      throw ParseError("temperature report is not left-packed");
    }
    chars[i] = c;
  }
  return TemperatureReport(chars);
}

TemperatureReport TemperatureReport::from_text(std::string_view text) {
  Bytes bytes(text.begin(), text.end());
  return from_bytes(bytes);
}

Bytes TemperatureReport::bytes() const { return Bytes(chars_.begin(), chars_.end()); }

BlankRemoval remove_blank(const OpBuffer& op) {
  std::array<char, TemperatureReport::kSize> out;
  out.fill(' ');
  std::size_t j = 0;
  bool truncated = false;
  for (char c : op) {
    if (c == ' ') continue;
    if (j == out.size()) {
      truncated = true;
      break;
    }
    out[j++] = c;
  }
  return {TemperatureReport::from_bytes(Bytes(out.begin(), out.end())), truncated};
}

ConversionTrace make_report(AdcCode code) {
  ConversionTrace t;
  t.vin = code;
  t.voltage = code_to_voltage(code);
  t.celsius = voltage_to_celsius(t.voltage);
  t.cint = celsius_to_int(t.celsius);
  t.op = long_to_str(t.cint);
  auto removed = remove_blank(t.op);
  t.report = removed.report;
  t.truncated = removed.truncated;
  return t;
}

double TimerPeriod::micros() const {
  return static_cast<double>(ticks) * 1e6 / static_cast<double>(f_cpu_hz);
}

bool TimerPeriod::exact_on_ns_grid() const { return (ticks * 1'000'000'000ULL) % f_cpu_hz == 0; }

std::int64_t TimerPeriod::nanos() const {
  const std::uint64_t scaled = ticks * 1'000'000'000ULL;
  return static_cast<std::int64_t>((scaled + f_cpu_hz / 2) / f_cpu_hz);
}

Micros TimerPeriod::sim_micros() const {
  const std::uint64_t scaled = ticks * 1'000'000ULL;
  const auto us = static_cast<Micros>((scaled + f_cpu_hz / 2) / f_cpu_hz);
  return std::max<Micros>(us, 1);
}

TimerPeriod timer0_interval(int prescale, int reload, std::uint64_t f_cpu_hz,
                            bool eight_bit_mode) {
  const int overflow = eight_bit_mode ? 256 : 65536;
  if (prescale < 1 || reload < 0 || reload >= overflow || f_cpu_hz == 0) {
    throw ConfigError("invalid Timer0 parameters");
  }
  return TimerPeriod{
      .ticks = static_cast<std::uint64_t>(overflow - reload) * static_cast<std::uint64_t>(prescale),
      .f_cpu_hz = f_cpu_hz,
  };
}

}  // namespace hidsense::firmware
