#include "hidsense/sensor.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace hidsense::firmware {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform in [-1, 1), a pure function of (seed, t).
double unit_noise(std::uint64_t seed, Micros t) {
  const std::uint64_t h = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(t)));
  return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view field, std::string_view what) {
  field = trim(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value)) {
    throw ConfigError("sensor: bad " + std::string(what) + " '" + std::string(field) + "'");
  }
  return value;
}

std::uint64_t parse_seed(std::string_view field) {
  field = trim(field);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ConfigError("sensor: bad seed '" + std::string(field) + "'");
  }
  return value;
}

SignalKind parse_kind(std::string_view name) {
  name = trim(name);
  if (name == "constant") return SignalKind::Constant;
  if (name == "ramp") return SignalKind::Ramp;
  if (name == "sine") return SignalKind::Sine;
  if (name == "steps") return SignalKind::Steps;
  throw ConfigError("sensor: unknown kind '" + std::string(name) + "'");
}

void check(const SensorSignal& s) {
  if (s.noise < 0.0) throw ConfigError("sensor: noise must be >= 0");
  if (s.freq < 0.0) throw ConfigError("sensor: freq must be >= 0");
}

}  // namespace

double sensor_eval(const SensorSignal& s, Micros t) {
  const double secs = static_cast<double>(t) / static_cast<double>(kMicrosPerSecond);
  double v = 0.0;
  switch (s.kind) {
    case SignalKind::Constant:
      v = s.volts;
      break;
    case SignalKind::Ramp:
      v = s.volts + s.rate * secs;
      break;
    case SignalKind::Sine:
      v = s.offset + s.amplitude * std::sin(2.0 * std::numbers::pi * s.freq * secs);
      break;
    case SignalKind::Steps:
      v = s.offset + s.volts * std::floor(s.freq * secs);
      break;
  }
  if (s.noise > 0.0) v += s.noise * unit_noise(s.seed, t);
  if (std::isnan(v)) return 0.0;
  return std::clamp(v, 0.0, 5.0);
}

SensorSignal parse_sensor_spec(std::string_view spec) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = spec.find(':', start);
    parts.push_back(spec.substr(start, colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  SensorSignal s;
  s.kind = parse_kind(parts[0]);
  const std::size_t want = s.kind == SignalKind::Constant ? 2 : s.kind == SignalKind::Ramp ? 3 : 4;
  if (parts.size() != want) {
    throw ConfigError("sensor: '" + std::string(spec) + "' expects " + std::to_string(want - 1) +
                      " argument(s)");
  }
  switch (s.kind) {
    case SignalKind::Constant:
      s.volts = parse_number(parts[1], "volts");
      break;
    case SignalKind::Ramp:
      s.volts = parse_number(parts[1], "start volts");
      s.rate = parse_number(parts[2], "rate");
      break;
    case SignalKind::Sine:
      s.offset = parse_number(parts[1], "offset");
      s.amplitude = parse_number(parts[2], "amplitude");
      s.freq = parse_number(parts[3], "freq");
      break;
    case SignalKind::Steps:
      s.offset = parse_number(parts[1], "offset");
      s.volts = parse_number(parts[2], "step");
      s.freq = parse_number(parts[3], "freq");
      break;
  }
  check(s);
  return s;
}

SensorSignal parse_sensor_file(std::string_view text) {
  SensorSignal s;
  bool have_kind = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("sensor file line " + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = line.substr(eq + 1);
    if (key == "kind") {
      s.kind = parse_kind(value);
      have_kind = true;
    } else if (key == "volts") {
      s.volts = parse_number(value, key);
    } else if (key == "rate") {
      s.rate = parse_number(value, key);
    } else if (key == "freq") {
      s.freq = parse_number(value, key);
    } else if (key == "amplitude") {
      s.amplitude = parse_number(value, key);
    } else if (key == "offset") {
      s.offset = parse_number(value, key);
    } else if (key == "noise") {
      s.noise = parse_number(value, key);
    } else if (key == "seed") {
      s.seed = parse_seed(value);
    } else {
      throw ConfigError("sensor file line " + std::to_string(line_no) + ": unknown key '" +
                        std::string(key) + "'");
    }
  }
  if (!have_kind) throw ConfigError("sensor file: missing 'kind'");
  check(s);
  return s;
}

std::string_view to_string(SignalKind kind) {
  switch (kind) {
    case SignalKind::Constant: return "constant";
    case SignalKind::Ramp: return "ramp";
    case SignalKind::Sine: return "sine";
    case SignalKind::Steps: return "steps";
  }
  return "?";
}

std::string describe(const SensorSignal& s) {
  std::ostringstream out;
  out << to_string(s.kind);
  switch (s.kind) {
    case SignalKind::Constant: out << " " << s.volts << " V"; break;
    case SignalKind::Ramp: out << " " << s.volts << " V + " << s.rate << " V/s"; break;
    case SignalKind::Sine:
      out << " " << s.offset << " V + " << s.amplitude << " V @ " << s.freq << " Hz";
      break;
    case SignalKind::Steps:
      out << " " << s.offset << " V + " << s.volts << " V every 1/" << s.freq << " s";
      break;
  }
  if (s.noise > 0.0) out << ", noise " << s.noise << " V (seed " << s.seed << ")";
  return out.str();
}

}  // namespace hidsense::firmware
