#pragma once

// End-to-end wiring: clock, bus, firmware, host and trace in one object.

#include "hidsense/bus.hpp"
#include "hidsense/device.hpp"
#include "hidsense/host.hpp"
#include "hidsense/registers.hpp"
#include "hidsense/sensor.hpp"
#include "hidsense/tracer.hpp"

#include <memory>
#include <optional>

namespace hidsense {

struct SimulationConfig {
  Micros duration = 13 * kMicrosPerSecond;
  firmware::SensorSignal sensor;
  registers::RegisterFile registers = registers::RegisterFile::reference();
  Micros host_poll = 10 * kMicrosPerMilli;
  std::optional<Micros> unplug_at;
  Micros keepalive_window = 10 * kMicrosPerMilli;
  bool trace_keepalive = true;
};

class Simulation {
 public:
  /// Throws ConfigError for a nonpositive duration or poll interval, and
  /// for fatal register findings.
  explicit Simulation(SimulationConfig config);

  /// Attaches at t=0 and runs to config.duration. Callable once.
  void run();

  const SimulationConfig& config() const { return config_; }
  const bus::SimClock& clock() const { return clock_; }
  const tracer::TraceLog& trace() const { return trace_; }
  const bus::Bus& bus() const { return *bus_; }
  const firmware::SensorDevice& device() const { return *device_; }
  const host::Host& host() const { return *host_; }

 private:
  SimulationConfig config_;
  bus::SimClock clock_;
  tracer::TraceLog trace_;
  std::unique_ptr<bus::Bus> bus_;
  std::unique_ptr<firmware::SensorDevice> device_;
  std::unique_ptr<host::Host> host_;
  bool ran_ = false;
};

}  // namespace hidsense
