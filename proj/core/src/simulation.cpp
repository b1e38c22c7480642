#include "hidsense/simulation.hpp"

namespace hidsense {

Simulation::Simulation(SimulationConfig config) : config_(std::move(config)) {
  if (config_.duration <= 0) throw ConfigError("duration must be positive");
  if (config_.host_poll <= 0) throw ConfigError("poll interval must be positive");
  if (config_.unplug_at && (*config_.unplug_at < 0 || *config_.unplug_at > config_.duration)) {
    throw ConfigError("unplug time outside the run");
  }
  bus::Bus::Options bus_options;
  bus_options.keepalive_window = config_.keepalive_window;
  bus_options.trace_keepalive = config_.trace_keepalive;
  bus_ = std::make_unique<bus::Bus>(clock_, trace_, bus_options);
  device_ = std::make_unique<firmware::SensorDevice>(config_.registers, config_.sensor);
  host::Host::Options host_options;
  host_options.poll_interval = config_.host_poll;
  host_ = std::make_unique<host::Host>(*bus_, host_options);
}

void Simulation::run() {
  if (ran_) throw StateError("simulation already ran");
  ran_ = true;
  bus_->attach(*device_);
  if (config_.unplug_at) {
    clock_.schedule_at(*config_.unplug_at, [this] {
      if (device_->running()) device_->stop();
    });
  }
  clock_.run_until(config_.duration);
}

}  // namespace hidsense
