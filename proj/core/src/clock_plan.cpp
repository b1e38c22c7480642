#include "hidsense/clock_plan.hpp"

#include "hidsense/common.hpp"

#include <string>

namespace hidsense::firmware {

ClockPlan derive_clocks(std::uint64_t crystal_hz, int plldiv, int usbdiv,
                        CpuClockSource cpu_source, int cpudiv) {
  if (plldiv <= 0 || usbdiv <= 0 || cpudiv <= 0) {
    throw ConfigError("clock dividers must be positive");
  }
  if (crystal_hz % static_cast<std::uint64_t>(plldiv) != 0 ||
      crystal_hz / static_cast<std::uint64_t>(plldiv) != kPllInputHz) {
    throw ConfigError("PLL input must be 4 MHz, got " + std::to_string(crystal_hz) + " Hz / " +
                      std::to_string(plldiv));
  }
  ClockPlan plan;
  plan.crystal_hz = crystal_hz;
  plan.plldiv = plldiv;
  plan.cpu_source = cpu_source;
  plan.cpudiv = cpudiv;
  plan.usbdiv = usbdiv;
  plan.usb_hz = kPllOutputHz / static_cast<std::uint64_t>(usbdiv);
  plan.cpu_hz = cpu_source == CpuClockSource::Pll
                    ? kPllOutputHz / 2 / static_cast<std::uint64_t>(cpudiv)
                    : crystal_hz / static_cast<std::uint64_t>(cpudiv);
  return plan;
}

ClockPlan reference_clock_plan() {
  return derive_clocks(8'000'000, 2, 2, CpuClockSource::Pll, 1);
}

}  // namespace hidsense::firmware
