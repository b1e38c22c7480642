#pragma once

#include "hidsense/common.hpp"

#include <cstdint>

namespace hidsense::firmware {

enum class CpuClockSource { Pll, Oscillator };

/// Oscillator tree of the PIC18F4550: crystal -> PLL prescaler (must yield
/// 4 MHz) -> 96 MHz PLL, feeding the USB module through USBDIV and the CPU
/// through the PLL postscaler.
struct ClockPlan {
  std::uint64_t crystal_hz = 0;
  int plldiv = 1;
  CpuClockSource cpu_source = CpuClockSource::Pll;
  int cpudiv = 1;
  int usbdiv = 2;
  std::uint64_t cpu_hz = 0;
  std::uint64_t usb_hz = 0;

  friend bool operator==(const ClockPlan&, const ClockPlan&) = default;
};

constexpr std::uint64_t kPllInputHz = 4'000'000;
constexpr std::uint64_t kPllOutputHz = 96'000'000;

/// usb_hz = 96 MHz / usbdiv. With the PLL as CPU source
/// cpu_hz = 96 MHz / 2 / cpudiv, otherwise crystal / cpudiv.
/// Throws ConfigError when crystal / plldiv is not exactly 4 MHz or a divider
/// is not positive.
ClockPlan derive_clocks(std::uint64_t crystal_hz, int plldiv, int usbdiv,
                        CpuClockSource cpu_source, int cpudiv);

/// 8 MHz crystal, _PLL_DIV2, _USBDIV_2, CPUDIV_OSC1_PLL2: 48 MHz CPU and USB.
ClockPlan reference_clock_plan();

}  // namespace hidsense::firmware
