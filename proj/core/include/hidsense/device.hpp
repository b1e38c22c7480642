#pragma once

// The sensor firmware running on the virtual PIC18F4550:
//
//   init registers, enable Timer0 interrupt, Hid_Enable
//   wait 1 s, wait 1 s
//   loop: read AN0, convert, Hid_Write 4 chars, wait 1 s
//
// with a Timer0 ISR that calls the HID library's keep-alive on every
// overflow. The 1 s waits never block the ISR.

#include "hidsense/bus.hpp"
#include "hidsense/clock_plan.hpp"
#include "hidsense/descriptors.hpp"
#include "hidsense/pipeline.hpp"
#include "hidsense/registers.hpp"
#include "hidsense/sensor.hpp"

#include <optional>
#include <vector>

namespace hidsense::firmware {

struct DeviceOptions {
  ClockPlan clock = reference_clock_plan();
  descriptors::DescriptorSet descriptors = descriptors::build_reference_descriptor_set();
  /// Two back-to-back Delay_ms(1000) after Hid_Enable.
  Micros startup_delay = 2 * kMicrosPerSecond;
  Micros loop_delay = kMicrosPerSecond;
};

enum class UsbState { Detached, Default, Address, Configured };

struct ReportRecord {
  Micros time = 0;
  double volts = 0.0;
  ConversionTrace conversion;
};

class SensorDevice final : public bus::UsbDevice {
 public:
  /// Throws ConfigError when validate_firmware_config reports a fatal finding.
  SensorDevice(registers::RegisterFile regs, SensorSignal signal, DeviceOptions options = {});

  void on_attach(bus::Bus& bus) override;
  void on_detach() override;
  std::optional<Bytes> handle_setup(const bus::SetupRequest& req) override;
  bool configured() const override { return usb_state_ == UsbState::Configured; }
  const descriptors::EndpointDescriptor* endpoint(std::uint8_t address) const override;
  std::optional<bus::PendingData> take_in_data(std::uint8_t address) override;

  /// Hid_Disable: halts the firmware loop and drops off the bus.
  void stop();

  bool running() const { return running_; }
  UsbState usb_state() const { return usb_state_; }
  std::uint8_t address() const { return address_; }

  const std::vector<ReportRecord>& reports() const { return reports_; }
  /// Diagnostic mirror of the last integer temperature (PORTB = Cint).
  std::uint8_t portb() const { return portb_; }
  std::uint64_t isr_count() const { return isr_count_; }
  /// Keep-alive period on the simulator grid; nullopt when the Timer0
  /// interrupt is not enabled.
  std::optional<Micros> keepalive_period() const { return keepalive_period_; }

  const registers::RegisterFile& registers() const { return regs_; }
  const std::vector<registers::Finding>& findings() const { return findings_; }

 private:
  void timer0_isr(std::uint64_t gen);
  void main_loop_iteration(std::uint64_t gen);
  bool live(std::uint64_t gen) const { return running_ && gen == generation_; }

  registers::RegisterFile regs_;
  SensorSignal signal_;
  DeviceOptions options_;
  std::vector<registers::Finding> findings_;
  std::optional<Micros> keepalive_period_;

  bus::Bus* bus_ = nullptr;
  bool running_ = false;
  std::uint64_t generation_ = 0;
  UsbState usb_state_ = UsbState::Detached;
  std::uint8_t address_ = 0;
  std::uint8_t configuration_ = 0;

  std::optional<TemperatureReport> in_slot_;  // Hid_Write buffer, depth 1
  std::uint32_t overwritten_ = 0;
  TemperatureReport last_written_;
  std::vector<ReportRecord> reports_;
  std::uint8_t portb_ = 0;
  std::uint64_t isr_count_ = 0;
};

}  // namespace hidsense::firmware
