#include "hidsense/device.hpp"

namespace hidsense::firmware {

namespace dt = descriptors::type;

SensorDevice::SensorDevice(registers::RegisterFile regs, SensorSignal signal,
                           DeviceOptions options)
    : regs_(regs), signal_(signal), options_(std::move(options)) {
  findings_ = registers::validate_firmware_config(regs_);
  if (registers::has_fatal(findings_)) {
    std::string msg = "firmware configuration cannot run:";
    for (const auto& f : findings_) {
      if (f.severity == registers::Severity::Fatal) msg += " " + f.message + ";";
    }
    throw ConfigError(msg);
  }
  const auto timer = registers::timer0_config(regs_);
  if (timer.enabled && timer.overflow_interrupt_enabled) {
    keepalive_period_ =
        timer0_interval(timer.prescale, timer.reload, options_.clock.cpu_hz, timer.eight_bit_mode)
            .sim_micros();
  }
}

void SensorDevice::on_attach(bus::Bus& bus) {
  bus_ = &bus;
  running_ = true;
  ++generation_;
  usb_state_ = UsbState::Default;  // Hid_Enable
  address_ = 0;
  configuration_ = 0;
  in_slot_.reset();
  overwritten_ = 0;

  auto& clock = bus.clock();
  const auto gen = generation_;
  if (keepalive_period_) {
    clock.schedule_in(*keepalive_period_, [this, gen] { timer0_isr(gen); });
  }
  clock.schedule_in(options_.startup_delay, [this, gen] { main_loop_iteration(gen); });
}

void SensorDevice::on_detach() {
  running_ = false;
  ++generation_;
  usb_state_ = UsbState::Detached;
  bus_ = nullptr;
}

void SensorDevice::stop() {
  if (bus_ != nullptr && bus_->attached()) {
    bus_->detach();  // calls back into on_detach
  } else {
    running_ = false;
    ++generation_;
  }
}

void SensorDevice::timer0_isr(std::uint64_t gen) {
  if (!live(gen)) return;
  bus_->usb_service();  // HID_InterruptProc
  ++isr_count_;
  // TMR0L reload and TMR0IF clear: next overflow one full period later.
  bus_->clock().schedule_in(*keepalive_period_, [this, gen] { timer0_isr(gen); });
}

void SensorDevice::main_loop_iteration(std::uint64_t gen) {
  if (!live(gen)) return;
  const Micros now = bus_->clock().now();
  ReportRecord rec;
  rec.time = now;
  rec.volts = sensor_eval(signal_, now);
  rec.conversion = make_report(adc_sample(rec.volts));
  portb_ = static_cast<std::uint8_t>(rec.conversion.cint & 0xFF);

  if (in_slot_) ++overwritten_;
  in_slot_ = rec.conversion.report;
  last_written_ = rec.conversion.report;
  reports_.push_back(rec);

  bus_->clock().schedule_in(options_.loop_delay, [this, gen] { main_loop_iteration(gen); });
}

const descriptors::EndpointDescriptor* SensorDevice::endpoint(std::uint8_t address) const {
  return options_.descriptors.configuration.find_endpoint(address);
}

std::optional<bus::PendingData> SensorDevice::take_in_data(std::uint8_t address) {
  const auto* ep = endpoint(address);
  if (ep == nullptr || !ep->is_in() || !in_slot_) return std::nullopt;
  bus::PendingData out{in_slot_->bytes(), overwritten_};
  in_slot_.reset();
  overwritten_ = 0;
  return out;
}

std::optional<Bytes> SensorDevice::handle_setup(const bus::SetupRequest& req) {
  if (usb_state_ == UsbState::Detached) return std::nullopt;
  const auto& set = options_.descriptors;
  const auto recipient = req.request_type & 0x1F;
  const auto kind = (req.request_type >> 5) & 0x03;  // 0 standard, 1 class

  if (kind == 0) {
    switch (req.request) {
      case bus::request::kGetDescriptor: {
        const auto type = static_cast<std::uint8_t>(req.value >> 8);
        const auto index = static_cast<std::uint8_t>(req.value & 0xFF);
        if (recipient == 0) {
          switch (type) {
            case dt::kDevice: return descriptors::serialize(set.device);
            case dt::kConfiguration:
              if (index != 0) return std::nullopt;
              return descriptors::serialize(set.configuration);
            case dt::kString: return set.strings.descriptor(index);
            default: return std::nullopt;
          }
        }
        if (recipient == 1 && req.index == set.configuration.interface.interface_number) {
          if (type == dt::kReport) return descriptors::serialize(set.report);
          if (type == dt::kHid) return descriptors::serialize(set.configuration.hid);
        }
        return std::nullopt;
      }
      case bus::request::kSetAddress:
        if (req.value > 127 || usb_state_ == UsbState::Configured) return std::nullopt;
        address_ = static_cast<std::uint8_t>(req.value);
        usb_state_ = address_ == 0 ? UsbState::Default : UsbState::Address;
        return Bytes{};
      case bus::request::kSetConfiguration:
        if (usb_state_ == UsbState::Default) return std::nullopt;
        if (req.value == 0) {
          configuration_ = 0;
          usb_state_ = UsbState::Address;
          return Bytes{};
        }
        if (req.value != set.configuration.config.configuration_value) return std::nullopt;
        configuration_ = static_cast<std::uint8_t>(req.value);
        usb_state_ = UsbState::Configured;
        return Bytes{};
      case bus::request::kGetConfiguration:
        return Bytes{configuration_};
      case bus::request::kGetStatus:
        return Bytes{0x00, 0x00};
      default:
        return std::nullopt;
    }
  }
  if (kind == 1 && recipient == 1) {
    switch (req.request) {
      case bus::request::kHidSetIdle:
        return Bytes{};
      case bus::request::kHidGetReport:
        if ((req.value >> 8) == 1) return last_written_.bytes();  // input report
        return std::nullopt;
      default:
        return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace hidsense::firmware
