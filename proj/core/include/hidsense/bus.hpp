#pragma once

// Discrete-event USB bus between one virtual device and one virtual host.

#include "hidsense/bus_packet.hpp"
#include "hidsense/common.hpp"
#include "hidsense/descriptors.hpp"
#include "hidsense/tracer.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace hidsense::bus {

/// Event queue ordered by (time, insertion sequence). Time never decreases and
/// equal-time events dispatch in the order they were scheduled.
class SimClock {
 public:
  using Callback = std::function<void()>;

  Micros now() const { return now_; }

  /// Throws StateError for t < now().
  void schedule_at(Micros t, Callback cb);
  void schedule_in(Micros delay, Callback cb) { schedule_at(now_ + delay, std::move(cb)); }

  /// Dispatches every event with time <= t_end, then sets now() = t_end.
  /// Throws StateError for t_end < now().
  void run_until(Micros t_end);

  /// Dispatches the earliest event. False when the queue is empty.
  bool run_next();

  std::size_t pending() const { return queue_.size(); }
  std::uint64_t dispatched() const { return dispatched_; }

 private:
  struct Event {
    Micros time;
    std::uint64_t seq;
    Callback cb;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  Micros now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t dispatched_ = 0;
  std::vector<Event> queue_;  // min-heap under Later
};

namespace request {
constexpr std::uint8_t kGetStatus = 0x00;
constexpr std::uint8_t kSetAddress = 0x05;
constexpr std::uint8_t kGetDescriptor = 0x06;
constexpr std::uint8_t kGetConfiguration = 0x08;
constexpr std::uint8_t kSetConfiguration = 0x09;
// HID class
constexpr std::uint8_t kHidGetReport = 0x01;
constexpr std::uint8_t kHidSetIdle = 0x0A;
}  // namespace request

/// Standard 8-byte control transfer setup packet.
struct SetupRequest {
  std::uint8_t request_type = 0;
  std::uint8_t request = 0;
  std::uint16_t value = 0;
  std::uint16_t index = 0;
  std::uint16_t length = 0;

  bool device_to_host() const { return (request_type & 0x80) != 0; }

  Bytes serialize() const;
  /// Throws ParseError unless exactly 8 bytes.
  static SetupRequest parse(std::span<const std::uint8_t> bytes);

  static SetupRequest get_descriptor(std::uint8_t type, std::uint8_t index, std::uint16_t length,
                                     std::uint16_t language = 0);
  /// GET_DESCRIPTOR addressed to interface `iface` (HID report / HID class).
  static SetupRequest get_interface_descriptor(std::uint8_t type, std::uint16_t iface,
                                               std::uint16_t length);
  static SetupRequest set_address(std::uint8_t address);
  static SetupRequest set_configuration(std::uint8_t value);

  /// Short human label, e.g. "GET_DESCRIPTOR(DEVICE)".
  std::string describe() const;

  friend bool operator==(const SetupRequest&, const SetupRequest&) = default;
};

struct PendingData {
  Bytes payload;
  /// Reports overwritten in the single-slot buffer before this one was taken.
  std::uint32_t overwritten = 0;
};

class Bus;

/// Device side of the bus.
class UsbDevice {
 public:
  virtual ~UsbDevice() = default;

  virtual void on_attach(Bus& bus) = 0;
  virtual void on_detach() = 0;
  /// Data stage bytes for a control request (empty for no data stage), or
  /// nullopt to stall.
  virtual std::optional<Bytes> handle_setup(const SetupRequest& req) = 0;
  virtual bool configured() const = 0;
  virtual const descriptors::EndpointDescriptor* endpoint(std::uint8_t address) const = 0;
  /// Removes and returns data queued for an IN endpoint.
  virtual std::optional<PendingData> take_in_data(std::uint8_t address) = 0;
};

/// Host side: notified of attach / detach.
class BusListener {
 public:
  virtual ~BusListener() = default;
  virtual void on_device_attached() = 0;
  virtual void on_device_detached() = 0;
};

/// Models the requirement that firmware keep servicing the USB engine. The
/// watchdog is tripped whenever now - last_service > window while attached.
struct KeepAliveWatchdog {
  Micros window = 10 * kMicrosPerMilli;
  Micros last_service = 0;
  bool tripped = false;
  std::optional<Micros> first_trip;
  std::uint64_t trips = 0;
};

struct PollResult {
  bool nak = true;
  Bytes data;
  /// Set when the NAK was caused by a missed keep-alive.
  bool unresponsive = false;
};

class Bus {
 public:
  struct Options {
    Micros keepalive_window = 10 * kMicrosPerMilli;
    /// Record one SERVICE packet per usb_service call.
    bool trace_keepalive = true;
  };

  Bus(SimClock& clock, tracer::TraceLog& trace) : Bus(clock, trace, Options{}) {}
  Bus(SimClock& clock, tracer::TraceLog& trace, Options options);

  Bus(const Bus&) = delete;
  Bus& operator=(const Bus&) = delete;

  void set_listener(BusListener* listener) { listener_ = listener; }

  /// Throws StateError when a device is already attached.
  void attach(UsbDevice& device);
  /// Throws StateError when nothing is attached.
  void detach();
  bool attached() const { return device_ != nullptr; }

  /// Runs SETUP + data stage. Returns at most req.length bytes. Throws
  /// ProtocolError when no device is attached or the device stalls.
  Bytes control_transfer(const SetupRequest& req);

  /// Interrupt IN poll. Throws ProtocolError when the device is absent,
  /// unconfigured, or `ep` is not an interrupt IN endpoint.
  PollResult poll_interrupt_in(int ep);

  /// Firmware keep-alive. Throws StateError when nothing is attached.
  void usb_service();

  const KeepAliveWatchdog& watchdog() const { return watchdog_; }
  bool unresponsive() const { return unresponsive_; }
  std::uint64_t service_count() const { return services_; }

  SimClock& clock() { return clock_; }
  const tracer::TraceLog& trace() const { return trace_; }

 private:
  void record(PacketKind kind, int ep, Bytes payload = {}, std::string note = {});
  void arm_watchdog();
  /// Trips the watchdog if the window has elapsed. Returns tripped state.
  bool check_watchdog();

  SimClock& clock_;
  tracer::TraceLog& trace_;
  Options options_;
  UsbDevice* device_ = nullptr;
  BusListener* listener_ = nullptr;
  KeepAliveWatchdog watchdog_;
  bool unresponsive_ = false;
  bool trip_reported_ = false;
  bool watchdog_armed_ = false;
  std::uint64_t generation_ = 0;
  std::uint64_t services_ = 0;
};

}  // namespace hidsense::bus
