#pragma once

// Host-side HID stack and the monitor application logic: enumeration,
// VID/PID matching, report decoding and the plugged / unplugged / changed /
// read event stream.

#include "hidsense/bus.hpp"
#include "hidsense/descriptors.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hidsense::host {

inline constexpr std::string_view kStatusConnected = "Connected to HID...";
inline constexpr std::string_view kStatusPlugged = "USB Plugged.....";
inline constexpr std::string_view kStatusUnplugged = "USB Unplugged....";

constexpr int kBarMaximum = 500;

struct DeviceInfo {
  std::uint32_t handle = 0;
  std::uint16_t vid = 0;
  std::uint16_t pid = 0;
  std::string manufacturer;
  std::string product;
  std::size_t input_report_length = 0;
  std::size_t output_report_length = 0;
  std::size_t feature_report_length = 0;
  int in_endpoint = 0;
};

class EnumerationError : public ProtocolError {
 public:
  EnumerationError(std::string step, const std::string& why)
      : ProtocolError("enumeration failed at " + step + ": " + why), step_(std::move(step)) {}

  const std::string& step() const { return step_; }

 private:
  std::string step_;
};

enum class EventKind { Plugged, Unplugged, Changed, Read };

std::string_view to_string(EventKind kind);

struct HostEvent {
  EventKind kind = EventKind::Changed;
  std::uint32_t handle = 0;  // 0 = no matching device
  std::uint16_t vid = 0;
  std::uint16_t pid = 0;
  /// Read only: report-ID byte (always 0) followed by the input report.
  Bytes payload;
  Micros time = 0;
};

struct Reading {
  Micros time = 0;
  std::string text;
  std::optional<int> value;

  friend bool operator==(const Reading&, const Reading&) = default;
};

struct DisplayState {
  std::string status_line;
  std::string temperature_text;
  std::optional<int> temperature_int;
  std::vector<Reading> history;
  bool read_notify = false;

  friend bool operator==(const DisplayState&, const DisplayState&) = default;
};

struct DeviceMatch {
  std::uint16_t vid = descriptors::kReferenceVendorId;
  std::uint16_t pid = descriptors::kReferenceProductId;
};

/// Startup display: status "Connected to HID...".
DisplayState initial_state();

/// Pure fold over host events. Plugged / Unplugged update the status only
/// for the matching VID/PID; Changed arms read notification when a handle was
/// found; Read decodes the report when notification is armed. Malformed
/// reads leave the state unchanged.
DisplayState on_event(const HostEvent& e, DisplayState state, DeviceMatch match = {});

struct DecodedReport {
  std::string text;
  std::optional<int> value;
};

/// payload = [report ID 0, 4 chars]. Throws ParseError on a short payload or
/// a nonzero report ID. value is the integer in text after trimming spaces.
DecodedReport decode_report(std::span<const std::uint8_t> payload);

std::string format_time(Micros t);
/// `<time>  [bar <value>/500]  <text without trailing blanks>`
std::string format_reading(const Reading& r);

/// One line per reading followed by the status line.
std::vector<std::string> render_status(const DisplayState& state);

/// `time_us,text,value`, one row per reading.
std::string history_csv(const DisplayState& state);

class Host final : public bus::BusListener {
 public:
  struct Options {
    Micros poll_interval = 10 * kMicrosPerMilli;
    /// Delay between attach and the enumeration sequence.
    Micros enumeration_delay = 5 * kMicrosPerMilli;
    DeviceMatch match;
  };

  explicit Host(bus::Bus& bus) : Host(bus, Options{}) {}
  Host(bus::Bus& bus, Options options);
  ~Host() override;

  Host(const Host&) = delete;
  Host& operator=(const Host&) = delete;

  /// Synchronous enumeration: GET_DESCRIPTOR(device), SET_ADDRESS,
  /// GET_DESCRIPTOR(configuration), SET_CONFIGURATION,
  /// GET_DESCRIPTOR(HID report), string descriptors. Throws
  /// EnumerationError naming the failing step.
  DeviceInfo enumerate();

  void on_device_attached() override;
  void on_device_detached() override;

  const DisplayState& state() const { return state_; }
  const std::vector<HostEvent>& events() const { return events_; }
  /// Status changes and readings in the order they happened.
  const std::vector<std::string>& transcript() const { return transcript_; }
  const std::optional<DeviceInfo>& device() const { return device_; }
  std::uint64_t polls() const { return polls_; }

 private:
  void emit(HostEvent e);
  void poll(std::uint64_t gen);

  bus::Bus& bus_;
  Options options_;
  DisplayState state_;
  std::vector<HostEvent> events_;
  std::vector<std::string> transcript_;
  std::optional<DeviceInfo> device_;
  std::uint32_t next_handle_ = 1;
  std::uint8_t next_address_ = 1;
  std::uint64_t generation_ = 0;
  std::uint64_t polls_ = 0;
};

}  // namespace hidsense::host
