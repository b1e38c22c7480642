#include "hidsense/host.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

namespace hidsense::host {

namespace dt = descriptors::type;

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Plugged: return "Plugged";
    case EventKind::Unplugged: return "Unplugged";
    case EventKind::Changed: return "Changed";
    case EventKind::Read: return "Read";
  }
  return "?";
}

DisplayState initial_state() {
  DisplayState s;
  s.status_line = std::string(kStatusConnected);
  return s;
}

DecodedReport decode_report(std::span<const std::uint8_t> payload) {
  if (payload.size() < 5) {
    throw ParseError("read payload of " + std::to_string(payload.size()) +
                     " bytes, need report ID + 4");
  }
  if (payload[0] != 0) {
    throw ParseError("unexpected report ID " + std::to_string(payload[0]));
  }
  DecodedReport out;
  for (std::size_t i = 1; i <= 4; ++i) out.text.push_back(static_cast<char>(payload[i]));

  std::string_view t = out.text;
  const auto first = t.find_first_not_of(' ');
  if (first != std::string_view::npos) {
    t = t.substr(first, t.find_last_not_of(' ') - first + 1);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec == std::errc{} && ptr == t.data() + t.size()) out.value = v;
  }
  return out;
}

DisplayState on_event(const HostEvent& e, DisplayState state, DeviceMatch match) {
  const bool matches = e.vid == match.vid && e.pid == match.pid;
  switch (e.kind) {
    case EventKind::Plugged:
      if (matches) state.status_line = std::string(kStatusPlugged);
      break;
    case EventKind::Unplugged:
      if (matches) {
        state.status_line = std::string(kStatusUnplugged);
        state.read_notify = false;
      }
      break;
    case EventKind::Changed:
      state.read_notify = e.handle != 0;
      break;
    case EventKind::Read: {
      if (!state.read_notify) break;
      DecodedReport r;
      try {
        r = decode_report(e.payload);
      } catch (const ParseError&) {
        break;
      }
      state.temperature_text = r.text;
      state.temperature_int = r.value;
      state.history.push_back(Reading{e.time, r.text, r.value});
      break;
    }
  }
  return state;
}

std::string format_time(Micros t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld.%06llds", static_cast<long long>(t / kMicrosPerSecond),
                static_cast<long long>(t % kMicrosPerSecond));
  return buf;
}

std::string format_reading(const Reading& r) {
  std::string bar = "n/a";
  if (r.value) bar = std::to_string(std::clamp(*r.value, 0, kBarMaximum));
  std::string_view text = r.text;
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  return format_time(r.time) + "  [bar " + bar + "/" + std::to_string(kBarMaximum) + "]  " +
         std::string(text);
}

std::vector<std::string> render_status(const DisplayState& state) {
  std::vector<std::string> lines;
  lines.reserve(state.history.size() + 1);
  for (const auto& r : state.history) lines.push_back(format_reading(r));
  lines.push_back(state.status_line);
  return lines;
}

std::string history_csv(const DisplayState& state) {
  std::string out = "time_us,text,value\n";
  for (const auto& r : state.history) {
    out += std::to_string(r.time) + "," + r.text + "," +
           (r.value ? std::to_string(*r.value) : std::string()) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------

Host::Host(bus::Bus& bus, Options options) : bus_(bus), options_(options), state_(initial_state()) {
  transcript_.push_back(state_.status_line);
  bus_.set_listener(this);
}

Host::~Host() { bus_.set_listener(nullptr); }

DeviceInfo Host::enumerate() {
  auto step = [this](const std::string& name, const bus::SetupRequest& req) {
    try {
      return bus_.control_transfer(req);
    } catch (const ProtocolError& e) {
      throw EnumerationError(name, e.what());
    } catch (const StateError& e) {
      throw EnumerationError(name, e.what());
    }
  };
  auto parsed = [](const std::string& name, auto&& fn) {
    try {
      return fn();
    } catch (const ParseError& e) {
      throw EnumerationError(name, e.what());
    }
  };

  if (!bus_.attached()) throw EnumerationError("GET_DESCRIPTOR(DEVICE)", "no device attached");

  DeviceInfo info;
  const Bytes dev_bytes = step("GET_DESCRIPTOR(DEVICE)",
                               bus::SetupRequest::get_descriptor(dt::kDevice, 0,
                                                                 descriptors::kDeviceLength));
  const auto device = parsed("GET_DESCRIPTOR(DEVICE)",
                             [&] { return descriptors::parse_device_descriptor(dev_bytes); });
  info.vid = device.vid;
  info.pid = device.pid;

  step("SET_ADDRESS", bus::SetupRequest::set_address(next_address_));
  next_address_ = static_cast<std::uint8_t>(next_address_ % 127 + 1);

  const Bytes head = step("GET_DESCRIPTOR(CONFIGURATION)",
                          bus::SetupRequest::get_descriptor(dt::kConfiguration, 0,
                                                            descriptors::kConfigurationLength));
  if (head.size() < 4) {
    throw EnumerationError("GET_DESCRIPTOR(CONFIGURATION)", "short configuration header");
  }
  const auto total = static_cast<std::uint16_t>(head[2] | (head[3] << 8));
  const Bytes config_bytes = step("GET_DESCRIPTOR(CONFIGURATION)",
                                  bus::SetupRequest::get_descriptor(dt::kConfiguration, 0, total));
  const auto tree = parsed("GET_DESCRIPTOR(CONFIGURATION)", [&] {
    return descriptors::parse_configuration_tree(config_bytes, descriptors::ParseMode::Lenient);
  });
  for (const auto& ep : tree.endpoints) {
    if (ep.is_in() && ep.transfer_type == descriptors::TransferType::Interrupt) {
      info.in_endpoint = ep.number();
      break;
    }
  }
  if (info.in_endpoint == 0) {
    throw EnumerationError("GET_DESCRIPTOR(CONFIGURATION)", "no interrupt IN endpoint");
  }

  step("SET_CONFIGURATION",
       bus::SetupRequest::set_configuration(tree.config.configuration_value));

  const Bytes report_bytes =
      step("GET_DESCRIPTOR(REPORT)",
           bus::SetupRequest::get_interface_descriptor(dt::kReport,
                                                       tree.interface.interface_number,
                                                       tree.hid.report_descriptor_length));
  const auto report = parsed("GET_DESCRIPTOR(REPORT)",
                             [&] { return descriptors::parse_report_descriptor(report_bytes); });
  const auto summary = report.summary();
  info.input_report_length = summary.input_bytes;
  info.output_report_length = summary.output_bytes;
  info.feature_report_length = summary.feature_bytes;

  const Bytes langs = step("GET_DESCRIPTOR(STRING 0)",
                           bus::SetupRequest::get_descriptor(dt::kString, 0, 255));
  const auto langids = parsed("GET_DESCRIPTOR(STRING 0)",
                              [&] { return descriptors::decode_langid_descriptor(langs); });
  const std::uint16_t lang = langids.empty() ? descriptors::kLangIdEnglishUs : langids.front();
  auto fetch_string = [&](std::uint8_t index) -> std::string {
    if (index == 0) return {};
    const std::string name = "GET_DESCRIPTOR(STRING " + std::to_string(index) + ")";
    const Bytes raw = step(name, bus::SetupRequest::get_descriptor(dt::kString, index, 255, lang));
    return parsed(name, [&] { return descriptors::decode_string_descriptor(raw); });
  };
  info.manufacturer = fetch_string(device.i_manufacturer);
  info.product = fetch_string(device.i_product);

  info.handle = next_handle_++;
  return info;
}

void Host::emit(HostEvent e) {
  e.time = bus_.clock().now();
  const std::string before = state_.status_line;
  const std::size_t readings = state_.history.size();
  state_ = on_event(e, std::move(state_), options_.match);
  events_.push_back(std::move(e));
  if (state_.status_line != before) transcript_.push_back(state_.status_line);
  if (state_.history.size() != readings) transcript_.push_back(format_reading(state_.history.back()));
}

void Host::on_device_attached() {
  const auto gen = ++generation_;
  bus_.clock().schedule_in(options_.enumeration_delay, [this, gen] {
    if (gen != generation_ || !bus_.attached()) return;
    try {
      device_ = enumerate();
    } catch (const EnumerationError& e) {
      transcript_.push_back(std::string("Enumeration failed: ") + e.what());
      return;
    }
    emit(HostEvent{EventKind::Plugged, device_->handle, device_->vid, device_->pid, {}, 0});
    const bool matches = device_->vid == options_.match.vid && device_->pid == options_.match.pid;
    emit(HostEvent{EventKind::Changed, matches ? device_->handle : 0, device_->vid, device_->pid,
                   {}, 0});
    bus_.clock().schedule_in(options_.poll_interval, [this, gen] { poll(gen); });
  });
}

void Host::on_device_detached() {
  ++generation_;
  if (!device_) return;
  const DeviceInfo gone = *device_;
  device_.reset();
  emit(HostEvent{EventKind::Unplugged, gone.handle, gone.vid, gone.pid, {}, 0});
  emit(HostEvent{EventKind::Changed, 0, 0, 0, {}, 0});
}

void Host::poll(std::uint64_t gen) {
  if (gen != generation_ || !device_) return;
  ++polls_;
  bus::PollResult result;
  try {
    result = bus_.poll_interrupt_in(device_->in_endpoint);
  } catch (const ProtocolError& e) {
    transcript_.push_back(std::string("Polling stopped: ") + e.what());
    return;
  }
  if (!result.nak && state_.read_notify) {
    Bytes payload;
    payload.reserve(1 + device_->input_report_length);
    payload.push_back(0);  // report ID placeholder
    payload.insert(payload.end(), result.data.begin(), result.data.end());
    payload.resize(1 + device_->input_report_length, 0);
    emit(HostEvent{EventKind::Read, device_->handle, device_->vid, device_->pid,
                   std::move(payload), 0});
  }
  bus_.clock().schedule_in(options_.poll_interval, [this, gen] { poll(gen); });
}

}  // namespace hidsense::host
