#include "hidsense/bus.hpp"

#include <algorithm>

namespace hidsense::bus {

namespace {

void put16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

std::string descriptor_name(std::uint8_t type) {
  switch (type) {
    case descriptors::type::kDevice: return "DEVICE";
    case descriptors::type::kConfiguration: return "CONFIGURATION";
    case descriptors::type::kString: return "STRING";
    case descriptors::type::kHid: return "HID";
    case descriptors::type::kReport: return "REPORT";
    default: return "0x" + hex_byte(type);
  }
}

}  // namespace

// ---------------------------------------------------------------------------

Bytes SetupRequest::serialize() const {
  Bytes out{request_type, request};
  put16(out, value);
  put16(out, index);
  put16(out, length);
  return out;
}

SetupRequest SetupRequest::parse(std::span<const std::uint8_t> b) {
  if (b.size() != 8) throw ParseError("setup packet must be 8 bytes, got " + std::to_string(b.size()));
  auto word = [&b](std::size_t at) { return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8)); };
  return SetupRequest{b[0], b[1], word(2), word(4), word(6)};
}

SetupRequest SetupRequest::get_descriptor(std::uint8_t type, std::uint8_t index,
                                          std::uint16_t length, std::uint16_t language) {
  return SetupRequest{0x80, request::kGetDescriptor,
                      static_cast<std::uint16_t>(type << 8 | index), language, length};
}

SetupRequest SetupRequest::get_interface_descriptor(std::uint8_t type, std::uint16_t iface,
                                                    std::uint16_t length) {
  return SetupRequest{0x81, request::kGetDescriptor, static_cast<std::uint16_t>(type << 8), iface,
                      length};
}

SetupRequest SetupRequest::set_address(std::uint8_t address) {
  return SetupRequest{0x00, request::kSetAddress, address, 0, 0};
}

SetupRequest SetupRequest::set_configuration(std::uint8_t value) {
  return SetupRequest{0x00, request::kSetConfiguration, value, 0, 0};
}

std::string SetupRequest::describe() const {
  const bool standard = (request_type & 0x60) == 0;
  if (standard) {
    switch (request) {
      case request::kGetDescriptor: {
        std::string s = "GET_DESCRIPTOR(" + descriptor_name(static_cast<std::uint8_t>(value >> 8));
        if ((value & 0xFF) != 0 || (value >> 8) == descriptors::type::kString) {
          s += " " + std::to_string(value & 0xFF);
        }
        return s + ")";
      }
      case request::kSetAddress: return "SET_ADDRESS(" + std::to_string(value) + ")";
      case request::kSetConfiguration: return "SET_CONFIGURATION(" + std::to_string(value) + ")";
      case request::kGetConfiguration: return "GET_CONFIGURATION";
      case request::kGetStatus: return "GET_STATUS";
      default: break;
    }
  }
  return "REQUEST(type=0x" + hex_byte(request_type) + ",req=0x" + hex_byte(request) + ")";
}

// ---------------------------------------------------------------------------

Bus::Bus(SimClock& clock, tracer::TraceLog& trace, Options options)
    : clock_(clock), trace_(trace), options_(options) {
  watchdog_.window = options_.keepalive_window;
}

void Bus::record(PacketKind kind, int ep, Bytes payload, std::string note) {
  trace_.record(BusPacket{clock_.now(), kind, ep, std::move(payload), std::move(note)});
}

void Bus::attach(UsbDevice& device) {
  if (device_ != nullptr) throw StateError("a device is already attached");
  device_ = &device;
  ++generation_;
  watchdog_.last_service = clock_.now();
  watchdog_.tripped = false;
  unresponsive_ = false;
  trip_reported_ = false;
  watchdog_armed_ = false;
  record(PacketKind::Attach, kNoEndpoint);
  arm_watchdog();
  device.on_attach(*this);
  if (listener_ != nullptr && device_ == &device) listener_->on_device_attached();
}

void Bus::detach() {
  if (device_ == nullptr) throw StateError("no device attached");
  UsbDevice* device = device_;
  device_ = nullptr;
  ++generation_;
  watchdog_armed_ = false;
  record(PacketKind::Detach, kNoEndpoint);
  device->on_detach();
  if (listener_ != nullptr) listener_->on_device_detached();
}

void Bus::arm_watchdog() {
  if (watchdog_armed_ || device_ == nullptr) return;
  watchdog_armed_ = true;
  const auto gen = generation_;
  clock_.schedule_at(watchdog_.last_service + watchdog_.window + 1, [this, gen] {
    if (gen != generation_) return;
    watchdog_armed_ = false;
    if (!check_watchdog()) arm_watchdog();
  });
}

bool Bus::check_watchdog() {
  if (device_ == nullptr) return false;
  if (!watchdog_.tripped && clock_.now() - watchdog_.last_service > watchdog_.window) {
    watchdog_.tripped = true;
    ++watchdog_.trips;
    if (!watchdog_.first_trip) watchdog_.first_trip = clock_.now();
    unresponsive_ = true;
  }
  return watchdog_.tripped;
}

void Bus::usb_service() {
  if (device_ == nullptr) throw StateError("usb_service with no device attached");
  ++services_;
  watchdog_.last_service = clock_.now();
  watchdog_.tripped = false;
  unresponsive_ = false;
  trip_reported_ = false;
  if (options_.trace_keepalive) record(PacketKind::Service, kNoEndpoint);
  arm_watchdog();
}

Bytes Bus::control_transfer(const SetupRequest& req) {
  if (device_ == nullptr) throw ProtocolError(req.describe() + ": no device attached");
  record(PacketKind::Setup, 0, req.serialize(), req.describe());
  auto data = device_->handle_setup(req);
  if (!data) {
    record(PacketKind::Stall, 0);
    throw ProtocolError(req.describe() + ": stalled");
  }
  if (data->size() > req.length) data->resize(req.length);
  if (req.device_to_host()) {
    record(PacketKind::DataIn, 0, *data);
  } else if (!data->empty()) {
    record(PacketKind::DataOut, 0, *data);
  }
  return std::move(*data);
}

PollResult Bus::poll_interrupt_in(int ep) {
  if (device_ == nullptr) throw ProtocolError("interrupt IN poll with no device attached");
  if (!device_->configured()) throw ProtocolError("interrupt IN poll on an unconfigured device");
  const auto address = static_cast<std::uint8_t>(0x80 | (ep & 0x0F));
  const auto* desc = device_->endpoint(address);
  if (ep <= 0 || ep > 15 || desc == nullptr ||
      desc->transfer_type != descriptors::TransferType::Interrupt) {
    throw ProtocolError("EP" + std::to_string(ep) + " IN is not an interrupt endpoint");
  }
  PollResult result;
  if (check_watchdog()) {
    result.unresponsive = true;
    record(PacketKind::Nak, ep, {},
           trip_reported_ ? std::string("unresponsive") : std::string(tracer::kTripAnnotation));
    trip_reported_ = true;
    return result;
  }
  auto pending = device_->take_in_data(address);
  if (!pending) {
    record(PacketKind::Nak, ep);
    return result;
  }
  if (pending->payload.size() > desc->max_packet_size) pending->payload.resize(desc->max_packet_size);
  std::string note;
  if (pending->overwritten > 0) {
    note = std::to_string(pending->overwritten) + " earlier report(s) overwritten";
  }
  record(PacketKind::DataIn, ep, pending->payload, std::move(note));
  result.nak = false;
  result.data = std::move(pending->payload);
  return result;
}

}  // namespace hidsense::bus
