#pragma once

#include "hidsense/common.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace hidsense::bus {

/// Transaction-level record of bus activity. STALL and SERVICE extend the
/// setup/data/handshake/attach set: a stalled control request and one
/// firmware keep-alive call respectively.
enum class PacketKind { Setup, DataIn, DataOut, Nak, Stall, Attach, Detach, Service };

std::string_view to_string(PacketKind kind);
std::optional<PacketKind> packet_kind_from_string(std::string_view name);

/// Kinds that never carry a payload.
bool is_payloadless(PacketKind kind);

constexpr int kNoEndpoint = -1;

struct BusPacket {
  Micros timestamp = 0;
  PacketKind kind = PacketKind::Attach;
  int endpoint = kNoEndpoint;
  Bytes payload;
  std::string annotation;

  friend bool operator==(const BusPacket&, const BusPacket&) = default;
};

}  // namespace hidsense::bus
