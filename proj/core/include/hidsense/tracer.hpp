#pragma once

// USBTrace-style capture log. Text format, one packet per line after the
// header:
//
//   START OF LOG
//   T=<us> <KIND> EP=<n|-> LEN=<n>[ DATA=<HH HH ..> ASCII=|<chars>|][ # <note>]
//
// DATA is uppercase hex. ASCII shows bytes 0x20..0x7E literally and '.'
// otherwise; the pipes keep trailing spaces visible. NAK and SERVICE lines
// are only emitted by a verbose render.

#include "hidsense/bus_packet.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hidsense::tracer {

using bus::BusPacket;
using bus::PacketKind;

constexpr std::string_view kHeader = "START OF LOG";

class TraceLog {
 public:
  /// Appends p. Throws StateError if p is older than the last packet or a
  /// payloadless kind carries data. Newlines in the annotation become spaces.
  void record(BusPacket p);

  const std::vector<BusPacket>& packets() const { return packets_; }
  std::size_t size() const { return packets_.size(); }
  bool empty() const { return packets_.empty(); }

  friend bool operator==(const TraceLog&, const TraceLog&) = default;

 private:
  std::vector<BusPacket> packets_;
};

/// True for kinds hidden from a non-verbose render.
bool is_verbose_only(PacketKind kind);

std::string render_packet(const BusPacket& p);
std::string render(const TraceLog& log, bool verbose);

/// Inverse of render. Throws ParseError with line and column on a missing
/// header or malformed line.
TraceLog parse(std::string_view text);

struct GapStats {
  Micros mean = 0;
  Micros min = 0;
  Micros max = 0;
};

struct TraceSummary {
  std::array<std::size_t, 8> counts{};  // indexed by PacketKind
  /// DATA_IN packets on interrupt endpoints (EP != 0).
  std::size_t reports = 0;
  std::optional<GapStats> cadence;
  std::size_t services = 0;
  double service_rate_hz = 0.0;
  Micros max_service_gap = 0;
  /// NAK / (NAK + interrupt DATA_IN).
  double nak_ratio = 0.0;
  /// Time of the first packet annotated as a keep-alive trip, if any.
  std::optional<Micros> watchdog_trip;
  double nak_ratio_after_trip = 0.0;
  Micros span = 0;

  std::size_t count(PacketKind kind) const { return counts[static_cast<std::size_t>(kind)]; }
};

TraceSummary summarize(const TraceLog& log);
std::string render_summary(const TraceSummary& s);

/// Annotation marking the NAK at which the keep-alive watchdog tripped.
constexpr std::string_view kTripAnnotation = "keep-alive watchdog tripped";

}  // namespace hidsense::tracer
