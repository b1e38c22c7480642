#include "hidsense/tracer.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace hidsense {

namespace bus {

namespace {
constexpr std::array<std::string_view, 8> kKindNames = {
    "SETUP", "DATA_IN", "DATA_OUT", "NAK", "STALL", "ATTACH", "DETACH", "SERVICE",
};
}  // namespace

std::string_view to_string(PacketKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

std::optional<PacketKind> packet_kind_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<PacketKind>(i);
  }
  return std::nullopt;
}

bool is_payloadless(PacketKind kind) {
  switch (kind) {
    case PacketKind::Nak:
    case PacketKind::Stall:
    case PacketKind::Attach:
    case PacketKind::Detach:
    case PacketKind::Service:
      return true;
    default:
      return false;
  }
}

}  // namespace bus

namespace tracer {

void TraceLog::record(BusPacket p) {
  if (!packets_.empty() && p.timestamp < packets_.back().timestamp) {
    throw StateError("trace timestamp regression: " + std::to_string(p.timestamp) + " after " +
                     std::to_string(packets_.back().timestamp));
  }
  if (bus::is_payloadless(p.kind) && !p.payload.empty()) {
    throw StateError(std::string(bus::to_string(p.kind)) + " packet cannot carry a payload");
  }
  std::replace(p.annotation.begin(), p.annotation.end(), '\n', ' ');
  std::replace(p.annotation.begin(), p.annotation.end(), '\r', ' ');
  packets_.push_back(std::move(p));
}

bool is_verbose_only(PacketKind kind) {
  return kind == PacketKind::Nak || kind == PacketKind::Service;
}

std::string render_packet(const BusPacket& p) {
  std::string line = "T=" + std::to_string(p.timestamp) + " ";
  line += bus::to_string(p.kind);
  line += " EP=";
  line += p.endpoint < 0 ? std::string("-") : std::to_string(p.endpoint);
  line += " LEN=" + std::to_string(p.payload.size());
  if (!p.payload.empty()) {
    line += " DATA=" + hex_bytes(p.payload);
    line += " ASCII=|";
    for (auto b : p.payload) line.push_back(b >= 0x20 && b <= 0x7E ? static_cast<char>(b) : '.');
    line += "|";
  }
  if (!p.annotation.empty()) line += " # " + p.annotation;
  return line;
}

std::string render(const TraceLog& log, bool verbose) {
  std::string out(kHeader);
  out.push_back('\n');
  for (const auto& p : log.packets()) {
    if (!verbose && is_verbose_only(p.kind)) continue;
    out += render_packet(p);
    out.push_back('\n');
  }
  return out;
}

namespace {

class LineCursor {
 public:
  LineCursor(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("line " + std::to_string(line_no_) + ", column " + std::to_string(pos_ + 1) +
                     ": " + what);
  }

  void expect(std::string_view lit) {
    if (line_.substr(pos_, lit.size()) != lit) fail("expected '" + std::string(lit) + "'");
    pos_ += lit.size();
  }

  bool consume(std::string_view lit) {
    if (line_.substr(pos_, lit.size()) != lit) return false;
    pos_ += lit.size();
    return true;
  }

  std::uint64_t number() {
    std::uint64_t v = 0;
    const char* first = line_.data() + pos_;
    const auto [ptr, ec] = std::from_chars(first, line_.data() + line_.size(), v);
    if (ec != std::errc{} || ptr == first) fail("expected a decimal number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return v;
  }

  std::string_view word() {
    const auto end = line_.find(' ', pos_);
    const auto w = line_.substr(pos_, end - pos_);
    pos_ = end == std::string_view::npos ? line_.size() : end;
    return w;
  }

  std::uint8_t hex_byte() {
    auto digit = [this](char c) -> int {
      if (c >= '0' && c <= '9') return c - '0';
      if (c >= 'A' && c <= 'F') return c - 'A' + 10;
      fail(std::string("bad hex digit '") + c + "'");
    };
    if (pos_ + 2 > line_.size()) fail("truncated hex byte");
    const int hi = digit(line_[pos_]);
    ++pos_;
    const int lo = digit(line_[pos_]);
    ++pos_;
    return static_cast<std::uint8_t>(hi << 4 | lo);
  }

  char next_char() {
    if (pos_ >= line_.size()) fail("unexpected end of line");
    return line_[pos_++];
  }

  std::string_view rest() {
    const auto r = line_.substr(pos_);
    pos_ = line_.size();
    return r;
  }

  bool at_end() const { return pos_ == line_.size(); }
  std::size_t pos() const { return pos_; }

 private:
  std::string_view line_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

BusPacket parse_line(std::string_view line, std::size_t line_no) {
  LineCursor cur(line, line_no);
  BusPacket p;
  cur.expect("T=");
  p.timestamp = static_cast<Micros>(cur.number());
  cur.expect(" ");
  const auto kind_pos = cur.pos();
  const auto kind_name = cur.word();
  const auto kind = bus::packet_kind_from_string(kind_name);
  if (!kind) {
    LineCursor at(line, line_no);
    at.expect(line.substr(0, kind_pos));
    at.fail("unknown packet kind '" + std::string(kind_name) + "'");
  }
  p.kind = *kind;
  cur.expect(" EP=");
  if (!cur.consume("-")) p.endpoint = static_cast<int>(cur.number());
  cur.expect(" LEN=");
  const auto len = cur.number();
  if (len > 0) {
    cur.expect(" DATA=");
    p.payload.reserve(len);
    for (std::uint64_t i = 0; i < len; ++i) {
      if (i != 0) cur.expect(" ");
      p.payload.push_back(cur.hex_byte());
    }
    cur.expect(" ASCII=|");
    for (auto b : p.payload) {
      const char want = b >= 0x20 && b <= 0x7E ? static_cast<char>(b) : '.';
      if (cur.next_char() != want) cur.fail("ASCII column disagrees with DATA");
    }
    cur.expect("|");
  }
  if (!cur.at_end()) {
    cur.expect(" # ");
    p.annotation = std::string(cur.rest());
  }
  return p;
}

}  // namespace

TraceLog parse(std::string_view text) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  TraceLog log;
  bool header = false;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header) {
      if (line != kHeader) {
        throw ParseError("line " + std::to_string(line_no) + ": missing 'START OF LOG' header");
      }
      header = true;
      continue;
    }
    if (line.empty()) {
      throw ParseError("line " + std::to_string(line_no) + ", column 1: empty line");
    }
    BusPacket p = parse_line(line, line_no);
    try {
      log.record(std::move(p));
    } catch (const StateError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!header) throw ParseError("line 1: missing 'START OF LOG' header");
  return log;
}

TraceSummary summarize(const TraceLog& log) {
  TraceSummary s;
  const auto& packets = log.packets();
  if (packets.empty()) return s;
  s.span = packets.back().timestamp - packets.front().timestamp;

  std::optional<Micros> last_report;
  Micros gap_sum = 0;
  std::size_t gaps = 0;
  std::optional<Micros> last_service;
  std::size_t naks = 0;
  std::size_t naks_after = 0;
  std::size_t reports_after = 0;
  Micros first_service = 0;

  for (const auto& p : packets) {
    ++s.counts[static_cast<std::size_t>(p.kind)];
    if (p.kind == PacketKind::Nak && !s.watchdog_trip && p.annotation == kTripAnnotation) {
      s.watchdog_trip = p.timestamp;
    }
    const bool after_trip = s.watchdog_trip && p.timestamp >= *s.watchdog_trip;
    if (p.kind == PacketKind::DataIn && p.endpoint > 0) {
      ++s.reports;
      if (after_trip) ++reports_after;
      if (last_report) {
        const Micros gap = p.timestamp - *last_report;
        if (gaps == 0) {
          s.cadence = GapStats{0, gap, gap};
        } else {
          s.cadence->min = std::min(s.cadence->min, gap);
          s.cadence->max = std::max(s.cadence->max, gap);
        }
        gap_sum += gap;
        ++gaps;
      }
      last_report = p.timestamp;
    } else if (p.kind == PacketKind::Nak) {
      ++naks;
      if (after_trip) ++naks_after;
    } else if (p.kind == PacketKind::Service) {
      if (last_service) {
        s.max_service_gap = std::max(s.max_service_gap, p.timestamp - *last_service);
      } else {
        first_service = p.timestamp;
      }
      last_service = p.timestamp;
      ++s.services;
    }
  }
  if (gaps > 0) s.cadence->mean = gap_sum / static_cast<Micros>(gaps);
  if (s.services > 1) {
    s.service_rate_hz = static_cast<double>(s.services - 1) * 1e6 /
                        static_cast<double>(*last_service - first_service);
  }
  if (naks + s.reports > 0) {
    s.nak_ratio = static_cast<double>(naks) / static_cast<double>(naks + s.reports);
  }
  if (naks_after + reports_after > 0) {
    s.nak_ratio_after_trip =
        static_cast<double>(naks_after) / static_cast<double>(naks_after + reports_after);
  }
  return s;
}

std::string render_summary(const TraceSummary& s) {
  std::ostringstream out;
  char buf[96];
  out << "packets:";
  for (std::size_t k = 0; k < s.counts.size(); ++k) {
    out << ' ' << bus::to_string(static_cast<PacketKind>(k)) << '=' << s.counts[k];
  }
  out << '\n';
  out << "reports=" << s.reports << '\n';
  if (s.cadence) {
    std::snprintf(buf, sizeof buf, "cadence_ms mean=%.3f min=%.3f max=%.3f\n",
                  static_cast<double>(s.cadence->mean) / 1e3,
                  static_cast<double>(s.cadence->min) / 1e3,
                  static_cast<double>(s.cadence->max) / 1e3);
    out << buf;
  } else {
    out << "cadence_ms n/a\n";
  }
  std::snprintf(buf, sizeof buf, "keepalive services=%zu rate_hz=%.1f max_gap_us=%lld\n",
                s.services, s.service_rate_hz, static_cast<long long>(s.max_service_gap));
  out << buf;
  std::snprintf(buf, sizeof buf, "nak_ratio=%.1f%%\n", 100.0 * s.nak_ratio);
  out << buf;
  if (s.watchdog_trip) {
    std::snprintf(buf, sizeof buf, "watchdog_trip_us=%lld nak_ratio_after_trip=%.1f%%\n",
                  static_cast<long long>(*s.watchdog_trip), 100.0 * s.nak_ratio_after_trip);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "span_us=%lld\n", static_cast<long long>(s.span));
  out << buf;
  return out.str();
}

}  // namespace tracer
}  // namespace hidsense
