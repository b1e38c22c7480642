#include "hidsense/tracer.hpp"

#include <gtest/gtest.h>

using namespace hidsense;
using namespace hidsense::tracer;
using hidsense::bus::kNoEndpoint;

namespace {

BusPacket packet(Micros t, PacketKind kind, int ep, Bytes payload = {}, std::string note = {}) {
  return BusPacket{t, kind, ep, std::move(payload), std::move(note)};
}

}  // namespace

TEST(TraceLog, RecordOrdering) {
  TraceLog log;
  log.record(packet(3'000'000, PacketKind::DataIn, 1, Bytes{'2', '5', '0', ' '}));
  EXPECT_THROW(log.record(packet(2'000'000, PacketKind::Nak, 1)), StateError);
  EXPECT_NO_THROW(log.record(packet(3'000'000, PacketKind::Nak, 1)));
  EXPECT_THROW(log.record(packet(3'000'001, PacketKind::Nak, 1, Bytes{1})), StateError);
  EXPECT_EQ(log.size(), 2u);
}

TEST(TraceLog, AnnotationNewlinesFlattened) {
  TraceLog log;
  log.record(packet(0, PacketKind::Attach, kNoEndpoint, {}, "a\nb\rc"));
  EXPECT_EQ(log.packets()[0].annotation, "a b c");
}

TEST(Render, Lines) {
  EXPECT_EQ(render(TraceLog{}, false), "START OF LOG\n");
  EXPECT_EQ(render_packet(packet(0, PacketKind::Attach, kNoEndpoint)), "T=0 ATTACH EP=- LEN=0");
  EXPECT_EQ(render_packet(packet(3'005'000, PacketKind::DataIn, 1, Bytes{0x32, 0x35, 0x30, 0x20})),
            "T=3005000 DATA_IN EP=1 LEN=4 DATA=32 35 30 20 ASCII=|250 |");
  EXPECT_EQ(render_packet(packet(7, PacketKind::DataOut, 2, Bytes{0x00, 0x7F, 0xAB, 'z'}, "x")),
            "T=7 DATA_OUT EP=2 LEN=4 DATA=00 7F AB 7A ASCII=|...z| # x");
}

TEST(Render, VerboseGatesNakAndService) {
  TraceLog log;
  log.record(packet(0, PacketKind::Attach, kNoEndpoint));
  log.record(packet(832, PacketKind::Service, kNoEndpoint));
  log.record(packet(900, PacketKind::Nak, 1));
  const auto quiet = render(log, false);
  const auto loud = render(log, true);
  EXPECT_EQ(quiet.find("NAK"), std::string::npos);
  EXPECT_EQ(quiet.find("SERVICE"), std::string::npos);
  EXPECT_NE(loud.find("T=900 NAK EP=1 LEN=0"), std::string::npos);
  EXPECT_NE(loud.find("T=832 SERVICE EP=- LEN=0"), std::string::npos);
}

TEST(Parse, RoundTrip) {
  TraceLog log;
  log.record(packet(0, PacketKind::Attach, kNoEndpoint));
  log.record(packet(5000, PacketKind::Setup, 0, Bytes{0x80, 6, 0, 1, 0, 0, 0x12, 0}, "GET"));
  log.record(packet(5000, PacketKind::Stall, 0));
  log.record(packet(9000, PacketKind::DataIn, 1, Bytes{' ', ' ', ' ', ' '}));
  log.record(packet(9001, PacketKind::Nak, 1, {}, std::string(kTripAnnotation)));
  log.record(packet(9002, PacketKind::Detach, kNoEndpoint));
  EXPECT_EQ(parse(render(log, true)), log);
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("T=0 ATTACH EP=- LEN=0\n"), ParseError);
  try {
    parse("START OF LOG\nT=1 DATA_IN EP=1 LEN=1 DATA=3G ASCII=|?|\n");
    FAIL();
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column"), std::string::npos) << msg;
  }
  EXPECT_THROW(parse("START OF LOG\nT=1 BOGUS EP=- LEN=0\n"), ParseError);
  EXPECT_THROW(parse("START OF LOG\nT=1 DATA_IN EP=1 LEN=2 DATA=30 ASCII=|0|\n"), ParseError);
  EXPECT_THROW(parse("START OF LOG\nT=1 DATA_IN EP=1 LEN=1 DATA=30 ASCII=|1|\n"), ParseError);
  EXPECT_THROW(parse("START OF LOG\nT=5 ATTACH EP=- LEN=0\nT=4 DETACH EP=- LEN=0\n"), ParseError);
}

TEST(Summary, CountsCadenceAndRatios) {
  TraceLog log;
  log.record(packet(0, PacketKind::Attach, kNoEndpoint));
  for (Micros t = 832; t <= kMicrosPerSecond; t += 832) {
    log.record(packet(t, PacketKind::Service, kNoEndpoint));
  }
  log.record(packet(2'000'000, PacketKind::DataIn, 1, Bytes{'1', ' ', ' ', ' '}));
  log.record(packet(2'010'000, PacketKind::Nak, 1));
  log.record(packet(2'020'000, PacketKind::Nak, 1, {}, std::string(kTripAnnotation)));
  log.record(packet(2'030'000, PacketKind::Nak, 1, {}, "unresponsive"));
  log.record(packet(3'000'000, PacketKind::DataIn, 1, Bytes{'2', ' ', ' ', ' '}));
  log.record(packet(3'990'000, PacketKind::DataIn, 1, Bytes{'3', ' ', ' ', ' '}));
  const auto s = summarize(log);
  EXPECT_EQ(s.reports, 3u);
  ASSERT_TRUE(s.cadence);
  EXPECT_EQ(s.cadence->mean, 995'000);
  EXPECT_EQ(s.cadence->min, 990'000);
  EXPECT_EQ(s.cadence->max, 1'000'000);
  EXPECT_EQ(s.services, 1201u);
  EXPECT_EQ(s.max_service_gap, 832);
  EXPECT_EQ(s.count(PacketKind::Nak), 3u);
  EXPECT_DOUBLE_EQ(s.nak_ratio, 0.5);
  EXPECT_EQ(s.watchdog_trip, 2'020'000);
  EXPECT_DOUBLE_EQ(s.nak_ratio_after_trip, 0.5);
  EXPECT_NE(render_summary(s).find("reports=3"), std::string::npos);
}

TEST(Summary, IdleLog) {
  TraceLog log;
  log.record(packet(0, PacketKind::Attach, kNoEndpoint));
  const auto s = summarize(log);
  EXPECT_EQ(s.reports, 0u);
  EXPECT_FALSE(s.cadence);
  EXPECT_FALSE(s.watchdog_trip);
}
