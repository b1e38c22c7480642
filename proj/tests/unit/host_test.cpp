#include "hidsense/device.hpp"
#include "hidsense/host.hpp"
#include "hidsense/tracer.hpp"

#include <gtest/gtest.h>

using namespace hidsense;
using namespace hidsense::host;

namespace {

HostEvent event(EventKind kind, std::uint32_t handle = 1, std::uint16_t vid = 0x1234,
                std::uint16_t pid = 1, Bytes payload = {}) {
  return HostEvent{kind, handle, vid, pid, std::move(payload), 0};
}

struct HostFixture : ::testing::Test {
  bus::SimClock clock;
  tracer::TraceLog trace;
  bus::Bus bus{clock, trace};
  firmware::SensorDevice dev{registers::RegisterFile::reference(),
                             firmware::parse_sensor_spec("constant:2.5")};
};

}  // namespace

TEST(DecodeReport, Basics) {
  const auto r = decode_report(Bytes{0, '2', '5', '0', ' '});
  EXPECT_EQ(r.text, "250 ");
  EXPECT_EQ(r.value, 250);
  EXPECT_EQ(decode_report(Bytes{0, '-', '4', ' ', ' '}).value, -4);
  EXPECT_FALSE(decode_report(Bytes{0, ' ', ' ', ' ', ' '}).value);
  EXPECT_FALSE(decode_report(Bytes{0, '1', 'x', ' ', ' '}).value);
  EXPECT_THROW(decode_report(Bytes{0, '1'}), ParseError);
  EXPECT_THROW(decode_report(Bytes{7, '1', ' ', ' ', ' '}), ParseError);
}

TEST(HostState, FoldFollowsFormLogic) {
  auto s = initial_state();
  EXPECT_EQ(s.status_line, "Connected to HID...");
  EXPECT_FALSE(s.read_notify);

  s = on_event(event(EventKind::Read, 1, 0x1234, 1, Bytes{0, '9', ' ', ' ', ' '}), s);
  EXPECT_TRUE(s.history.empty()) << "reads ignored before notification is armed";

  s = on_event(event(EventKind::Plugged), s);
  EXPECT_EQ(s.status_line, "USB Plugged.....");
  s = on_event(event(EventKind::Changed), s);
  EXPECT_TRUE(s.read_notify);
  s = on_event(event(EventKind::Read, 1, 0x1234, 1, Bytes{0, '2', '5', '0', ' '}), s);
  EXPECT_EQ(s.temperature_text, "250 ");
  EXPECT_EQ(s.temperature_int, 250);
  ASSERT_EQ(s.history.size(), 1u);

  s = on_event(event(EventKind::Unplugged), s);
  EXPECT_EQ(s.status_line, "USB Unplugged....");
  EXPECT_FALSE(s.read_notify);
}

TEST(HostState, OtherDevicesDoNotChangeStatus) {
  auto s = on_event(event(EventKind::Plugged, 1, 0x0781, 0x5567), initial_state());
  EXPECT_EQ(s.status_line, "Connected to HID...");
  s = on_event(event(EventKind::Unplugged, 1, 0x0781, 0x5567), s);
  EXPECT_EQ(s.status_line, "Connected to HID...");
}

TEST(HostState, MalformedReadLeavesStateUnchanged) {
  auto s = on_event(event(EventKind::Changed), initial_state());
  const auto before = s;
  s = on_event(event(EventKind::Read, 1, 0x1234, 1, Bytes{0, '1'}), s);
  EXPECT_EQ(s, before);
}

TEST(HostFormat, TimeAndReadings) {
  EXPECT_EQ(format_time(2'005'000), "2.005000s");
  EXPECT_EQ(format_time(0), "0.000000s");
  EXPECT_EQ(format_reading(Reading{2'005'000, "250 ", 250}), "2.005000s  [bar 250/500]  250");
  EXPECT_EQ(format_reading(Reading{1, "1234", 1234}).find("[bar 500/500]"), 11u);
  EXPECT_NE(format_reading(Reading{1, "-5  ", -5}).find("[bar 0/500]"), std::string::npos);
  EXPECT_NE(format_reading(Reading{1, "    ", std::nullopt}).find("n/a"), std::string::npos);
  DisplayState s;
  s.history = {{1, "250 ", 250}, {2, "    ", std::nullopt}};
  EXPECT_EQ(history_csv(s), "time_us,text,value\n1,250 ,250\n2,    ,\n");
}

TEST_F(HostFixture, EnumeratesReferenceDevice) {
  Host host(bus);
  bus.attach(dev);
  clock.run_until(5 * kMicrosPerMilli);
  ASSERT_TRUE(host.device());
  const auto& info = *host.device();
  EXPECT_EQ(info.vid, 0x1234);
  EXPECT_EQ(info.pid, 1);
  EXPECT_EQ(info.manufacturer, "mikroElektronika");
  EXPECT_EQ(info.product, "mikroC HID Library test");
  EXPECT_EQ(info.input_report_length, 4u);
  EXPECT_EQ(info.output_report_length, 4u);
  EXPECT_EQ(info.feature_report_length, 2u);
  EXPECT_EQ(info.in_endpoint, 1);
  ASSERT_EQ(host.events().size(), 2u);
  EXPECT_EQ(host.events()[0].kind, EventKind::Plugged);
  EXPECT_EQ(host.events()[1].kind, EventKind::Changed);
  EXPECT_EQ(host.transcript(),
            (std::vector<std::string>{"Connected to HID...", "USB Plugged....."}));
}

TEST_F(HostFixture, ReadsEverySecondAndUnplugs) {
  Host host(bus);
  bus.attach(dev);
  clock.run_until(5 * kMicrosPerSecond);
  dev.stop();
  clock.run_until(7 * kMicrosPerSecond);
  std::vector<Micros> reads;
  for (const auto& e : host.events()) {
    if (e.kind == EventKind::Read) {
      reads.push_back(e.time);
      EXPECT_EQ(e.payload, (Bytes{0, '2', '5', '0', ' '}));
    }
  }
  EXPECT_EQ(reads, (std::vector<Micros>{2'005'000, 3'005'000, 4'005'000}));
  EXPECT_EQ(host.transcript().back(), "USB Unplugged....");
  EXPECT_EQ(host.events().back().kind, EventKind::Changed);
  EXPECT_EQ(host.events().back().handle, 0u);
  EXPECT_FALSE(host.device());
}

TEST_F(HostFixture, PollingStopsAfterDetach) {
  Host host(bus);
  bus.attach(dev);
  clock.run_until(kMicrosPerSecond);
  dev.stop();
  const auto polls = host.polls();
  clock.run_until(2 * kMicrosPerSecond);
  EXPECT_EQ(host.polls(), polls);
}

TEST_F(HostFixture, ReattachGetsNewHandle) {
  Host host(bus);
  bus.attach(dev);
  clock.run_until(kMicrosPerSecond);
  bus.detach();
  firmware::SensorDevice again(registers::RegisterFile::reference(),
                               firmware::parse_sensor_spec("constant:1"));
  bus.attach(again);
  clock.run_until(2 * kMicrosPerSecond);
  ASSERT_TRUE(host.device());
  EXPECT_EQ(host.device()->handle, 2u);
  EXPECT_EQ(host.state().status_line, "USB Plugged.....");
}

TEST_F(HostFixture, ForeignDeviceIsEnumeratedButIgnored) {
  auto set = descriptors::build_reference_descriptor_set();
  set.device.vid = 0x0781;
  firmware::DeviceOptions opts;
  opts.descriptors = set;
  firmware::SensorDevice foreign(registers::RegisterFile::reference(),
                                 firmware::parse_sensor_spec("constant:2.5"), opts);
  Host host(bus);
  bus.attach(foreign);
  clock.run_until(4 * kMicrosPerSecond);
  EXPECT_EQ(host.state().status_line, "Connected to HID...");
  EXPECT_TRUE(host.state().history.empty());
  EXPECT_FALSE(host.state().read_notify);
}

TEST_F(HostFixture, EnumerationFailureNamesStep) {
  auto set = descriptors::build_reference_descriptor_set();
  set.strings.strings.clear();  // string 1 and 2 now stall
  firmware::DeviceOptions opts;
  opts.descriptors = set;
  firmware::SensorDevice broken(registers::RegisterFile::reference(),
                                firmware::parse_sensor_spec("constant:2.5"), opts);
  Host host(bus);
  bus.attach(broken);
  try {
    host.enumerate();
    FAIL();
  } catch (const EnumerationError& e) {
    EXPECT_EQ(e.step(), "GET_DESCRIPTOR(STRING 1)");
  }
}

TEST_F(HostFixture, ScheduledEnumerationFailureIsReported) {
  auto set = descriptors::build_reference_descriptor_set();
  set.strings.strings.clear();
  firmware::DeviceOptions opts;
  opts.descriptors = set;
  firmware::SensorDevice broken(registers::RegisterFile::reference(),
                                firmware::parse_sensor_spec("constant:2.5"), opts);
  Host host(bus);
  bus.attach(broken);
  clock.run_until(kMicrosPerSecond);
  EXPECT_FALSE(host.device());
  EXPECT_NE(host.transcript().back().find("STRING 1"), std::string::npos);
}
