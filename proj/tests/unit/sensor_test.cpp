#include "hidsense/sensor.hpp"

#include <gtest/gtest.h>

using namespace hidsense;
using namespace hidsense::firmware;

TEST(Sensor, ParseSpecs) {
  const auto c = parse_sensor_spec("constant:2.5");
  EXPECT_EQ(c.kind, SignalKind::Constant);
  EXPECT_DOUBLE_EQ(c.volts, 2.5);
  const auto r = parse_sensor_spec("ramp:0:0.5");
  EXPECT_EQ(r.kind, SignalKind::Ramp);
  EXPECT_DOUBLE_EQ(r.rate, 0.5);
  const auto s = parse_sensor_spec("sine:2.5:1:0.1");
  EXPECT_EQ(s.kind, SignalKind::Sine);
  EXPECT_DOUBLE_EQ(s.offset, 2.5);
  EXPECT_DOUBLE_EQ(s.amplitude, 1.0);
  EXPECT_DOUBLE_EQ(s.freq, 0.1);
  EXPECT_EQ(parse_sensor_spec("steps:1:0.25:1").kind, SignalKind::Steps);
}

TEST(Sensor, RejectsBadSpecs) {
  for (const char* bad : {"", "constant", "constant:x", "ramp:1", "wobble:1", "constant:1:2",
                          "sine:1:2"}) {
    EXPECT_THROW(parse_sensor_spec(bad), ConfigError) << bad;
  }
}

TEST(Sensor, Evaluate) {
  EXPECT_DOUBLE_EQ(sensor_eval(parse_sensor_spec("constant:2.5"), 7 * kMicrosPerSecond), 2.5);
  EXPECT_DOUBLE_EQ(sensor_eval(parse_sensor_spec("ramp:1:0.5"), 2 * kMicrosPerSecond), 2.0);
  EXPECT_DOUBLE_EQ(sensor_eval(parse_sensor_spec("ramp:0:1"), 60 * kMicrosPerSecond), 5.0);
  EXPECT_DOUBLE_EQ(sensor_eval(parse_sensor_spec("steps:1:0.5:1"), 2'500'000), 2.0);
  EXPECT_NEAR(sensor_eval(parse_sensor_spec("sine:2.5:1:0.25"), kMicrosPerSecond), 3.5, 1e-12);
}

TEST(Sensor, NoiseIsDeterministicAndBounded) {
  auto s = parse_sensor_spec("constant:2.5");
  s.noise = 0.1;
  s.seed = 42;
  auto other = s;
  other.seed = 43;
  bool differs = false;
  for (Micros t = 0; t < 100 * kMicrosPerSecond; t += 997'003) {
    const double v = sensor_eval(s, t);
    EXPECT_DOUBLE_EQ(v, sensor_eval(s, t));
    EXPECT_GE(v, 2.4);
    EXPECT_LE(v, 2.6);
    differs |= v != sensor_eval(other, t);
  }
  EXPECT_TRUE(differs);
}

TEST(Sensor, ParseFile) {
  const auto s = parse_sensor_file(
      "# skin probe\n"
      "kind = sine\n"
      "offset=2.0\n"
      "amplitude=0.5   # half a volt\n"
      "freq=0.05\n"
      "noise=0.01\n"
      "seed=7\n");
  EXPECT_EQ(s.kind, SignalKind::Sine);
  EXPECT_DOUBLE_EQ(s.offset, 2.0);
  EXPECT_DOUBLE_EQ(s.amplitude, 0.5);
  EXPECT_EQ(s.seed, 7u);
  EXPECT_THROW(parse_sensor_file("volts=1\n"), ConfigError);
  EXPECT_THROW(parse_sensor_file("kind=constant\nbogus=1\n"), ConfigError);
  EXPECT_THROW(parse_sensor_file("kind=constant\nvolts\n"), ConfigError);
}
