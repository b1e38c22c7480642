#include "hidsense/bus.hpp"

#include <gtest/gtest.h>

#include <random>
#include <vector>

using namespace hidsense;
using hidsense::bus::SimClock;

TEST(SimClock, OrdersByTimeThenInsertion) {
  SimClock clock;
  std::vector<int> order;
  clock.schedule_at(20, [&] { order.push_back(3); });
  clock.schedule_at(10, [&] { order.push_back(1); });
  clock.schedule_at(10, [&] { order.push_back(2); });
  clock.run_until(100);
  EXPECT_EQ(order, (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(clock.now(), 100);
  EXPECT_EQ(clock.dispatched(), 3u);
}

TEST(SimClock, RunUntilIsInclusiveAndStops) {
  SimClock clock;
  int fired = 0;
  clock.schedule_at(50, [&] { ++fired; });
  clock.schedule_at(51, [&] { ++fired; });
  clock.run_until(50);
  EXPECT_EQ(fired, 1);
  EXPECT_EQ(clock.pending(), 1u);
}

TEST(SimClock, RejectsThePast) {
  SimClock clock;
  clock.run_until(10);
  EXPECT_THROW(clock.schedule_at(9, [] {}), StateError);
  EXPECT_THROW(clock.run_until(5), StateError);
  EXPECT_NO_THROW(clock.schedule_at(10, [] {}));
}

TEST(SimClock, CallbacksMayScheduleMore) {
  SimClock clock;
  int ticks = 0;
  std::function<void()> tick = [&] {
    ++ticks;
    clock.schedule_in(832, tick);
  };
  clock.schedule_at(832, tick);
  clock.run_until(kMicrosPerSecond);
  EXPECT_EQ(ticks, 1201);  // floor(1e6 / 832)
}

TEST(SimClock, SameTimeScheduleFromCallbackRunsAfterPeers) {
  SimClock clock;
  std::vector<int> order;
  clock.schedule_at(5, [&] {
    order.push_back(1);
    clock.schedule_in(0, [&] { order.push_back(3); });
  });
  clock.schedule_at(5, [&] { order.push_back(2); });
  clock.run_until(5);
  EXPECT_EQ(order, (std::vector<int>{1, 2, 3}));
}

TEST(SimClock, RandomSchedulesDispatchSorted) {
  std::mt19937_64 rng(1234);
  for (int round = 0; round < 50; ++round) {
    SimClock clock;
    std::vector<std::pair<Micros, int>> seen;
    std::uniform_int_distribution<Micros> when(0, 1000);
    for (int i = 0; i < 200; ++i) {
      const Micros t = when(rng);
      clock.schedule_at(t, [&seen, &clock, i] { seen.emplace_back(clock.now(), i); });
    }
    clock.run_until(1000);
    ASSERT_EQ(seen.size(), 200u);
    for (std::size_t k = 1; k < seen.size(); ++k) {
      ASSERT_LE(seen[k - 1].first, seen[k].first);
      if (seen[k - 1].first == seen[k].first) ASSERT_LT(seen[k - 1].second, seen[k].second);
    }
  }
}
