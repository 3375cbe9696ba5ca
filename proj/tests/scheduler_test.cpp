#include "doctest.h"

#include <bit>
#include <random>
#include <set>

#include "core.hpp"

using namespace gpusim;

TEST_CASE("schedule_next picks the only visible wavefront") {
  SchedulerMasks m;
  m.active = 0b1111;
  m.stalled = 0;
  m.visible = 0b0010;
  auto wid = schedule_next(m);
  REQUIRE(wid.has_value());
  CHECK(*wid == 1);
  CHECK(m.visible == 0);
}

TEST_CASE("empty visible mask refills from active and not stalled") {
  SchedulerMasks m;
  m.active = 0b1011;
  m.stalled = 0b0001;
  m.visible = 0;
  auto wid = schedule_next(m);
  REQUIRE(wid.has_value());
  // refill gives 0b1010, lowest set bit is wavefront 1
  CHECK(*wid == 1);
  CHECK(m.visible == 0b1000);
}

TEST_CASE("idle core yields none") {
  SchedulerMasks m;
  CHECK(!schedule_next(m).has_value());
  m.active = 0b0110;
  m.stalled = 0b0110;
  CHECK(!schedule_next(m).has_value());
}

TEST_CASE("barrier-stalled wavefronts are not schedulable") {
  SchedulerMasks m;
  m.active = 0b0111;
  m.barrier_stalled = 0b0011;
  auto wid = schedule_next(m);
  REQUIRE(wid.has_value());
  CHECK(*wid == 2);
}

TEST_CASE("round fairness: each wavefront selected at most once per refill") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 2000; trial++) {
    SchedulerMasks m;
    m.active = rng() & 0xFFFF;
    m.stalled = rng() & m.active;
    m.barrier_stalled = rng() & m.active & ~m.stalled;
    uint32_t eligible = m.active & ~m.stalled & ~m.barrier_stalled;
    if (eligible == 0) {
      CHECK(!schedule_next(m).has_value());
      continue;
    }
    // One full round between refills selects every eligible wavefront once.
    std::set<uint32_t> seen;
    int n = std::popcount(eligible);
    for (int k = 0; k < n; k++) {
      auto wid = schedule_next(m);
      REQUIRE(wid.has_value());
      CHECK((eligible & (1u << *wid)) != 0);
      CHECK(!seen.count(*wid));
      seen.insert(*wid);
      CHECK((m.visible & ~(m.active & ~m.stalled & ~m.barrier_stalled)) == 0);
    }
    CHECK(m.visible == 0);
  }
}
