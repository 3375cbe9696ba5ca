#include "doctest.h"

#include <vector>

#include "mem.hpp"

using namespace gpusim;

namespace {

struct Delivery {
  uint64_t cycle;
  uint32_t source;
  uint32_t addr;
};

LineRequest read_req(uint32_t addr, uint32_t source) {
  LineRequest r;
  r.addr = addr;
  r.is_write = false;
  r.line_size = 16;
  r.source = source;
  return r;
}

}  // namespace

TEST_CASE("two simultaneous requests at bandwidth 1 complete back to back") {
  MainMemory ram(0x80000000u, 1 << 16);
  DramModel dram(100, 1, &ram);
  std::vector<Delivery> got;
  auto deliver = [&](uint64_t now) {
    dram.cycle(now, [&](uint32_t src, LineResponse&& resp) {
      got.push_back({now, src, resp.addr});
      return true;
    });
  };
  // t=0: only one of the two can be accepted
  CHECK(dram.can_accept());
  dram.accept(read_req(0x80000000u, 1), 0);
  CHECK(!dram.can_accept());
  deliver(0);
  CHECK(dram.can_accept());
  dram.accept(read_req(0x80000010u, 2), 1);
  for (uint64_t t = 1; t <= 110; t++) deliver(t);
  REQUIRE(got.size() == 2);
  CHECK(got[0].cycle == 100);
  CHECK(got[1].cycle == 101);
}

TEST_CASE("bandwidth 2 serves both at the same completion cycle") {
  MainMemory ram(0x80000000u, 1 << 16);
  DramModel dram(100, 2, &ram);
  std::vector<Delivery> got;
  dram.accept(read_req(0x80000000u, 1), 0);
  CHECK(dram.can_accept());
  dram.accept(read_req(0x80000010u, 2), 0);
  CHECK(!dram.can_accept());
  for (uint64_t t = 0; t <= 105; t++)
    dram.cycle(t, [&](uint32_t src, LineResponse&& resp) {
      got.push_back({t, src, resp.addr});
      return true;
    });
  REQUIRE(got.size() == 2);
  CHECK(got[0].cycle == 100);
  CHECK(got[1].cycle == 100);
  CHECK(got[0].source == 1);  // acceptance order breaks the tie
  CHECK(got[1].source == 2);
}

TEST_CASE("writes apply to backing memory and reads see them in order") {
  MainMemory ram(0x80000000u, 1 << 16);
  DramModel dram(10, 2, &ram);
  LineRequest w;
  w.addr = 0x80000020u;
  w.is_write = true;
  w.line_size = 16;
  w.data.assign(16, 0xAB);
  dram.accept(w, 0);
  dram.accept(read_req(0x80000020u, 3), 0);
  std::vector<LineResponse> got;
  for (uint64_t t = 0; t <= 12; t++)
    dram.cycle(t, [&](uint32_t, LineResponse&& resp) {
      got.push_back(std::move(resp));
      return true;
    });
  REQUIRE(got.size() == 1);
  CHECK(got[0].data[0] == 0xAB);
  CHECK(ram.data()[0x20] == 0xAB);
  CHECK(dram.idle());
}

TEST_CASE("blocked delivery preserves order") {
  MainMemory ram(0x80000000u, 1 << 16);
  DramModel dram(5, 2, &ram);
  dram.accept(read_req(0x80000000u, 1), 0);
  dram.accept(read_req(0x80000010u, 2), 0);
  std::vector<uint32_t> order;
  int refusals = 3;
  for (uint64_t t = 0; t <= 20; t++)
    dram.cycle(t, [&](uint32_t src, LineResponse&&) {
      if (refusals > 0) {
        refusals--;
        return false;  // destination full: head of line must wait
      }
      order.push_back(src);
      return true;
    });
  REQUIRE(order.size() == 2);
  CHECK(order[0] == 1);
  CHECK(order[1] == 2);
}
