#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <vector>

#include "config.hpp"

namespace gpusim {

enum class AccessKind : uint8_t { Ifetch, Load, Store, Texel };

// Identifies one in-flight request end to end; responses carry their
// request's tag back unchanged.
struct RequestTag {
  uint32_t pc = 0;
  uint8_t wavefront = 0;
  uint8_t core = 0;
  AccessKind kind = AccessKind::Load;
  bool operator==(const RequestTag&) const = default;
};

// One lane's word-granularity memory request, as produced by a wavefront
// memory instruction or the texture unit.
struct LaneRequest {
  uint8_t lane = 0;
  uint32_t addr = 0;         // byte address; word containing it is accessed
  bool is_store = false;
  uint32_t store_data = 0;   // positioned within the aligned word
  uint8_t byte_mask = 0;     // which bytes of the word a store writes
  bool was_deferred = false; // set once on the first bank-conflict deferral
  RequestTag tag;
};

// Per-lane response; the value is the full aligned word.
struct CoreResponse {
  RequestTag tag;
  uint8_t lane = 0;
  uint32_t addr = 0;
  uint32_t value = 0;
  bool is_store = false;
};

// Line-granularity traffic between cache levels and memory.
struct LineRequest {
  uint32_t addr = 0;         // line-aligned
  bool is_write = false;
  std::vector<uint8_t> data; // line payload for writes
  uint32_t line_size = 0;
  uint32_t source = 0;       // requesting cache id, for response routing
  uint64_t seq = 0;          // global arrival order
};

struct LineResponse {
  uint32_t addr = 0;
  std::vector<uint8_t> data;
};

// Flat backing RAM.  Bounds are checked by callers against the memory map.
class MainMemory {
 public:
  MainMemory(uint32_t base, uint32_t size) : base_(base), bytes_(size, 0) {}

  bool contains(uint32_t addr, uint32_t len) const {
    return addr >= base_ && addr - base_ + len <= bytes_.size();
  }
  uint8_t* data() { return bytes_.data(); }
  uint32_t base() const { return base_; }
  uint32_t size() const { return static_cast<uint32_t>(bytes_.size()); }

  uint32_t read_u32(uint32_t addr) const {
    uint32_t off = addr - base_;
    return static_cast<uint32_t>(bytes_[off]) |
           (static_cast<uint32_t>(bytes_[off + 1]) << 8) |
           (static_cast<uint32_t>(bytes_[off + 2]) << 16) |
           (static_cast<uint32_t>(bytes_[off + 3]) << 24);
  }
  void write_u32(uint32_t addr, uint32_t v) {
    uint32_t off = addr - base_;
    bytes_[off] = static_cast<uint8_t>(v);
    bytes_[off + 1] = static_cast<uint8_t>(v >> 8);
    bytes_[off + 2] = static_cast<uint8_t>(v >> 16);
    bytes_[off + 3] = static_cast<uint8_t>(v >> 24);
  }
  void read_block(uint32_t addr, uint8_t* out, uint32_t len) const {
    std::copy_n(bytes_.begin() + (addr - base_), len, out);
  }
  void write_block(uint32_t addr, const uint8_t* in, uint32_t len) {
    std::copy_n(in, len, bytes_.begin() + (addr - base_));
  }
  void clear() { std::fill(bytes_.begin(), bytes_.end(), 0); }

 private:
  uint32_t base_;
  std::vector<uint8_t> bytes_;
};

// Fixed-latency, fixed-bandwidth memory model.  Accepts up to `bandwidth`
// requests per cycle; each completes exactly `latency` cycles later.
// Writes apply to backing RAM at acceptance (requests are ordered by
// acceptance), reads snapshot at acceptance; responses are handed out in
// completion order, ties broken by acceptance order.
class DramModel {
 public:
  struct Stats {
    uint64_t reads = 0;
    uint64_t writes = 0;
    uint64_t busy_cycles = 0;
  };

  DramModel(uint32_t latency, uint32_t bandwidth, MainMemory* ram)
      : latency_(latency), bandwidth_(bandwidth), ram_(ram) {}

  bool can_accept() const { return accepted_this_cycle_ < bandwidth_; }
  void accept(LineRequest req, uint64_t now);

  // Advances one cycle: hands due responses to `deliver`, which returns
  // false when the destination cannot take the response this cycle (head
  // of line blocks to preserve order).
  void cycle(uint64_t now,
             const std::function<bool(uint32_t source, LineResponse&&)>&
                 deliver);

  bool idle() const { return pending_.empty(); }
  size_t in_flight() const { return pending_.size(); }
  size_t writes_in_flight() const { return writes_in_flight_; }
  Stats stats;

 private:
  struct Pending {
    uint64_t ready_cycle;
    uint64_t seq;
    uint32_t source;
    bool is_write;
    LineResponse resp;
  };
  uint32_t latency_;
  uint32_t bandwidth_;
  MainMemory* ram_;
  std::deque<Pending> pending_;  // acceptance order == completion order
  uint32_t accepted_this_cycle_ = 0;
  size_t writes_in_flight_ = 0;
  uint64_t next_seq_ = 0;
};

}  // namespace gpusim
