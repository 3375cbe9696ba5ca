#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "config.hpp"
#include "mem.hpp"

namespace gpusim {

// Line-interleaved bank mapping.
inline uint32_t bank_index(uint32_t addr, const CacheConfig& cfg) {
  return (addr / cfg.line_size) % cfg.num_banks;
}

struct CacheStats {
  uint64_t accesses = 0;       // fused accesses looked up (== hits + misses)
  uint64_t hits = 0;
  uint64_t misses = 0;
  uint64_t deferrals = 0;      // lane deferral events from bank conflicts
  uint64_t backpressure = 0;   // lane deferral events from full queues
  uint64_t mem_requests = 0;   // line requests issued to the next level
  uint64_t writebacks = 0;
  uint64_t mshr_high_water = 0;
  // First-presentation request accounting behind the utilization metric: a
  // request that ever waited on a bank conflict counts once in
  // util_deferred, one that went straight through counts in util_clean.
  uint64_t util_clean = 0;
  uint64_t util_deferred = 0;

  double utilization() const {
    uint64_t d = util_clean + util_deferred;
    return d == 0 ? 1.0 : static_cast<double>(util_clean) / d;
  }
  void add(const CacheStats& o);
};

// Result of one bank-selection pass over a wavefront's lane requests, as a
// standalone decision procedure (the cache applies the same rules
// incrementally against its per-cycle bank claims).
struct CoalesceResult {
  struct Issue {
    uint32_t bank = 0;
    uint32_t line_addr = 0;
    std::vector<size_t> lanes;  // indices into the input span
  };
  std::vector<Issue> issues;       // at most one per bank
  std::vector<size_t> deferred;    // indices deferred to the next cycle
};

CoalesceResult select_and_coalesce(std::span<const LaneRequest> lanes,
                                   const CacheConfig& cfg);

// Multi-banked, non-blocking, pipelined cache.  Each bank runs a four-stage
// pipeline (schedule, tag access, data access, response) with a per-bank
// MSHR; the front-end bank selector fuses same-line requests onto virtual
// ports; the back-end emits per-lane responses and line traffic to the next
// level.  Write-back, write-allocate.
class Cache {
 public:
  Cache(std::string name, const CacheConfig& cfg, uint32_t id);

  const std::string& name() const { return name_; }
  uint32_t id() const { return id_; }
  const CacheConfig& config() const { return cfg_; }

  // Early-full acceptance check for one bank (input queue space, a free
  // MSHR entry net of in-flight reservations, and memory-request headroom).
  bool can_accept(uint32_t bank) const;

  // Presents one group's lane requests; returns a bitmask over span indices
  // of the lanes accepted this cycle.  Deferred lanes keep their
  // first-conflict marking in LaneRequest::was_deferred.
  uint32_t submit_lanes(std::span<LaneRequest> lanes);

  // Line-granularity access from an upper cache (reads respond through
  // line_responses; writes are fire-and-forget).  False when not accepted.
  bool submit_line(const LineRequest& req);

  // Synchronous read-only lookup used for instruction fetch: returns the
  // word when the line is resident and unencumbered, nullopt on miss.
  std::optional<uint32_t> probe_word(uint32_t addr, uint64_t now);

  void cycle(uint64_t now);

  bool fill_can_accept(uint32_t addr) const;
  void deliver_fill(LineResponse&& resp);

  // Fence support: write all dirty lines to the next level, then
  // invalidate.  Caller must drain its own in-flight operations first.
  void flush_begin();
  bool flush_active() const { return flushing_; }
  bool banks_idle() const;
  bool idle() const;
  uint64_t line_stores_in_flight() const { return line_stores_in_flight_; }
  uint64_t pending_write_requests() const;

  // Test hooks.
  bool line_present(uint32_t addr) const;
  bool line_dirty(uint32_t addr) const;
  uint64_t mshr_live(uint32_t bank) const;

  std::deque<CoreResponse> core_responses;
  struct RoutedLine {
    uint32_t source;
    LineResponse resp;
  };
  std::deque<RoutedLine> line_responses;
  std::deque<LineRequest> mem_requests;

  CacheStats stats;

 private:
  struct Slot {
    uint8_t lane = 0;
    uint8_t port = 0;
    uint16_t word_off = 0;     // byte offset of the word within the line
    bool is_store = false;
    uint32_t store_data = 0;
    uint8_t byte_mask = 0;
    uint32_t addr = 0;
    std::optional<uint32_t> value;  // filled at data access
  };
  struct Access {
    uint32_t line_addr = 0;
    bool is_store = false;
    bool full_line = false;
    std::vector<Slot> slots;
    std::vector<uint8_t> line_data;   // full-line write payload / read result
    RequestTag tag;
    uint32_t source = UINT32_MAX;     // upper cache id; UINT32_MAX == core
    uint64_t seq = 0;
  };
  enum class PipeSrc : uint8_t { CoreReq, Fill, Replay };
  struct PipeOp {
    PipeSrc src = PipeSrc::CoreReq;
    Access access;
    LineResponse fill;
    bool hit = false;
    bool consumed = false;            // merged into an MSHR entry at tag time
    bool alloc_done = false;          // whole-line store allocated in place
    uint32_t way = UINT32_MAX;        // hit way or fill victim
    bool evict = false;
    uint32_t evict_addr = 0;
    std::vector<uint8_t> evict_data;
  };
  struct MshrEntry {
    bool live = false;
    uint32_t line_addr = 0;
    bool filled = false;
    uint32_t in_pipe = 0;  // popped replays not yet past the response stage
    std::deque<Access> pending;
  };
  struct Bank {
    std::deque<Access> input_q;
    std::deque<LineResponse> fill_q;
    std::array<std::optional<PipeOp>, 4> stage;  // 0=sched .. 3=response
    std::vector<MshrEntry> mshr;
    uint32_t mshr_live = 0;
    uint32_t mshr_reserved = 0;
    bool fill_in_pipe = false;
    // storage
    std::vector<uint32_t> line_addr;  // per way slot
    std::vector<bool> valid, dirty;
    std::vector<uint64_t> lru;
    std::vector<uint8_t> data;
    // per-cycle selector claim
    bool open = false;
    bool claimed = false;
    uint32_t open_line = 0;
    bool open_store = false;
    RequestTag open_tag;
    std::array<bool, 4> port_used{};
  };

  uint32_t bank_of(uint32_t addr) const { return bank_index(addr, cfg_); }
  uint32_t set_of(uint32_t line_addr) const {
    return (line_addr / cfg_.line_size / cfg_.num_banks) % cfg_.sets_per_bank();
  }
  uint32_t way_slot(uint32_t bank, uint32_t set, uint32_t way) const {
    (void)bank;
    return set * cfg_.associativity + way;
  }
  int find_way(const Bank& b, uint32_t line_addr) const;
  MshrEntry* find_mshr(Bank& b, uint32_t line_addr);
  const MshrEntry* find_mshr(const Bank& b, uint32_t line_addr) const;
  // A line with a live MSHR entry is pinned: replays still need it.
  int pick_victim(const Bank& b, uint32_t set) const;
  bool fill_schedulable(const Bank& b, uint32_t line_addr) const;
  bool memreq_headroom() const;
  void reserve_memreq() { memreq_reserved_++; }
  void release_memreq() { memreq_reserved_--; }
  void emit_memreq(LineRequest req);

  void stage_tag(Bank& b, PipeOp& op, uint64_t now);
  void stage_data(Bank& b, PipeOp& op, uint64_t now);
  void stage_response(Bank& b, PipeOp& op, uint64_t now);
  void respond_access(Access& a, const uint8_t* line);
  void run_flush(uint64_t now);

  std::string name_;
  CacheConfig cfg_;
  uint32_t id_;
  std::vector<Bank> banks_;
  uint32_t memreq_reserved_ = 0;
  uint64_t next_seq_ = 0;
  uint64_t line_stores_in_flight_ = 0;
  bool flushing_ = false;
  uint32_t flush_cursor_ = 0;
};

// Per-core scratchpad: one bank per thread lane, word-interleaved,
// single-cycle when conflict-free; conflicting lanes serialize.
class SharedMemory {
 public:
  SharedMemory(uint32_t base, uint32_t size, uint32_t num_banks);

  bool contains(uint32_t addr, uint32_t len) const {
    return addr >= base_ && addr - base_ + len <= data_.size();
  }
  // Accepts at most one lane per bank per cycle; returns accepted mask.
  uint32_t submit_lanes(std::span<LaneRequest> lanes);
  void cycle(uint64_t now);

  std::deque<CoreResponse> responses;
  uint64_t accesses = 0;
  uint64_t conflicts = 0;

 private:
  uint32_t base_;
  uint32_t num_banks_;
  std::vector<uint8_t> data_;
  std::vector<bool> bank_claimed_;
  std::deque<CoreResponse> staging_;  // becomes visible next cycle
};

}  // namespace gpusim
