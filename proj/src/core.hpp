#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "cache.hpp"
#include "config.hpp"
#include "isa.hpp"
#include "mem.hpp"
#include "runtime.hpp"
#include "texture.hpp"

namespace gpusim {

class Processor;

// The four per-core wavefront masks.  visible is always a subset of
// active & ~stalled & ~barrier_stalled.
struct SchedulerMasks {
  uint32_t active = 0;
  uint32_t stalled = 0;
  uint32_t barrier_stalled = 0;
  uint32_t visible = 0;
};

// Picks the lowest visible wavefront and invalidates it; refills the
// visible mask from active & ~stalled & ~barrier_stalled when it is empty.
// Returns nullopt only when the refill itself comes up empty.
std::optional<uint32_t> schedule_next(SchedulerMasks& m);

struct IpdomEntry {
  uint32_t saved_tmask = 0;
  std::optional<uint32_t> target_pc;  // absent == fall-through entry
};

struct BarrierTable {
  struct Entry {
    bool armed = false;
    uint32_t expected = 0;
    uint32_t remaining = 0;
    std::vector<std::pair<uint8_t, uint8_t>> waiting;  // (core, wavefront)
  };
  std::vector<Entry> entries;
};

struct Wavefront {
  uint32_t pc = 0;
  uint32_t tmask = 0;
  std::vector<IpdomEntry> ipdom;
  std::vector<std::array<uint32_t, 32>> iregs;  // [thread][reg]
  std::vector<std::array<uint32_t, 32>> fregs;

  bool fetch_valid = false;
  uint32_t fetch_pc = 0;
  uint32_t fetch_word = 0;
  bool fetch_pending = false;

  struct ScoreboardEntry {
    bool fp = false;
    uint8_t reg = 0;
    bool event = false;       // released by a writeback, not a timer
    uint64_t release_cycle = 0;
  };
  std::vector<ScoreboardEntry> scoreboard;

  std::vector<LaneRequest> pending_dcache;
  std::vector<LaneRequest> pending_shm;
  std::optional<LaneRequest> pending_ifetch;

  uint32_t generation = 0;  // bumped on respawn to drop stale writebacks
};

// One wavefront load with responses still outstanding.
struct LoadTracker {
  uint32_t pc = 0;
  uint8_t wid = 0;
  uint32_t generation = 0;
  Op op = Op::Lw;
  bool fp = false;
  uint8_t rd = 0;
  uint32_t expected = 0;  // lane mask
  uint32_t got = 0;
  std::array<uint32_t, 32> lane_addr{};
  std::array<uint32_t, 32> lane_word{};
};

class Core {
 public:
  Core(const ProcessorConfig& cfg, uint8_t id, Processor* proc);

  void reset(uint32_t entry_pc);
  // Phase A: response draining, writebacks, fence progression.
  void commit_phase(uint64_t now);
  // Phase B: deferred-request replay, texture unit, schedule + execute.
  void issue_phase(uint64_t now);
  void tick_memories(uint64_t now);

  bool active() const { return masks.active != 0; }
  bool mem_idle() const;
  uint8_t id() const { return id_; }

  // Direct-state entry points shared by instruction execution and tests.
  void exec_wspawn(uint32_t count, uint32_t target_pc, uint32_t issuer_wid);
  void exec_tmc(uint32_t wid, uint32_t count);
  bool exec_split(uint32_t wid, uint32_t pred_mask);   // false: overflow
  // Outer nullopt: underflow.  Inner value: redirect target when the popped
  // entry was not a fall-through.
  std::optional<std::optional<uint32_t>> exec_join(uint32_t wid);
  void set_stalled(uint32_t wid, bool on);
  void set_barrier_stalled(uint32_t wid, bool on);
  void deactivate(uint32_t wid);
  void activate(uint32_t wid);

  SchedulerMasks masks;
  std::vector<Wavefront> wavefronts;
  Cache icache;
  Cache dcache;
  SharedMemory shm;
  TextureUnit tex_unit;
  BarrierTable local_barriers;

  uint64_t instructions = 0;
  uint64_t lane_instructions = 0;
  uint64_t idle_cycles = 0;

 private:
  enum class FenceStage { None, Drain, Flush, WaitMem };

  void issue_and_execute(uint32_t wid, uint64_t now);
  void execute(uint32_t wid, const Instruction& in, uint64_t now);
  void exec_memory(uint32_t wid, const Instruction& in, uint64_t now);
  void exec_csr(uint32_t wid, const Instruction& in);
  void exec_fp(uint32_t wid, const Instruction& in);
  void exec_ext(uint32_t wid, const Instruction& in, uint64_t now);

  bool scoreboard_blocked(const Wavefront& w, const Instruction& in) const;
  void scoreboard_insert(Wavefront& w, bool fp, uint8_t reg, bool event,
                         uint64_t release);
  void scoreboard_release(Wavefront& w, bool fp, uint8_t reg);
  uint32_t latency_of(const Instruction& in) const;

  void replay_memory(uint32_t wid);
  void finish_load(LoadTracker& t);
  void handle_response(const CoreResponse& r);
  uint32_t csr_read_value(uint32_t wid, uint32_t lane, uint32_t csr,
                          bool& ok) const;

  uint32_t first_active_lane(uint32_t tmask) const;
  uint32_t read_ireg(uint32_t wid, uint32_t lane, uint8_t r) const;
  void write_ireg(uint32_t wid, uint32_t lane, uint8_t r, uint32_t v);

  const ProcessorConfig& cfg_;
  uint8_t id_;
  Processor* proc_;
  std::vector<LoadTracker> loads_;
  uint64_t in_flight_stores_ = 0;
  FenceStage fence_stage_ = FenceStage::None;
  uint32_t fence_wid_ = 0;
  friend class Processor;
};

}  // namespace gpusim
