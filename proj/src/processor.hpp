#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "core.hpp"
#include "mem.hpp"
#include "runtime.hpp"
#include "stats.hpp"

namespace gpusim {

// Peak single-precision throughput: one lane-op per cycle per thread.
double peak_gflops(uint32_t cores, uint32_t threads_per_wavefront,
                   double freq_ghz);

struct TraceEvent {
  uint64_t cycle = 0;
  uint8_t core = 0;
  uint8_t wavefront = 0;
  uint32_t pc = 0;
  uint32_t tmask = 0;
  Instruction instr;
};
using TraceFn = std::function<void(const TraceEvent&)>;

// Whole-processor model: cores, caches, scratchpads, texture units, the
// shared L2/L3 levels and the memory model, advanced in a fixed
// deterministic order each cycle.
class Processor {
 public:
  explicit Processor(const ProcessorConfig& cfg);

  // Copies the image into RAM and resets all execution and memory state.
  // Returns an error message when the image does not fit.
  std::string load_image(const KernelImage& image);
  // Raw RAM poke for texture preloads and test fixtures.
  bool preload(uint32_t addr, const uint8_t* data, size_t len);

  void step();
  RunStats run(uint64_t max_cycles);

  uint64_t now() const { return cycle_; }
  bool all_inactive() const;
  const std::optional<SimFault>& fault() const { return fault_; }
  const std::string& console() const { return console_; }
  const ProcessorConfig& config() const { return cfg_; }

  Core& core(size_t i) { return *cores_[i]; }
  size_t num_cores() const { return cores_.size(); }
  MainMemory& ram() { return ram_; }
  void set_trace(TraceFn fn) { trace_ = std::move(fn); }

  // Hooks used by cores during execution.
  void raise_fault(SimFault f);
  void console_write(uint8_t byte) { console_.push_back(static_cast<char>(byte)); }
  bool barrier_arrive(uint32_t bar_id, uint32_t expected, uint8_t core_id,
                      uint8_t wid);
  uint64_t writes_in_flight() const;
  void emit_trace(const TraceEvent& ev) { if (trace_) trace_(ev); }

  // Collected after run(); also used by sweeps.
  RunStats collect_stats(uint64_t cycles, RunStatus status) const;

 private:
  void wire_reset();
  void move_memreqs();
  void drain_line_responses();
  bool memory_idle() const;

  ProcessorConfig cfg_;
  MainMemory ram_;
  std::unique_ptr<DramModel> dram_;
  std::vector<std::unique_ptr<Core>> cores_;
  std::vector<std::unique_ptr<Cache>> l2s_;   // one per cluster when enabled
  std::unique_ptr<Cache> l3_;
  std::vector<Cache*> caches_by_id_;
  BarrierTable global_barriers_;
  std::optional<SimFault> fault_;
  std::string console_;
  uint64_t cycle_ = 0;
  uint32_t rr_dram_ = 0;
  std::vector<uint32_t> rr_l2_;
  uint32_t rr_l3_ = 0;
  TraceFn trace_;
};

}  // namespace gpusim
