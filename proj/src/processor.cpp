#include "processor.hpp"

#include <cassert>

namespace gpusim {

double peak_gflops(uint32_t cores, uint32_t threads_per_wavefront,
                   double freq_ghz) {
  return static_cast<double>(cores * threads_per_wavefront) * freq_ghz;
}

Processor::Processor(const ProcessorConfig& cfg)
    : cfg_(cfg), ram_(cfg.ram_base, cfg.ram_size) {
  wire_reset();
}

void Processor::wire_reset() {
  cores_.clear();
  l2s_.clear();
  l3_.reset();
  caches_by_id_.clear();
  fault_.reset();
  console_.clear();
  cycle_ = 0;
  rr_dram_ = 0;
  rr_l3_ = 0;
  global_barriers_.entries.assign(cfg_.num_barriers, {});

  for (uint32_t c = 0; c < cfg_.num_cores; c++)
    cores_.push_back(std::make_unique<Core>(cfg_, static_cast<uint8_t>(c), this));
  caches_by_id_.resize(2 * cfg_.num_cores, nullptr);
  for (uint32_t c = 0; c < cfg_.num_cores; c++) {
    caches_by_id_[2 * c] = &cores_[c]->icache;
    caches_by_id_[2 * c + 1] = &cores_[c]->dcache;
  }
  if (cfg_.l2_enable) {
    for (uint32_t cl = 0; cl < cfg_.num_clusters; cl++) {
      uint32_t id = static_cast<uint32_t>(caches_by_id_.size());
      l2s_.push_back(std::make_unique<Cache>(
          "l2." + std::to_string(cl), cfg_.l2, id));
      caches_by_id_.push_back(l2s_.back().get());
    }
  }
  rr_l2_.assign(l2s_.size(), 0);
  if (cfg_.l3_enable) {
    uint32_t id = static_cast<uint32_t>(caches_by_id_.size());
    l3_ = std::make_unique<Cache>("l3", cfg_.l3, id);
    caches_by_id_.push_back(l3_.get());
  }
  dram_ = std::make_unique<DramModel>(cfg_.mem_latency, cfg_.mem_bandwidth,
                                      &ram_);
}

std::string Processor::load_image(const KernelImage& image) {
  if (image.bytes.empty()) return "empty kernel image";
  if (!ram_.contains(image.load_base, static_cast<uint32_t>(image.bytes.size())))
    return "kernel image does not fit in RAM";
  if (image.load_base % 4 != 0) return "kernel load base must be 4-byte aligned";
  if (image.entry % 4 != 0 || image.entry < image.load_base ||
      image.entry >= image.load_base + image.bytes.size())
    return "kernel entry point outside the image";
  wire_reset();
  ram_.clear();
  ram_.write_block(image.load_base, image.bytes.data(),
                   static_cast<uint32_t>(image.bytes.size()));
  for (auto& core : cores_) core->reset(image.entry);
  return "";
}

bool Processor::preload(uint32_t addr, const uint8_t* data, size_t len) {
  if (!ram_.contains(addr, static_cast<uint32_t>(len))) return false;
  ram_.write_block(addr, data, static_cast<uint32_t>(len));
  return true;
}

void Processor::raise_fault(SimFault f) {
  if (!fault_) fault_ = std::move(f);
}

bool Processor::barrier_arrive(uint32_t bar_id, uint32_t expected,
                               uint8_t core_id, uint8_t wid) {
  const bool global = (bar_id & 0x80000000u) != 0;
  const uint32_t idx = bar_id & 0x7FFFFFFFu;
  BarrierTable& table =
      global ? global_barriers_ : cores_[core_id]->local_barriers;
  if (idx >= table.entries.size()) {
    raise_fault({"barrier id out of range", cores_[core_id]->wavefronts[wid].pc,
                 core_id, wid});
    return false;
  }
  if (expected == 0) {
    raise_fault({"barrier expects zero wavefronts",
                 cores_[core_id]->wavefronts[wid].pc, core_id, wid});
    return false;
  }
  BarrierTable::Entry& e = table.entries[idx];
  if (!e.armed) {
    e.armed = true;
    e.expected = expected;
    e.remaining = expected;
    e.waiting.clear();
  } else if (e.expected != expected) {
    raise_fault({"barrier arrival count mismatch",
                 cores_[core_id]->wavefronts[wid].pc, core_id, wid});
    return false;
  }
  e.remaining--;
  if (e.remaining == 0) {
    for (auto [c, w] : e.waiting) cores_[c]->set_barrier_stalled(w, false);
    e = {};
    return true;
  }
  e.waiting.push_back({core_id, wid});
  cores_[core_id]->set_barrier_stalled(wid, true);
  return true;
}

uint64_t Processor::writes_in_flight() const {
  uint64_t n = dram_->writes_in_flight();
  for (Cache* c : caches_by_id_) n += c->pending_write_requests();
  return n;
}

void Processor::move_memreqs() {
  // L1 -> L2 (or straight to DRAM), one grant per destination bank per
  // cycle via the bank claim; round-robin across sources.
  auto try_move_into_cache = [&](Cache& sink, std::vector<Cache*>& sources,
                                 uint32_t& rr) {
    const size_t n = sources.size();
    for (size_t k = 0; k < n; k++) {
      Cache* src = sources[(rr + k) % n];
      if (src->mem_requests.empty()) continue;
      if (sink.submit_line(src->mem_requests.front()))
        src->mem_requests.pop_front();
    }
    rr = (rr + 1) % static_cast<uint32_t>(n);
  };

  if (cfg_.l2_enable) {
    uint32_t cores_per_cluster = cfg_.num_cores / cfg_.num_clusters;
    for (size_t cl = 0; cl < l2s_.size(); cl++) {
      std::vector<Cache*> sources;
      for (uint32_t c = 0; c < cores_per_cluster; c++) {
        uint32_t core_id = static_cast<uint32_t>(cl) * cores_per_cluster + c;
        sources.push_back(&cores_[core_id]->icache);
        sources.push_back(&cores_[core_id]->dcache);
      }
      try_move_into_cache(*l2s_[cl], sources, rr_l2_[cl]);
    }
  }

  std::vector<Cache*> dram_sources;
  if (cfg_.l3_enable) {
    std::vector<Cache*> l3_sources;
    if (cfg_.l2_enable)
      for (auto& l2 : l2s_) l3_sources.push_back(l2.get());
    else
      for (auto& core : cores_) {
        l3_sources.push_back(&core->icache);
        l3_sources.push_back(&core->dcache);
      }
    try_move_into_cache(*l3_, l3_sources, rr_l3_);
    dram_sources.push_back(l3_.get());
  } else if (cfg_.l2_enable) {
    for (auto& l2 : l2s_) dram_sources.push_back(l2.get());
  } else {
    for (auto& core : cores_) {
      dram_sources.push_back(&core->icache);
      dram_sources.push_back(&core->dcache);
    }
  }
  const size_t n = dram_sources.size();
  size_t empty_streak = 0;
  size_t k = 0;
  while (dram_->can_accept() && empty_streak < n) {
    Cache* src = dram_sources[(rr_dram_ + k) % n];
    k++;
    if (src->mem_requests.empty()) {
      empty_streak++;
      continue;
    }
    empty_streak = 0;
    dram_->accept(src->mem_requests.front(), cycle_);
    src->mem_requests.pop_front();
  }
  rr_dram_ = (rr_dram_ + 1) % static_cast<uint32_t>(n);
}

void Processor::drain_line_responses() {
  auto drain = [&](Cache& c) {
    while (!c.line_responses.empty()) {
      auto& head = c.line_responses.front();
      Cache* dst = caches_by_id_[head.source];
      if (!dst->fill_can_accept(head.resp.addr)) break;
      dst->deliver_fill(std::move(head.resp));
      c.line_responses.pop_front();
    }
  };
  for (auto& l2 : l2s_) drain(*l2);
  if (l3_) drain(*l3_);
}

void Processor::step() {
  for (auto& core : cores_) core->commit_phase(cycle_);
  for (auto& core : cores_) core->issue_phase(cycle_);
  move_memreqs();
  drain_line_responses();
  for (auto& core : cores_) core->tick_memories(cycle_);
  for (auto& l2 : l2s_) l2->cycle(cycle_);
  if (l3_) l3_->cycle(cycle_);
  dram_->cycle(cycle_, [&](uint32_t source, LineResponse&& resp) {
    Cache* dst = caches_by_id_[source];
    if (!dst->fill_can_accept(resp.addr)) return false;
    dst->deliver_fill(std::move(resp));
    return true;
  });
  cycle_++;
}

bool Processor::all_inactive() const {
  for (const auto& core : cores_)
    if (core->active()) return false;
  return true;
}

bool Processor::memory_idle() const {
  if (!dram_->idle()) return false;
  for (Cache* c : caches_by_id_)
    if (!c->idle()) return false;
  for (const auto& core : cores_)
    if (!core->mem_idle()) return false;
  return true;
}

RunStats Processor::run(uint64_t max_cycles) {
  uint64_t cycles = 0;
  RunStatus status = RunStatus::Timeout;
  while (cycles < max_cycles) {
    step();
    cycles++;
    if (fault_) {
      status = RunStatus::Fault;
      break;
    }
    if (all_inactive()) {
      status = RunStatus::Completed;
      break;
    }
  }
  if (status == RunStatus::Completed) {
    // Settle in-flight traffic so memory contents are final; these drain
    // cycles are not charged to the run.
    uint64_t guard = 0;
    while (!memory_idle() && guard < 1000000) {
      step();
      guard++;
    }
  }
  return collect_stats(cycles, status);
}

RunStats Processor::collect_stats(uint64_t cycles, RunStatus status) const {
  RunStats s;
  s.cycles = cycles;
  s.status = status;
  if (fault_) {
    s.status = RunStatus::Fault;
    s.fault_message = fault_->message;
  }
  for (const auto& core : cores_) {
    s.instructions += core->instructions;
    s.lane_instructions += core->lane_instructions;
    s.instructions_per_core.push_back(core->instructions);
    s.ipc_per_core.push_back(
        cycles ? static_cast<double>(core->instructions) / cycles : 0.0);
    s.l1i.add(core->icache.stats);
    s.l1d.add(core->dcache.stats);
    s.shm_accesses += core->shm.accesses;
    s.shm_conflicts += core->shm.conflicts;
    s.tex.add(core->tex_unit.stats);
  }
  s.ipc_total = cycles ? static_cast<double>(s.instructions) / cycles : 0.0;
  s.lane_ipc = cycles ? static_cast<double>(s.lane_instructions) / cycles : 0.0;
  s.l2_enabled = cfg_.l2_enable;
  s.l3_enabled = cfg_.l3_enable;
  for (const auto& l2 : l2s_) s.l2.add(l2->stats);
  if (l3_) s.l3.add(l3_->stats);
  s.dram_reads = dram_->stats.reads;
  s.dram_writes = dram_->stats.writes;
  s.console = console_;
  s.config = config_dump(cfg_);
  return s;
}

}  // namespace gpusim
