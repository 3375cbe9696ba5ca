#include "cache.hpp"

#include <algorithm>
#include <cassert>

namespace gpusim {

void CacheStats::add(const CacheStats& o) {
  accesses += o.accesses;
  hits += o.hits;
  misses += o.misses;
  deferrals += o.deferrals;
  backpressure += o.backpressure;
  mem_requests += o.mem_requests;
  writebacks += o.writebacks;
  mshr_high_water = std::max(mshr_high_water, o.mshr_high_water);
  util_clean += o.util_clean;
  util_deferred += o.util_deferred;
}

CoalesceResult select_and_coalesce(std::span<const LaneRequest> lanes,
                                   const CacheConfig& cfg) {
  struct BankState {
    bool open = false;
    uint32_t line = 0;
    size_t issue_idx = 0;
    std::array<bool, 4> port_used{};
  };
  CoalesceResult out;
  std::vector<BankState> state(cfg.num_banks);
  for (size_t i = 0; i < lanes.size(); i++) {
    const LaneRequest& r = lanes[i];
    uint32_t line = r.addr & ~(cfg.line_size - 1);
    uint32_t bank = bank_index(r.addr, cfg);
    uint32_t port = r.lane % cfg.num_ports;
    BankState& st = state[bank];
    if (!st.open) {
      st.open = true;
      st.line = line;
      st.port_used[port] = true;
      st.issue_idx = out.issues.size();
      out.issues.push_back({bank, line, {i}});
    } else if (st.line == line && !st.port_used[port]) {
      st.port_used[port] = true;
      out.issues[st.issue_idx].lanes.push_back(i);
    } else {
      out.deferred.push_back(i);
    }
  }
  return out;
}

Cache::Cache(std::string name, const CacheConfig& cfg, uint32_t id)
    : name_(std::move(name)), cfg_(cfg), id_(id) {
  banks_.resize(cfg_.num_banks);
  uint32_t slots = cfg_.sets_per_bank() * cfg_.associativity;
  for (Bank& b : banks_) {
    b.mshr.resize(cfg_.mshr_entries);
    b.line_addr.assign(slots, 0);
    b.valid.assign(slots, false);
    b.dirty.assign(slots, false);
    b.lru.assign(slots, 0);
    b.data.assign(static_cast<size_t>(slots) * cfg_.line_size, 0);
  }
}

int Cache::find_way(const Bank& b, uint32_t line_addr) const {
  uint32_t set = set_of(line_addr);
  for (uint32_t w = 0; w < cfg_.associativity; w++) {
    uint32_t s = set * cfg_.associativity + w;
    if (b.valid[s] && b.line_addr[s] == line_addr) return static_cast<int>(w);
  }
  return -1;
}

Cache::MshrEntry* Cache::find_mshr(Bank& b, uint32_t line_addr) {
  for (MshrEntry& e : b.mshr)
    if (e.live && e.line_addr == line_addr) return &e;
  return nullptr;
}

const Cache::MshrEntry* Cache::find_mshr(const Bank& b,
                                         uint32_t line_addr) const {
  for (const MshrEntry& e : b.mshr)
    if (e.live && e.line_addr == line_addr) return &e;
  return nullptr;
}

int Cache::pick_victim(const Bank& b, uint32_t set) const {
  for (uint32_t w = 0; w < cfg_.associativity; w++)
    if (!b.valid[set * cfg_.associativity + w]) return static_cast<int>(w);
  int victim = -1;
  uint64_t best = UINT64_MAX;
  for (uint32_t w = 0; w < cfg_.associativity; w++) {
    uint32_t s = set * cfg_.associativity + w;
    if (find_mshr(b, b.line_addr[s])) continue;  // pinned
    if (b.lru[s] < best) {
      best = b.lru[s];
      victim = static_cast<int>(w);
    }
  }
  return victim;
}

bool Cache::fill_schedulable(const Bank& b, uint32_t line_addr) const {
  return pick_victim(b, set_of(line_addr)) >= 0;
}

bool Cache::memreq_headroom() const {
  return mem_requests.size() + memreq_reserved_ < cfg_.memreq_queue_depth;
}

void Cache::emit_memreq(LineRequest req) {
  req.seq = next_seq_++;
  req.line_size = cfg_.line_size;
  req.source = id_;
  if (req.is_write) stats.writebacks++;
  stats.mem_requests++;
  mem_requests.push_back(std::move(req));
}

bool Cache::can_accept(uint32_t bank) const {
  const Bank& b = banks_[bank];
  return b.input_q.size() < cfg_.input_queue_depth &&
         b.mshr_live + b.mshr_reserved < cfg_.mshr_entries &&
         memreq_headroom();
}

uint32_t Cache::submit_lanes(std::span<LaneRequest> lanes) {
  uint32_t accepted = 0;
  for (size_t i = 0; i < lanes.size(); i++) {
    LaneRequest& r = lanes[i];
    uint32_t line = r.addr & ~(cfg_.line_size - 1);
    uint32_t bank_id = bank_index(r.addr, cfg_);
    uint32_t port = r.lane % cfg_.num_ports;
    Bank& b = banks_[bank_id];

    bool conflict = false;
    bool joined = false;
    if (b.open) {
      // An access to this bank is already forming this cycle; join it only
      // on a same-line, same-instruction request whose port slot is free.
      if (b.open_line == line && b.open_store == r.is_store &&
          b.open_tag == r.tag && !b.port_used[port]) {
        joined = true;
      } else {
        conflict = true;
      }
    } else if (b.claimed) {
      conflict = true;  // bank granted to a line request this cycle
    }

    if (conflict) {
      stats.deferrals++;
      if (!r.was_deferred) {
        r.was_deferred = true;
        stats.util_deferred++;
      }
      continue;
    }
    if (!joined) {
      if (!can_accept(bank_id)) {
        stats.backpressure++;
        continue;  // full queues stall but are not bank conflicts
      }
      Access a;
      a.line_addr = line;
      a.is_store = r.is_store;
      a.tag = r.tag;
      a.seq = next_seq_++;
      b.input_q.push_back(std::move(a));
      b.open = true;
      b.claimed = true;
      b.open_line = line;
      b.open_store = r.is_store;
      b.open_tag = r.tag;
      b.port_used = {};
      b.mshr_reserved++;
      reserve_memreq();
    }
    Slot s;
    s.lane = r.lane;
    s.port = static_cast<uint8_t>(port);
    s.word_off = static_cast<uint16_t>((r.addr & (cfg_.line_size - 1)) & ~3u);
    s.is_store = r.is_store;
    s.store_data = r.store_data;
    s.byte_mask = r.byte_mask;
    s.addr = r.addr;
    b.port_used[port] = true;
    b.input_q.back().slots.push_back(s);
    if (!r.was_deferred) stats.util_clean++;
    accepted |= 1u << i;
  }
  return accepted;
}

bool Cache::submit_line(const LineRequest& req) {
  uint32_t bank_id = bank_index(req.addr, cfg_);
  Bank& b = banks_[bank_id];
  if (b.claimed || !can_accept(bank_id)) return false;
  Access a;
  a.line_addr = req.addr;
  a.is_store = req.is_write;
  a.full_line = true;
  a.line_data = req.data;
  a.source = req.source;
  a.tag.kind = req.is_write ? AccessKind::Store : AccessKind::Load;
  a.seq = next_seq_++;
  b.input_q.push_back(std::move(a));
  b.claimed = true;
  b.mshr_reserved++;
  reserve_memreq();
  if (req.is_write) line_stores_in_flight_++;
  return true;
}

std::optional<uint32_t> Cache::probe_word(uint32_t addr, uint64_t now) {
  uint32_t line = addr & ~(cfg_.line_size - 1);
  Bank& b = banks_[bank_of(addr)];
  if (find_mshr(b, line)) return std::nullopt;  // ordered behind misses
  int way = find_way(b, line);
  if (way < 0) return std::nullopt;
  uint32_t s = way_slot(0, set_of(line), static_cast<uint32_t>(way));
  b.lru[s] = now;
  stats.accesses++;
  stats.hits++;
  const uint8_t* p = &b.data[static_cast<size_t>(s) * cfg_.line_size +
                             (addr & (cfg_.line_size - 1) & ~3u)];
  stats.util_clean++;
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

void Cache::stage_tag(Bank& b, PipeOp& op, uint64_t now) {
  (void)now;
  if (op.src == PipeSrc::Fill) {
    int victim = pick_victim(b, set_of(op.fill.addr));
    assert(victim >= 0 && "fill scheduled without an unpinned victim");
    op.way = static_cast<uint32_t>(victim);
    op.hit = false;
    return;
  }
  Access& a = op.access;
  if (op.src == PipeSrc::CoreReq) {
    if (MshrEntry* e = find_mshr(b, a.line_addr)) {
      // Older misses to this line are still pending; merge here, at the
      // stage that checked liveness, so ordering cannot slip.
      stats.accesses++;
      stats.misses++;
      e->pending.push_back(std::move(a));
      b.mshr_reserved--;
      release_memreq();
      op.consumed = true;
      return;
    }
  }
  int way = find_way(b, a.line_addr);
  op.hit = way >= 0;
  if (op.hit) {
    op.way = static_cast<uint32_t>(way);
  } else if (a.full_line && a.is_store) {
    // Whole-line store allocates in place when an unpinned victim exists;
    // otherwise it takes the ordinary MSHR path.
    int victim = pick_victim(b, set_of(a.line_addr));
    op.way = victim >= 0 ? static_cast<uint32_t>(victim) : UINT32_MAX;
  }
  if (op.src == PipeSrc::Replay) assert(op.hit && "replay must hit");
  if (op.src == PipeSrc::CoreReq) {
    stats.accesses++;
    if (op.hit) stats.hits++; else stats.misses++;
  }
}

void Cache::stage_data(Bank& b, PipeOp& op, uint64_t now) {
  if (op.consumed) return;
  auto line_ptr = [&](uint32_t set, uint32_t way) {
    return &b.data[static_cast<size_t>(set * cfg_.associativity + way) *
                   cfg_.line_size];
  };
  if (op.src == PipeSrc::Fill) {
    uint32_t set = set_of(op.fill.addr);
    uint32_t s = set * cfg_.associativity + op.way;
    if (b.valid[s] && b.dirty[s]) {
      op.evict = true;
      op.evict_addr = b.line_addr[s];
      op.evict_data.assign(line_ptr(set, op.way),
                           line_ptr(set, op.way) + cfg_.line_size);
    }
    std::copy(op.fill.data.begin(), op.fill.data.end(), line_ptr(set, op.way));
    b.line_addr[s] = op.fill.addr;
    b.valid[s] = true;
    b.dirty[s] = false;
    b.lru[s] = now;
    return;
  }
  Access& a = op.access;
  uint32_t set = set_of(a.line_addr);
  if (op.hit) {
    uint32_t s = set * cfg_.associativity + op.way;
    uint8_t* line = line_ptr(set, op.way);
    if (a.full_line) {
      if (a.is_store) {
        std::copy(a.line_data.begin(), a.line_data.end(), line);
        b.dirty[s] = true;
        line_stores_in_flight_--;
      } else {
        a.line_data.assign(line, line + cfg_.line_size);
      }
    } else {
      // One full-block data access serves every occupied port.
      for (Slot& sl : a.slots) {
        uint8_t* w = line + sl.word_off;
        if (sl.is_store) {
          for (int i = 0; i < 4; i++)
            if (sl.byte_mask & (1 << i))
              w[i] = static_cast<uint8_t>(sl.store_data >> (8 * i));
          b.dirty[s] = true;
        }
        sl.value = static_cast<uint32_t>(w[0]) |
                   (static_cast<uint32_t>(w[1]) << 8) |
                   (static_cast<uint32_t>(w[2]) << 16) |
                   (static_cast<uint32_t>(w[3]) << 24);
      }
    }
    b.lru[s] = now;
    return;
  }
  if (a.full_line && a.is_store && op.way != UINT32_MAX) {
    // Allocate on whole-line store miss without fetching the old line.
    uint32_t s = set * cfg_.associativity + op.way;
    if (b.valid[s] && b.dirty[s]) {
      op.evict = true;
      op.evict_addr = b.line_addr[s];
      op.evict_data.assign(line_ptr(set, op.way),
                           line_ptr(set, op.way) + cfg_.line_size);
    }
    std::copy(a.line_data.begin(), a.line_data.end(), line_ptr(set, op.way));
    b.line_addr[s] = a.line_addr;
    b.valid[s] = true;
    b.dirty[s] = true;
    b.lru[s] = now;
    op.alloc_done = true;
    line_stores_in_flight_--;
  }
}

void Cache::respond_access(Access& a, const uint8_t*) {
  if (a.full_line) {
    if (!a.is_store)
      line_responses.push_back({a.source, {a.line_addr, std::move(a.line_data)}});
    return;
  }
  for (const Slot& sl : a.slots) {
    CoreResponse r;
    r.tag = a.tag;
    r.lane = sl.lane;
    r.addr = sl.addr;
    r.is_store = sl.is_store;
    r.value = sl.value.value_or(0);
    core_responses.push_back(r);
  }
}

void Cache::stage_response(Bank& b, PipeOp& op, uint64_t now) {
  (void)now;
  if (op.src == PipeSrc::Fill) {
    b.fill_in_pipe = false;
    MshrEntry* e = find_mshr(b, op.fill.addr);
    assert(e && "fill without a matching MSHR entry");
    if (e) e->filled = true;
    if (op.evict) {
      release_memreq();
      emit_memreq({op.evict_addr, true, std::move(op.evict_data),
                   cfg_.line_size, id_, 0});
    } else {
      release_memreq();
    }
    return;
  }
  if (op.consumed) return;
  Access& a = op.access;
  if (op.hit || op.alloc_done) {
    if (op.src == PipeSrc::CoreReq) {
      b.mshr_reserved--;
      if (op.evict) {
        release_memreq();
        emit_memreq({op.evict_addr, true, std::move(op.evict_data),
                     cfg_.line_size, id_, 0});
      } else {
        release_memreq();
      }
    } else if (op.src == PipeSrc::Replay) {
      MshrEntry* e = find_mshr(b, a.line_addr);
      assert(e && "replay without its MSHR entry");
      if (e) {
        e->in_pipe--;
        if (e->in_pipe == 0 && e->pending.empty()) {
          e->live = false;
          b.mshr_live--;
        }
      }
    }
    respond_access(a, nullptr);
    return;
  }
  // Miss path: merge into the line's MSHR entry or open a new one and
  // request the line from the next level.
  assert(op.src == PipeSrc::CoreReq);
  b.mshr_reserved--;
  MshrEntry* e = find_mshr(b, a.line_addr);
  if (e) {
    e->pending.push_back(std::move(a));
    release_memreq();
    return;
  }
  MshrEntry* free_e = nullptr;
  for (MshrEntry& m : b.mshr)
    if (!m.live) { free_e = &m; break; }
  assert(free_e && "MSHR reservation guaranteed a free entry");
  free_e->live = true;
  free_e->line_addr = a.line_addr;
  free_e->filled = false;
  free_e->pending.clear();
  uint32_t line_addr = a.line_addr;
  free_e->pending.push_back(std::move(a));
  b.mshr_live++;
  stats.mshr_high_water = std::max<uint64_t>(stats.mshr_high_water, b.mshr_live);
  release_memreq();
  emit_memreq({line_addr, false, {}, cfg_.line_size, id_, 0});
}

void Cache::cycle(uint64_t now) {
  for (Bank& b : banks_) {
    b.open = false;
    b.claimed = false;
    b.port_used = {};
  }
  if (flushing_) run_flush(now);
  for (Bank& b : banks_) {
    if (b.stage[3]) {
      stage_response(b, *b.stage[3], now);
      b.stage[3].reset();
    }
    if (b.stage[2] && !b.stage[3]) {
      stage_data(b, *b.stage[2], now);
      b.stage[3] = std::move(b.stage[2]);
      b.stage[2].reset();
    }
    if (b.stage[1] && !b.stage[2]) {
      stage_tag(b, *b.stage[1], now);
      b.stage[2] = std::move(b.stage[1]);
      b.stage[1].reset();
    }
    if (b.stage[0] && !b.stage[1]) {
      b.stage[1] = std::move(b.stage[0]);
      b.stage[0].reset();
    }
    if (!b.stage[0]) {
      // Schedule priority: MSHR replay, then memory fill, then core input.
      bool scheduled = false;
      for (MshrEntry& e : b.mshr) {
        if (e.live && e.filled && !e.pending.empty()) {
          PipeOp op;
          op.src = PipeSrc::Replay;
          op.access = std::move(e.pending.front());
          e.pending.pop_front();
          // The entry stays live until this replay has applied, so younger
          // requests keep merging behind it instead of overtaking it.
          e.in_pipe++;
          b.stage[0] = std::move(op);
          scheduled = true;
          break;
        }
      }
      if (!scheduled && !b.fill_q.empty() && !b.fill_in_pipe &&
          memreq_headroom() && fill_schedulable(b, b.fill_q.front().addr)) {
        PipeOp op;
        op.src = PipeSrc::Fill;
        op.fill = std::move(b.fill_q.front());
        b.fill_q.pop_front();
        reserve_memreq();
        b.fill_in_pipe = true;
        b.stage[0] = std::move(op);
        scheduled = true;
      }
      if (!scheduled && !b.input_q.empty()) {
        PipeOp op;
        op.src = PipeSrc::CoreReq;
        op.access = std::move(b.input_q.front());
        b.input_q.pop_front();
        b.stage[0] = std::move(op);
      }
    }
  }
}

void Cache::run_flush(uint64_t now) {
  (void)now;
  uint32_t slots = cfg_.sets_per_bank() * cfg_.associativity;
  uint32_t total = slots * cfg_.num_banks;
  uint32_t done_this_cycle = 0;
  while (flush_cursor_ < total && done_this_cycle < cfg_.num_banks) {
    Bank& b = banks_[flush_cursor_ / slots];
    uint32_t s = flush_cursor_ % slots;
    if (b.valid[s] && b.dirty[s]) {
      if (!memreq_headroom()) return;  // resume next cycle
      std::vector<uint8_t> data(
          b.data.begin() + static_cast<size_t>(s) * cfg_.line_size,
          b.data.begin() + static_cast<size_t>(s + 1) * cfg_.line_size);
      emit_memreq({b.line_addr[s], true, std::move(data), cfg_.line_size,
                   id_, 0});
      done_this_cycle++;
    }
    b.valid[s] = false;
    b.dirty[s] = false;
    flush_cursor_++;
  }
  if (flush_cursor_ >= total) flushing_ = false;
}

void Cache::flush_begin() {
  flushing_ = true;
  flush_cursor_ = 0;
}

bool Cache::fill_can_accept(uint32_t addr) const {
  return banks_[bank_of(addr)].fill_q.size() < cfg_.fill_queue_depth;
}

void Cache::deliver_fill(LineResponse&& resp) {
  banks_[bank_of(resp.addr)].fill_q.push_back(std::move(resp));
}

bool Cache::banks_idle() const {
  for (const Bank& b : banks_) {
    if (!b.input_q.empty() || !b.fill_q.empty() || b.mshr_live > 0)
      return false;
    for (const auto& s : b.stage)
      if (s) return false;
  }
  return true;
}

bool Cache::idle() const {
  return banks_idle() && mem_requests.empty() && !flushing_;
}

uint64_t Cache::pending_write_requests() const {
  uint64_t n = line_stores_in_flight_;
  for (const LineRequest& r : mem_requests)
    if (r.is_write) n++;
  return n;
}

bool Cache::line_present(uint32_t addr) const {
  uint32_t line = addr & ~(cfg_.line_size - 1);
  return find_way(banks_[bank_of(addr)], line) >= 0;
}

bool Cache::line_dirty(uint32_t addr) const {
  uint32_t line = addr & ~(cfg_.line_size - 1);
  const Bank& b = banks_[bank_of(addr)];
  int way = find_way(b, line);
  if (way < 0) return false;
  return b.dirty[set_of(line) * cfg_.associativity + way];
}

uint64_t Cache::mshr_live(uint32_t bank) const {
  return banks_[bank].mshr_live;
}

SharedMemory::SharedMemory(uint32_t base, uint32_t size, uint32_t num_banks)
    : base_(base), num_banks_(num_banks), data_(size, 0),
      bank_claimed_(num_banks, false) {}

uint32_t SharedMemory::submit_lanes(std::span<LaneRequest> lanes) {
  uint32_t accepted = 0;
  for (size_t i = 0; i < lanes.size(); i++) {
    LaneRequest& r = lanes[i];
    uint32_t bank = (r.addr / 4) % num_banks_;
    if (bank_claimed_[bank]) {
      conflicts++;
      continue;
    }
    bank_claimed_[bank] = true;
    accesses++;
    uint32_t off = (r.addr - base_) & ~3u;
    uint8_t* w = &data_[off];
    if (r.is_store) {
      for (int k = 0; k < 4; k++)
        if (r.byte_mask & (1 << k))
          w[k] = static_cast<uint8_t>(r.store_data >> (8 * k));
    }
    CoreResponse resp;
    resp.tag = r.tag;
    resp.lane = r.lane;
    resp.addr = r.addr;
    resp.is_store = r.is_store;
    resp.value = static_cast<uint32_t>(w[0]) |
                 (static_cast<uint32_t>(w[1]) << 8) |
                 (static_cast<uint32_t>(w[2]) << 16) |
                 (static_cast<uint32_t>(w[3]) << 24);
    staging_.push_back(resp);
    accepted |= 1u << i;
  }
  return accepted;
}

void SharedMemory::cycle(uint64_t) {
  std::fill(bank_claimed_.begin(), bank_claimed_.end(), false);
  while (!staging_.empty()) {
    responses.push_back(staging_.front());
    staging_.pop_front();
  }
}

}  // namespace gpusim
