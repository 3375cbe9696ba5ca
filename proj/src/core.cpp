#include "core.hpp"

#include <bit>
#include <cassert>
#include <cfenv>
#include <cmath>
#include <cstring>

#include "processor.hpp"

namespace gpusim {

namespace {

float as_float(uint32_t v) { return std::bit_cast<float>(v); }
uint32_t as_bits(float f) { return std::bit_cast<uint32_t>(f); }

uint32_t cvt_w_s(float f) {
  if (std::isnan(f)) return 0x7FFFFFFFu;
  double d = std::nearbyint(static_cast<double>(f));
  if (d >= 2147483648.0) return 0x7FFFFFFFu;
  if (d <= -2147483649.0) return 0x80000000u;
  return static_cast<uint32_t>(static_cast<int64_t>(d));
}

uint32_t cvt_wu_s(float f) {
  if (std::isnan(f)) return 0xFFFFFFFFu;
  double d = std::nearbyint(static_cast<double>(f));
  if (d <= -1.0) return 0;
  if (d < 0.0) return 0;
  if (d >= 4294967296.0) return 0xFFFFFFFFu;
  return static_cast<uint32_t>(static_cast<uint64_t>(d));
}

}  // namespace

std::optional<uint32_t> schedule_next(SchedulerMasks& m) {
  if (m.visible == 0) {
    m.visible = m.active & ~m.stalled & ~m.barrier_stalled;
    if (m.visible == 0) return std::nullopt;
  }
  uint32_t wid = static_cast<uint32_t>(std::countr_zero(m.visible));
  m.visible &= ~(1u << wid);
  return wid;
}

Core::Core(const ProcessorConfig& cfg, uint8_t id, Processor* proc)
    : icache("core" + std::to_string(id) + ".l1i",
             [&] {
               CacheConfig c = cfg.icache;
               c.num_ports = 1;  // one fetch per cycle needs no extra ports
               return c;
             }(),
             2u * id),
      dcache("core" + std::to_string(id) + ".l1d", cfg.dcache, 2u * id + 1),
      shm(cfg.shm_base, cfg.shm_size, cfg.num_threads),
      tex_unit(cfg, id),
      cfg_(cfg),
      id_(id),
      proc_(proc) {
  local_barriers.entries.resize(cfg.num_barriers);
  wavefronts.resize(cfg.num_wavefronts);
}

void Core::reset(uint32_t entry_pc) {
  masks = {};
  masks.active = 1;
  loads_.clear();
  in_flight_stores_ = 0;
  fence_stage_ = FenceStage::None;
  instructions = 0;
  lane_instructions = 0;
  idle_cycles = 0;
  local_barriers.entries.assign(cfg_.num_barriers, {});
  uint32_t ram_top = cfg_.ram_base + cfg_.ram_size;
  for (uint32_t widx = 0; widx < cfg_.num_wavefronts; widx++) {
    Wavefront& w = wavefronts[widx];
    w = Wavefront{};
    w.pc = entry_pc;
    w.tmask = widx == 0 ? 1 : 0;
    w.iregs.assign(cfg_.num_threads, {});
    w.fregs.assign(cfg_.num_threads, {});
    for (uint32_t t = 0; t < cfg_.num_threads; t++) {
      uint32_t idx = (id_ * cfg_.num_wavefronts + widx) * cfg_.num_threads + t;
      w.iregs[t][2] = ram_top - idx * cfg_.stack_size;  // sp
    }
  }
}

uint32_t Core::first_active_lane(uint32_t tmask) const {
  return static_cast<uint32_t>(std::countr_zero(tmask));
}

uint32_t Core::read_ireg(uint32_t wid, uint32_t lane, uint8_t r) const {
  return wavefronts[wid].iregs[lane][r];
}

void Core::write_ireg(uint32_t wid, uint32_t lane, uint8_t r, uint32_t v) {
  if (r != 0) wavefronts[wid].iregs[lane][r] = v;
}

void Core::set_stalled(uint32_t wid, bool on) {
  uint32_t bit = 1u << wid;
  if (on) {
    masks.stalled |= bit;
    masks.visible &= ~bit;
  } else {
    masks.stalled &= ~bit;
  }
}

void Core::set_barrier_stalled(uint32_t wid, bool on) {
  uint32_t bit = 1u << wid;
  if (on) {
    masks.barrier_stalled |= bit;
    masks.visible &= ~bit;
  } else {
    masks.barrier_stalled &= ~bit;
  }
}

void Core::deactivate(uint32_t wid) {
  uint32_t bit = 1u << wid;
  masks.active &= ~bit;
  masks.visible &= ~bit;
  masks.stalled &= ~bit;
  masks.barrier_stalled &= ~bit;
}

void Core::activate(uint32_t wid) {
  masks.active |= 1u << wid;
}

void Core::scoreboard_insert(Wavefront& w, bool fp, uint8_t reg, bool event,
                             uint64_t release) {
  if (!fp && reg == 0) return;
  w.scoreboard.push_back({fp, reg, event, release});
}

void Core::scoreboard_release(Wavefront& w, bool fp, uint8_t reg) {
  for (size_t i = 0; i < w.scoreboard.size(); i++) {
    if (w.scoreboard[i].fp == fp && w.scoreboard[i].reg == reg &&
        w.scoreboard[i].event) {
      w.scoreboard.erase(w.scoreboard.begin() + i);
      return;
    }
  }
}

bool Core::scoreboard_blocked(const Wavefront& w,
                              const Instruction& in) const {
  if (w.scoreboard.empty()) return false;
  struct Ref { bool fp; uint8_t reg; };
  Ref refs[4];
  int n = 0;
  switch (in.kind) {
    case InstrKind::BaseAlu:
      if (in.op == Op::Lui || in.op == Op::Auipc) {
        refs[n++] = {false, in.rd};
      } else if (in.op == Op::Fence) {
        // ordered by the drain state machine instead
      } else {
        refs[n++] = {false, in.rd};
        refs[n++] = {false, in.rs1};
        if (static_cast<int>(in.op) >= static_cast<int>(Op::Add))
          refs[n++] = {false, in.rs2};
      }
      break;
    case InstrKind::MulDiv:
      refs[n++] = {false, in.rd};
      refs[n++] = {false, in.rs1};
      refs[n++] = {false, in.rs2};
      break;
    case InstrKind::Jump:
      refs[n++] = {false, in.rd};
      if (in.op == Op::Jalr) refs[n++] = {false, in.rs1};
      break;
    case InstrKind::Branch:
      refs[n++] = {false, in.rs1};
      refs[n++] = {false, in.rs2};
      break;
    case InstrKind::Load:
      refs[n++] = {in.op == Op::Flw, in.rd};
      refs[n++] = {false, in.rs1};
      break;
    case InstrKind::Store:
      refs[n++] = {false, in.rs1};
      refs[n++] = {in.op == Op::Fsw, in.rs2};
      break;
    case InstrKind::Csr:
      refs[n++] = {false, in.rd};
      if (in.op == Op::Csrrw || in.op == Op::Csrrs || in.op == Op::Csrrc)
        refs[n++] = {false, in.rs1};
      break;
    case InstrKind::Fp:
      refs[n++] = {writes_freg(in.op), in.rd};
      refs[n++] = {reads_freg_rs1(in.op), in.rs1};
      if (reads_freg_rs2(in.op) || in.op == Op::FmaddS || in.op == Op::FmsubS)
        refs[n++] = {true, in.rs2};
      if (in.op == Op::FmaddS || in.op == Op::FmsubS)
        refs[n++] = {true, in.rs3};
      break;
    case InstrKind::Ext:
      switch (in.op) {
        case Op::Wspawn:
        case Op::Bar:
          refs[n++] = {false, in.rs1};
          refs[n++] = {false, in.rs2};
          break;
        case Op::Tmc:
        case Op::Split:
          refs[n++] = {false, in.rs1};
          break;
        case Op::Tex:
          refs[n++] = {false, in.rd};
          refs[n++] = {false, in.rs1};
          refs[n++] = {false, in.rs2};
          refs[n++] = {false, in.rs3};
          break;
        default:
          break;
      }
      break;
  }
  for (const auto& e : w.scoreboard)
    for (int i = 0; i < n; i++)
      if (e.fp == refs[i].fp && e.reg == refs[i].reg &&
          (refs[i].fp || refs[i].reg != 0))
        return true;
  return false;
}

uint32_t Core::latency_of(const Instruction& in) const {
  switch (in.kind) {
    case InstrKind::MulDiv:
      return in.op == Op::Div || in.op == Op::Divu || in.op == Op::Rem ||
                     in.op == Op::Remu
                 ? cfg_.lat_div
                 : cfg_.lat_mul;
    case InstrKind::Fp:
      if (in.op == Op::FdivS) return cfg_.lat_div;
      if (in.op == Op::FsqrtS) return cfg_.lat_fsqrt;
      return cfg_.lat_fp;
    default:
      return cfg_.lat_alu;
  }
}

void Core::exec_wspawn(uint32_t count, uint32_t target_pc,
                       uint32_t issuer_wid) {
  count = std::min(count, cfg_.num_wavefronts);
  uint32_t remaining = count > 0 ? count - 1 : 0;
  for (uint32_t wid = 0; wid < cfg_.num_wavefronts && remaining > 0; wid++) {
    if (wid == issuer_wid || (masks.active & (1u << wid))) continue;
    Wavefront& w = wavefronts[wid];
    w.pc = target_pc;
    w.tmask = 1;
    w.ipdom.clear();
    w.scoreboard.clear();
    w.pending_dcache.clear();
    w.pending_shm.clear();
    w.pending_ifetch.reset();
    w.fetch_valid = false;
    w.fetch_pending = false;
    w.generation++;
    for (size_t i = 0; i < loads_.size();) {
      if (loads_[i].wid == wid)
        loads_.erase(loads_.begin() + i);
      else
        i++;
    }
    activate(wid);
    remaining--;
  }
}

void Core::exec_tmc(uint32_t wid, uint32_t count) {
  Wavefront& w = wavefronts[wid];
  uint32_t n = std::min(count, cfg_.num_threads);
  w.tmask = n == 0 ? 0 : (1u << n) - 1;
  if (w.tmask == 0) deactivate(wid);
}

bool Core::exec_split(uint32_t wid, uint32_t pred_mask) {
  Wavefront& w = wavefronts[wid];
  uint32_t t_side = w.tmask & pred_mask;
  uint32_t f_side = w.tmask & ~pred_mask;
  uint32_t depth = cfg_.effective_ipdom_depth();
  if (t_side != 0 && f_side != 0) {
    if (w.ipdom.size() + 2 > depth) return false;
    w.ipdom.push_back({w.tmask, std::nullopt});
    w.ipdom.push_back({f_side, w.pc + 4});
    w.tmask = t_side;
  } else {
    if (w.ipdom.size() + 1 > depth) return false;
    w.ipdom.push_back({w.tmask, std::nullopt});
  }
  return true;
}

std::optional<std::optional<uint32_t>> Core::exec_join(uint32_t wid) {
  Wavefront& w = wavefronts[wid];
  if (w.ipdom.empty()) return std::nullopt;
  IpdomEntry e = w.ipdom.back();
  w.ipdom.pop_back();
  w.tmask = e.saved_tmask;
  return std::optional<std::optional<uint32_t>>(e.target_pc);
}

void Core::finish_load(LoadTracker& t) {
  Wavefront& w = wavefronts[t.wid];
  if (t.generation != w.generation) return;
  for (uint32_t lane = 0; lane < cfg_.num_threads; lane++) {
    if (!(t.expected & (1u << lane))) continue;
    uint32_t word = t.lane_word[lane];
    uint32_t addr = t.lane_addr[lane];
    uint32_t v = 0;
    switch (t.op) {
      case Op::Lw:
      case Op::Flw:
        v = word;
        break;
      case Op::Lb: {
        uint32_t b = (word >> (8 * (addr & 3))) & 0xFF;
        v = static_cast<uint32_t>(static_cast<int32_t>(static_cast<int8_t>(b)));
        break;
      }
      case Op::Lbu:
        v = (word >> (8 * (addr & 3))) & 0xFF;
        break;
      case Op::Lh: {
        uint32_t h = (word >> (8 * (addr & 2))) & 0xFFFF;
        v = static_cast<uint32_t>(
            static_cast<int32_t>(static_cast<int16_t>(h)));
        break;
      }
      case Op::Lhu:
        v = (word >> (8 * (addr & 2))) & 0xFFFF;
        break;
      default:
        break;
    }
    if (t.fp)
      w.fregs[lane][t.rd] = v;
    else
      write_ireg(t.wid, lane, t.rd, v);
  }
  scoreboard_release(w, t.fp, t.rd);
}

void Core::handle_response(const CoreResponse& r) {
  switch (r.tag.kind) {
    case AccessKind::Ifetch: {
      Wavefront& w = wavefronts[r.tag.wavefront];
      if (w.fetch_pending && r.addr == w.pc) {
        w.fetch_valid = true;
        w.fetch_pc = r.addr;
        w.fetch_word = r.value;
        w.fetch_pending = false;
        if (w.pending_dcache.empty() && w.pending_shm.empty() &&
            fence_stage_ == FenceStage::None)
          set_stalled(r.tag.wavefront, false);
      }
      break;
    }
    case AccessKind::Load: {
      for (size_t i = 0; i < loads_.size(); i++) {
        LoadTracker& t = loads_[i];
        if (t.wid != r.tag.wavefront || t.pc != r.tag.pc) continue;
        if (!(t.expected & (1u << r.lane)) || (t.got & (1u << r.lane)))
          continue;
        t.got |= 1u << r.lane;
        t.lane_word[r.lane] = r.value;
        if (t.got == t.expected) {
          finish_load(t);
          loads_.erase(loads_.begin() + i);
        }
        return;
      }
      break;  // stale response from a respawned wavefront
    }
    case AccessKind::Store:
      if (in_flight_stores_ > 0) in_flight_stores_--;
      break;
    case AccessKind::Texel:
      tex_unit.on_texel_response(r);
      break;
  }
}

void Core::commit_phase(uint64_t now) {
  for (Wavefront& w : wavefronts) {
    for (size_t i = 0; i < w.scoreboard.size();) {
      if (!w.scoreboard[i].event && w.scoreboard[i].release_cycle <= now)
        w.scoreboard.erase(w.scoreboard.begin() + i);
      else
        i++;
    }
  }
  while (!icache.core_responses.empty()) {
    handle_response(icache.core_responses.front());
    icache.core_responses.pop_front();
  }
  while (!dcache.core_responses.empty()) {
    handle_response(dcache.core_responses.front());
    dcache.core_responses.pop_front();
  }
  while (!shm.responses.empty()) {
    handle_response(shm.responses.front());
    shm.responses.pop_front();
  }
  while (!tex_unit.completions.empty()) {
    const TextureUnit::Completion& c = tex_unit.completions.front();
    Wavefront& w = wavefronts[c.wid];
    if (c.generation == w.generation) {
      for (uint32_t lane = 0; lane < cfg_.num_threads; lane++)
        if (c.tmask & (1u << lane)) write_ireg(c.wid, lane, c.rd, c.values[lane]);
      scoreboard_release(w, false, c.rd);
    }
    tex_unit.completions.pop_front();
  }

  if (fence_stage_ == FenceStage::Drain) {
    bool drained = loads_.empty() && in_flight_stores_ == 0 &&
                   tex_unit.idle();
    for (const Wavefront& w : wavefronts)
      if (!w.pending_dcache.empty() || !w.pending_shm.empty())
        drained = false;
    if (drained) {
      dcache.flush_begin();
      fence_stage_ = FenceStage::Flush;
    }
  }
  if (fence_stage_ == FenceStage::Flush && !dcache.flush_active())
    fence_stage_ = FenceStage::WaitMem;
  if (fence_stage_ == FenceStage::WaitMem && dcache.mem_requests.empty() &&
      proc_->writes_in_flight() == 0) {
    fence_stage_ = FenceStage::None;
    set_stalled(fence_wid_, false);
  }
}

void Core::replay_memory(uint32_t wid) {
  Wavefront& w = wavefronts[wid];
  if (w.pending_ifetch) {
    LaneRequest r = *w.pending_ifetch;
    if (icache.submit_lanes({&r, 1}) & 1u)
      w.pending_ifetch.reset();
    else
      *w.pending_ifetch = r;  // keep deferral marking
  }
  if (!w.pending_dcache.empty()) {
    uint32_t accepted = dcache.submit_lanes(w.pending_dcache);
    for (int i = static_cast<int>(w.pending_dcache.size()) - 1; i >= 0; i--)
      if (accepted & (1u << i))
        w.pending_dcache.erase(w.pending_dcache.begin() + i);
  }
  if (!w.pending_shm.empty()) {
    uint32_t accepted = shm.submit_lanes(w.pending_shm);
    for (int i = static_cast<int>(w.pending_shm.size()) - 1; i >= 0; i--)
      if (accepted & (1u << i))
        w.pending_shm.erase(w.pending_shm.begin() + i);
  }
  if ((masks.stalled & (1u << wid)) && w.pending_dcache.empty() &&
      w.pending_shm.empty() && !w.fetch_pending &&
      !(fence_stage_ != FenceStage::None && fence_wid_ == wid))
    set_stalled(wid, false);
}

void Core::issue_phase(uint64_t now) {
  for (uint32_t wid = 0; wid < cfg_.num_wavefronts; wid++)
    replay_memory(wid);
  tex_unit.cycle(now, dcache);
  std::optional<uint32_t> wid = schedule_next(masks);
  if (!wid) {
    idle_cycles++;
    return;
  }
  issue_and_execute(*wid, now);
}

void Core::tick_memories(uint64_t now) {
  icache.cycle(now);
  dcache.cycle(now);
  shm.cycle(now);
}

bool Core::mem_idle() const {
  if (!loads_.empty() || in_flight_stores_ != 0 || !tex_unit.idle())
    return false;
  for (const Wavefront& w : wavefronts)
    if (!w.pending_dcache.empty() || !w.pending_shm.empty() ||
        w.pending_ifetch)
      return false;
  return true;
}

void Core::issue_and_execute(uint32_t wid, uint64_t now) {
  Wavefront& w = wavefronts[wid];
  if (!w.fetch_valid || w.fetch_pc != w.pc) {
    if (w.pc % 4 != 0) {
      proc_->raise_fault({"misaligned instruction fetch", w.pc, id_, wid});
      return;
    }
    auto word = icache.probe_word(w.pc, now);
    if (!word) {
      LaneRequest r;
      r.lane = 0;
      r.addr = w.pc;
      r.tag = {w.pc, static_cast<uint8_t>(wid), id_, AccessKind::Ifetch};
      w.fetch_pending = true;
      set_stalled(wid, true);
      if (!(icache.submit_lanes({&r, 1}) & 1u)) w.pending_ifetch = r;
      return;
    }
    w.fetch_valid = true;
    w.fetch_pc = w.pc;
    w.fetch_word = *word;
  }
  auto decoded = decode(w.fetch_word);
  if (!decoded) {
    proc_->raise_fault({"illegal instruction", w.pc, id_, wid});
    return;
  }
  const Instruction& in = *decoded;
  if (scoreboard_blocked(w, in)) return;  // re-schedule without issuing
  bool is_mem = in.kind == InstrKind::Load || in.kind == InstrKind::Store;
  if (fence_stage_ != FenceStage::None &&
      (is_mem || in.op == Op::Tex || in.op == Op::Fence))
    return;
  if (in.op == Op::Tex && !tex_unit.can_submit()) return;

  proc_->emit_trace({now, id_, static_cast<uint8_t>(wid), w.pc, w.tmask, in});
  instructions++;
  lane_instructions += std::popcount(w.tmask);
  execute(wid, in, now);
}

void Core::execute(uint32_t wid, const Instruction& in, uint64_t now) {
  Wavefront& w = wavefronts[wid];
  uint32_t next_pc = w.pc + 4;
  const uint32_t lead = first_active_lane(w.tmask);

  switch (in.kind) {
    case InstrKind::BaseAlu: {
      if (in.op == Op::Fence) {
        fence_stage_ = FenceStage::Drain;
        fence_wid_ = wid;
        set_stalled(wid, true);
        break;
      }
      for (uint32_t lane = 0; lane < cfg_.num_threads; lane++) {
        if (!(w.tmask & (1u << lane))) continue;
        uint32_t a = w.iregs[lane][in.rs1];
        uint32_t b = w.iregs[lane][in.rs2];
        uint32_t immu = static_cast<uint32_t>(in.imm);
        uint32_t v = 0;
        switch (in.op) {
          case Op::Lui: v = immu; break;
          case Op::Auipc: v = w.pc + immu; break;
          case Op::Addi: v = a + immu; break;
          case Op::Slti:
            v = static_cast<int32_t>(a) < in.imm ? 1 : 0;
            break;
          case Op::Sltiu: v = a < immu ? 1 : 0; break;
          case Op::Xori: v = a ^ immu; break;
          case Op::Ori: v = a | immu; break;
          case Op::Andi: v = a & immu; break;
          case Op::Slli: v = a << (in.imm & 31); break;
          case Op::Srli: v = a >> (in.imm & 31); break;
          case Op::Srai:
            v = static_cast<uint32_t>(static_cast<int32_t>(a) >>
                                      (in.imm & 31));
            break;
          case Op::Add: v = a + b; break;
          case Op::Sub: v = a - b; break;
          case Op::Sll: v = a << (b & 31); break;
          case Op::Slt:
            v = static_cast<int32_t>(a) < static_cast<int32_t>(b) ? 1 : 0;
            break;
          case Op::Sltu: v = a < b ? 1 : 0; break;
          case Op::Xor: v = a ^ b; break;
          case Op::Srl: v = a >> (b & 31); break;
          case Op::Sra:
            v = static_cast<uint32_t>(static_cast<int32_t>(a) >> (b & 31));
            break;
          case Op::Or: v = a | b; break;
          case Op::And: v = a & b; break;
          default: break;
        }
        write_ireg(wid, lane, in.rd, v);
      }
      break;
    }
    case InstrKind::MulDiv: {
      for (uint32_t lane = 0; lane < cfg_.num_threads; lane++) {
        if (!(w.tmask & (1u << lane))) continue;
        uint32_t a = w.iregs[lane][in.rs1];
        uint32_t b = w.iregs[lane][in.rs2];
        int32_t sa = static_cast<int32_t>(a), sb = static_cast<int32_t>(b);
        uint32_t v = 0;
        switch (in.op) {
          case Op::Mul:
            v = static_cast<uint32_t>(
                static_cast<int64_t>(sa) * static_cast<int64_t>(sb));
            break;
          case Op::Mulh:
            v = static_cast<uint32_t>(
                (static_cast<int64_t>(sa) * static_cast<int64_t>(sb)) >> 32);
            break;
          case Op::Mulhsu:
            v = static_cast<uint32_t>(
                (static_cast<int64_t>(sa) * static_cast<uint64_t>(b)) >> 32);
            break;
          case Op::Mulhu:
            v = static_cast<uint32_t>(
                (static_cast<uint64_t>(a) * static_cast<uint64_t>(b)) >> 32);
            break;
          case Op::Div:
            if (b == 0) v = 0xFFFFFFFFu;
            else if (a == 0x80000000u && b == 0xFFFFFFFFu) v = 0x80000000u;
            else v = static_cast<uint32_t>(sa / sb);
            break;
          case Op::Divu:
            v = b == 0 ? 0xFFFFFFFFu : a / b;
            break;
          case Op::Rem:
            if (b == 0) v = a;
            else if (a == 0x80000000u && b == 0xFFFFFFFFu) v = 0;
            else v = static_cast<uint32_t>(sa % sb);
            break;
          case Op::Remu:
            v = b == 0 ? a : a % b;
            break;
          default: break;
        }
        write_ireg(wid, lane, in.rd, v);
      }
      break;
    }
    case InstrKind::Jump: {
      for (uint32_t lane = 0; lane < cfg_.num_threads; lane++)
        if (w.tmask & (1u << lane)) write_ireg(wid, lane, in.rd, w.pc + 4);
      if (in.op == Op::Jal) {
        next_pc = w.pc + static_cast<uint32_t>(in.imm);
      } else {
        uint32_t base = w.iregs[lead][in.rs1];
        next_pc = (base + static_cast<uint32_t>(in.imm)) & ~1u;
      }
      break;
    }
    case InstrKind::Branch: {
      uint32_t a = w.iregs[lead][in.rs1];
      uint32_t b = w.iregs[lead][in.rs2];
      bool taken = false;
      switch (in.op) {
        case Op::Beq: taken = a == b; break;
        case Op::Bne: taken = a != b; break;
        case Op::Blt:
          taken = static_cast<int32_t>(a) < static_cast<int32_t>(b);
          break;
        case Op::Bge:
          taken = static_cast<int32_t>(a) >= static_cast<int32_t>(b);
          break;
        case Op::Bltu: taken = a < b; break;
        case Op::Bgeu: taken = a >= b; break;
        default: break;
      }
      if (taken) next_pc = w.pc + static_cast<uint32_t>(in.imm);
      break;
    }
    case InstrKind::Load:
    case InstrKind::Store:
      exec_memory(wid, in, now);
      break;
    case InstrKind::Csr:
      exec_csr(wid, in);
      break;
    case InstrKind::Fp:
      exec_fp(wid, in);
      break;
    case InstrKind::Ext: {
      switch (in.op) {
        case Op::Wspawn:
          exec_wspawn(w.iregs[lead][in.rs1], w.iregs[lead][in.rs2], wid);
          break;
        case Op::Tmc:
          exec_tmc(wid, w.iregs[lead][in.rs1]);
          break;
        case Op::Split: {
          uint32_t pred = 0;
          for (uint32_t lane = 0; lane < cfg_.num_threads; lane++)
            if ((w.tmask & (1u << lane)) && w.iregs[lane][in.rs1] != 0)
              pred |= 1u << lane;
          if (!exec_split(wid, pred)) {
            proc_->raise_fault({"ipdom stack overflow", w.pc, id_, wid});
            return;
          }
          break;
        }
        case Op::Join: {
          auto popped = exec_join(wid);
          if (!popped) {
            proc_->raise_fault({"ipdom stack underflow", w.pc, id_, wid});
            return;
          }
          if (*popped) next_pc = **popped;
          break;
        }
        case Op::Bar: {
          uint32_t bar_id = w.iregs[lead][in.rs1];
          uint32_t expected = w.iregs[lead][in.rs2];
          if (!proc_->barrier_arrive(bar_id, expected, id_,
                                     static_cast<uint8_t>(wid)))
            return;  // fault raised
          break;
        }
        case Op::Tex:
          exec_ext(wid, in, now);
          break;
        default:
          break;
      }
      break;
    }
  }

  uint32_t lat = latency_of(in);
  if (lat > 1) {
    bool fp_dst = in.kind == InstrKind::Fp && writes_freg(in.op);
    uint8_t rd = in.rd;
    bool has_dst = in.kind == InstrKind::MulDiv || in.kind == InstrKind::Fp;
    if (has_dst) scoreboard_insert(w, fp_dst, rd, false, now + lat);
  }
  w.pc = next_pc;
}

void Core::exec_ext(uint32_t wid, const Instruction& in, uint64_t now) {
  (void)now;
  Wavefront& w = wavefronts[wid];
  if (in.imm >= static_cast<int32_t>(tex_unit.num_stages())) {
    proc_->raise_fault({"tex stage out of range", w.pc, id_, wid});
    return;
  }
  TextureUnit::Job job;
  job.wid = static_cast<uint8_t>(wid);
  job.rd = in.rd;
  job.tmask = w.tmask;
  job.pc = w.pc;
  job.stage = static_cast<uint8_t>(in.imm);
  job.generation = w.generation;
  for (uint32_t lane = 0; lane < cfg_.num_threads; lane++) {
    if (!(w.tmask & (1u << lane))) continue;
    job.coords[lane] = {static_cast<int32_t>(w.iregs[lane][in.rs1]),
                        static_cast<int32_t>(w.iregs[lane][in.rs2]),
                        static_cast<int32_t>(w.iregs[lane][in.rs3])};
  }
  tex_unit.submit(job);
  scoreboard_insert(w, false, in.rd, true, 0);
}

void Core::exec_memory(uint32_t wid, const Instruction& in, uint64_t now) {
  Wavefront& w = wavefronts[wid];
  const bool is_store = in.kind == InstrKind::Store;
  const bool fp = in.op == Op::Flw || in.op == Op::Fsw;
  uint32_t align = 1;
  if (in.op == Op::Lw || in.op == Op::Sw || in.op == Op::Flw ||
      in.op == Op::Fsw)
    align = 4;
  else if (in.op == Op::Lh || in.op == Op::Lhu || in.op == Op::Sh)
    align = 2;

  LoadTracker t;
  t.pc = w.pc;
  t.wid = static_cast<uint8_t>(wid);
  t.generation = w.generation;
  t.op = in.op;
  t.fp = fp;
  t.rd = in.rd;

  RequestTag tag{w.pc, static_cast<uint8_t>(wid), id_,
                 is_store ? AccessKind::Store : AccessKind::Load};
  uint32_t submitted_stores = 0;
  for (uint32_t lane = 0; lane < cfg_.num_threads; lane++) {
    if (!(w.tmask & (1u << lane))) continue;
    uint32_t addr = w.iregs[lane][in.rs1] + static_cast<uint32_t>(in.imm);
    if (addr % align != 0) {
      proc_->raise_fault({"misaligned memory access", w.pc, id_, wid});
      return;
    }
    LaneRequest r;
    r.lane = static_cast<uint8_t>(lane);
    r.addr = addr;
    r.is_store = is_store;
    r.tag = tag;
    if (is_store) {
      uint32_t v = fp ? w.fregs[lane][in.rs2] : w.iregs[lane][in.rs2];
      if (align == 4) {
        r.store_data = v;
        r.byte_mask = 0xF;
      } else if (align == 2) {
        uint32_t sh = (addr & 2) * 8;
        r.store_data = (v & 0xFFFF) << sh;
        r.byte_mask = static_cast<uint8_t>(0x3 << (addr & 2));
      } else {
        uint32_t sh = (addr & 3) * 8;
        r.store_data = (v & 0xFF) << sh;
        r.byte_mask = static_cast<uint8_t>(1 << (addr & 3));
      }
    }
    if (addr == cfg_.console_addr) {
      if (is_store) {
        uint32_t sh = (addr & 3) * 8;
        proc_->console_write(static_cast<uint8_t>(r.store_data >> sh));
      } else {
        t.expected |= 1u << lane;
        t.got |= 1u << lane;
        t.lane_addr[lane] = addr;
        t.lane_word[lane] = 0;  // console is write-only
      }
      continue;
    }
    if (shm.contains(addr & ~3u, 4)) {
      w.pending_shm.push_back(r);
      if (is_store) submitted_stores++;
      else {
        t.expected |= 1u << lane;
        t.lane_addr[lane] = addr;
      }
      continue;
    }
    if (proc_->ram().contains(addr & ~3u, 4)) {
      w.pending_dcache.push_back(r);
      if (is_store) submitted_stores++;
      else {
        t.expected |= 1u << lane;
        t.lane_addr[lane] = addr;
      }
      continue;
    }
    proc_->raise_fault({"memory access out of range", w.pc, id_, wid});
    return;
  }
  (void)now;
  in_flight_stores_ += submitted_stores;
  if (!is_store && t.expected != 0) {
    scoreboard_insert(w, fp, in.rd, true, 0);
    if (t.got == t.expected) {
      finish_load(t);  // console-only load completes immediately
    } else {
      loads_.push_back(t);
    }
  }
  replay_memory(wid);
  if (!w.pending_dcache.empty() || !w.pending_shm.empty())
    set_stalled(wid, true);
}

uint32_t Core::csr_read_value(uint32_t wid, uint32_t lane, uint32_t csr,
                              bool& ok) const {
  ok = true;
  switch (csr) {
    case kCsrThreadId: return lane;
    case kCsrWavefrontId: return wid;
    case kCsrCoreId: return id_;
    case kCsrNumThreads: return cfg_.num_threads;
    case kCsrNumWavefronts: return cfg_.num_wavefronts;
    case kCsrNumCores: return cfg_.num_cores;
    case kCsrThreadMask: return wavefronts[wid].tmask;
    default: break;
  }
  auto v = tex_unit.csr_read(csr);
  if (v) return *v;
  ok = false;
  return 0;
}

void Core::exec_csr(uint32_t wid, const Instruction& in) {
  Wavefront& w = wavefronts[wid];
  const uint32_t lead = first_active_lane(w.tmask);
  const bool imm_form = in.op == Op::Csrrwi || in.op == Op::Csrrsi ||
                        in.op == Op::Csrrci;
  const uint32_t operand =
      imm_form ? in.rs1 : w.iregs[lead][in.rs1];
  bool writes = in.op == Op::Csrrw || in.op == Op::Csrrwi ||
                ((in.op == Op::Csrrs || in.op == Op::Csrrc) && in.rs1 != 0) ||
                ((in.op == Op::Csrrsi || in.op == Op::Csrrci) && in.rs1 != 0);

  bool ok = true;
  uint32_t old_lead = csr_read_value(wid, lead, in.csr, ok);
  if (!ok) {
    proc_->raise_fault({"unknown csr", w.pc, id_, wid});
    return;
  }
  if (writes) {
    bool id_csr = in.csr >= kCsrThreadId && in.csr <= kCsrThreadMask;
    if (id_csr) {
      proc_->raise_fault({"write to read-only csr", w.pc, id_, wid});
      return;
    }
    uint32_t newval = operand;
    if (in.op == Op::Csrrs || in.op == Op::Csrrsi) newval = old_lead | operand;
    if (in.op == Op::Csrrc || in.op == Op::Csrrci) newval = old_lead & ~operand;
    if (!tex_unit.csr_write(in.csr, newval)) {
      proc_->raise_fault({"unknown csr", w.pc, id_, wid});
      return;
    }
  }
  for (uint32_t lane = 0; lane < cfg_.num_threads; lane++) {
    if (!(w.tmask & (1u << lane))) continue;
    bool lane_ok = true;
    uint32_t v = csr_read_value(wid, lane, in.csr, lane_ok);
    write_ireg(wid, lane, in.rd, v);
  }
}

void Core::exec_fp(uint32_t wid, const Instruction& in) {
  Wavefront& w = wavefronts[wid];
  for (uint32_t lane = 0; lane < cfg_.num_threads; lane++) {
    if (!(w.tmask & (1u << lane))) continue;
    float a = as_float(w.fregs[lane][in.rs1]);
    float b = as_float(w.fregs[lane][in.rs2]);
    float c = as_float(w.fregs[lane][in.rs3]);
    switch (in.op) {
      case Op::FaddS: w.fregs[lane][in.rd] = as_bits(a + b); break;
      case Op::FsubS: w.fregs[lane][in.rd] = as_bits(a - b); break;
      case Op::FmulS: w.fregs[lane][in.rd] = as_bits(a * b); break;
      case Op::FdivS: w.fregs[lane][in.rd] = as_bits(a / b); break;
      case Op::FsqrtS: w.fregs[lane][in.rd] = as_bits(std::sqrt(a)); break;
      case Op::FmaddS:
        w.fregs[lane][in.rd] = as_bits(std::fma(a, b, c));
        break;
      case Op::FmsubS:
        w.fregs[lane][in.rd] = as_bits(std::fma(a, b, -c));
        break;
      case Op::FminS: w.fregs[lane][in.rd] = as_bits(std::fmin(a, b)); break;
      case Op::FmaxS: w.fregs[lane][in.rd] = as_bits(std::fmax(a, b)); break;
      case Op::FeqS: write_ireg(wid, lane, in.rd, a == b ? 1 : 0); break;
      case Op::FltS: write_ireg(wid, lane, in.rd, a < b ? 1 : 0); break;
      case Op::FleS: write_ireg(wid, lane, in.rd, a <= b ? 1 : 0); break;
      case Op::FcvtWS:
        write_ireg(wid, lane, in.rd, cvt_w_s(a));
        break;
      case Op::FcvtWUS:
        write_ireg(wid, lane, in.rd, cvt_wu_s(a));
        break;
      case Op::FcvtSW:
        w.fregs[lane][in.rd] = as_bits(static_cast<float>(
            static_cast<int32_t>(w.iregs[lane][in.rs1])));
        break;
      case Op::FcvtSWU:
        w.fregs[lane][in.rd] =
            as_bits(static_cast<float>(w.iregs[lane][in.rs1]));
        break;
      default:
        break;
    }
  }
}

}  // namespace gpusim
