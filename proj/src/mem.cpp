#include "mem.hpp"

namespace gpusim {

void DramModel::accept(LineRequest req, uint64_t now) {
  accepted_this_cycle_++;
  Pending p;
  p.ready_cycle = now + latency_;
  p.seq = next_seq_++;
  p.source = req.source;
  p.is_write = req.is_write;
  if (req.is_write) {
    stats.writes++;
    writes_in_flight_++;
    if (ram_->contains(req.addr, req.line_size))
      ram_->write_block(req.addr, req.data.data(), req.line_size);
  } else {
    stats.reads++;
    p.resp.addr = req.addr;
    p.resp.data.resize(req.line_size, 0);
    if (ram_->contains(req.addr, req.line_size))
      ram_->read_block(req.addr, p.resp.data.data(), req.line_size);
  }
  pending_.push_back(std::move(p));
}

void DramModel::cycle(
    uint64_t now,
    const std::function<bool(uint32_t, LineResponse&&)>& deliver) {
  accepted_this_cycle_ = 0;
  if (!pending_.empty()) stats.busy_cycles++;
  while (!pending_.empty() && pending_.front().ready_cycle <= now) {
    Pending& p = pending_.front();
    if (p.is_write) {
      writes_in_flight_--;
      pending_.pop_front();
      continue;
    }
    if (!deliver(p.source, std::move(p.resp))) break;
    pending_.pop_front();
  }
}

}  // namespace gpusim
