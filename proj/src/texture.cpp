#include "texture.hpp"

#include <algorithm>
#include <cassert>

namespace gpusim {

uint32_t TextureStageState::max_mip() const {
  // last level of the full chain: both dimensions collapsed to one texel
  uint32_t lvl = 0;
  while ((std::max(width >> lvl, 1u) > 1 || std::max(height >> lvl, 1u) > 1) &&
         lvl < 15)
    lvl++;
  return lvl;
}

int32_t wrap_coord(int32_t i, int32_t size, uint32_t mode) {
  if (mode == kWrapRepeat) {
    int32_t m = i % size;
    return m < 0 ? m + size : m;
  }
  return std::min(std::max(i, 0), size - 1);
}

LaneTexels tex_address_gen(const TextureStageState& st, TexCoord coord,
                           uint32_t filter) {
  LaneTexels out;
  int32_t lvl = coord.lod >> 16;  // floor of 16.16
  lvl = std::min(std::max(lvl, 0), static_cast<int32_t>(st.max_mip()));
  out.level = static_cast<uint32_t>(lvl);
  const int32_t w = static_cast<int32_t>(st.mip_width(out.level));
  const int32_t h = static_cast<int32_t>(st.mip_height(out.level));
  const uint32_t stride = st.stride();
  const uint32_t mip_base = st.base_addr + st.mip_offsets[out.level];

  // Sample centers sit at (i + 0.5) / size; 0x8000 is 0.5 in 16.16.
  int64_t x_fp = static_cast<int64_t>(coord.u) * w - 0x8000;
  int64_t y_fp = static_cast<int64_t>(coord.v) * h - 0x8000;
  int32_t x0 = static_cast<int32_t>(x_fp >> 16);
  int32_t y0 = static_cast<int32_t>(y_fp >> 16);
  auto texel = [&](int32_t x, int32_t y) {
    uint32_t xi = static_cast<uint32_t>(wrap_coord(x, w, st.wrap_u));
    uint32_t yi = static_cast<uint32_t>(wrap_coord(y, h, st.wrap_v));
    return mip_base + (yi * static_cast<uint32_t>(w) + xi) * stride;
  };
  if (filter == kFilterPoint) {
    out.count = 1;
    out.addr[0] = texel(x0, y0);
    return out;
  }
  out.count = 4;
  out.addr[0] = texel(x0, y0);
  out.addr[1] = texel(x0 + 1, y0);
  out.addr[2] = texel(x0, y0 + 1);
  out.addr[3] = texel(x0 + 1, y0 + 1);
  out.frac_u = static_cast<uint8_t>((x_fp >> 8) & 0xFF);
  out.frac_v = static_cast<uint8_t>((y_fp >> 8) & 0xFF);
  return out;
}

Rgba8 convert_format(const uint8_t* raw, uint32_t format) {
  switch (format) {
    case kTexRGBA8:
      return {raw[0], raw[1], raw[2], raw[3]};
    case kTexRGB565: {
      uint16_t v = static_cast<uint16_t>(raw[0] | (raw[1] << 8));
      uint8_t r5 = (v >> 11) & 31, g6 = (v >> 5) & 63, b5 = v & 31;
      return {static_cast<uint8_t>((r5 << 3) | (r5 >> 2)),
              static_cast<uint8_t>((g6 << 2) | (g6 >> 4)),
              static_cast<uint8_t>((b5 << 3) | (b5 >> 2)), 255};
    }
    default:
      return {raw[0], 0, 0, 255};
  }
}

uint8_t lerp8(uint8_t a, uint8_t b, uint8_t f) {
  int32_t d = (static_cast<int32_t>(b) - a) * f + 128;
  return static_cast<uint8_t>(a + (d >> 8));
}

Rgba8 lerp_rgba(Rgba8 a, Rgba8 b, uint8_t f) {
  return {lerp8(a.r, b.r, f), lerp8(a.g, b.g, f), lerp8(a.b, b.b, f),
          lerp8(a.a, b.a, f)};
}

Rgba8 filter_bilinear(Rgba8 c00, Rgba8 c10, Rgba8 c01, Rgba8 c11,
                      uint8_t frac_u, uint8_t frac_v) {
  return lerp_rgba(lerp_rgba(c00, c10, frac_u), lerp_rgba(c01, c11, frac_u),
                   frac_v);
}

Rgba8 sample_texture(const TextureStageState& st, TexCoord coord,
                     const TexelReadFn& read) {
  LaneTexels t = tex_address_gen(st, coord, st.filter);
  uint32_t stride = st.stride();
  auto fetch = [&](uint32_t addr) {
    uint8_t raw[4] = {0, 0, 0, 0};
    for (uint32_t i = 0; i < stride; i++) raw[i] = read(addr + i);
    return convert_format(raw, st.format);
  };
  Rgba8 c00 = fetch(t.addr[0]);
  if (t.count == 1) return c00;
  return filter_bilinear(c00, fetch(t.addr[1]), fetch(t.addr[2]),
                         fetch(t.addr[3]), t.frac_u, t.frac_v);
}

Rgba8 sample_trilinear(const TextureStageState& st, TexCoord coord,
                       const TexelReadFn& read) {
  Rgba8 a = sample_texture(st, coord, read);
  TexCoord next = coord;
  next.lod = coord.lod + 0x10000;
  Rgba8 b = sample_texture(st, next, read);
  uint8_t f = static_cast<uint8_t>((coord.lod >> 8) & 0xFF);
  return lerp_rgba(a, b, f);
}

TextureUnit::TextureUnit(const ProcessorConfig& cfg, uint8_t core_id)
    : stages_(cfg.tex_stages), core_id_(core_id),
      queue_depth_(cfg.tex_queue_depth), lat_issue_(cfg.lat_tex_issue),
      num_threads_(cfg.num_threads), dedup_(cfg.tex_dedup) {}

bool TextureUnit::csr_in_range(uint32_t csr) const {
  return csr >= kTexCsrBase &&
         csr < kTexCsrBase + kTexCsrStride * num_stages() &&
         ((csr - kTexCsrBase) % kTexCsrStride) <= kTexCsrFilter;
}

bool TextureUnit::csr_write(uint32_t csr, uint32_t value) {
  if (!csr_in_range(csr)) return false;
  uint32_t stage = (csr - kTexCsrBase) / kTexCsrStride;
  uint32_t field = (csr - kTexCsrBase) % kTexCsrStride;
  TextureStageState& st = stages_[stage];
  if (field == kTexCsrAddr) st.base_addr = value;
  else if (field >= kTexCsrMipoff0 && field < kTexCsrMipoff0 + 16)
    st.mip_offsets[field - kTexCsrMipoff0] = value;
  else if (field == kTexCsrWidth) st.width = std::max(1u, value);
  else if (field == kTexCsrHeight) st.height = std::max(1u, value);
  else if (field == kTexCsrFormat) st.format = value % 3;
  else if (field == kTexCsrWrap) {
    st.wrap_u = value & 1;
    st.wrap_v = (value >> 1) & 1;
  } else if (field == kTexCsrFilter) st.filter = value & 1;
  return true;
}

std::optional<uint32_t> TextureUnit::csr_read(uint32_t csr) const {
  if (!csr_in_range(csr)) return std::nullopt;
  uint32_t stage = (csr - kTexCsrBase) / kTexCsrStride;
  uint32_t field = (csr - kTexCsrBase) % kTexCsrStride;
  const TextureStageState& st = stages_[stage];
  if (field == kTexCsrAddr) return st.base_addr;
  if (field >= kTexCsrMipoff0 && field < kTexCsrMipoff0 + 16)
    return st.mip_offsets[field - kTexCsrMipoff0];
  if (field == kTexCsrWidth) return st.width;
  if (field == kTexCsrHeight) return st.height;
  if (field == kTexCsrFormat) return st.format;
  if (field == kTexCsrWrap) return st.wrap_u | (st.wrap_v << 1);
  return st.filter;
}

void TextureUnit::start_batch(uint64_t now) {
  cur_ = jobs_.front();
  jobs_.pop_front();
  batch_start_ = now;
  state_ = State::AddrGen;
  countdown_ = lat_issue_;
  fetch_words_.clear();
  fetch_issued_.clear();
  word_values_.clear();
  fetch_outstanding_ = 0;

  const TextureStageState& st = stages_[cur_.stage];
  uint64_t texel_count = 0;
  std::vector<uint32_t> unique_texels;
  for (uint32_t lane = 0; lane < num_threads_; lane++) {
    if (!(cur_.tmask & (1u << lane))) continue;
    lane_texels_[lane] = tex_address_gen(st, cur_.coords[lane], st.filter);
    const LaneTexels& t = lane_texels_[lane];
    for (uint32_t c = 0; c < t.count; c++) {
      texel_count++;
      if (std::find(unique_texels.begin(), unique_texels.end(), t.addr[c]) ==
          unique_texels.end())
        unique_texels.push_back(t.addr[c]);
      uint32_t w0 = t.addr[c] & ~3u;
      uint32_t w1 = (t.addr[c] + st.stride() - 1) & ~3u;
      for (uint32_t w = w0; w <= w1; w += 4) {
        if (dedup_) {
          if (std::find(fetch_words_.begin(), fetch_words_.end(), w) ==
              fetch_words_.end())
            fetch_words_.push_back(w);
        } else {
          fetch_words_.push_back(w);
        }
      }
    }
  }
  stats.total_texels += texel_count;
  stats.unique_texels += unique_texels.size();
  fetch_issued_.assign(fetch_words_.size(), false);
  fetch_outstanding_ = fetch_words_.size();
}

void TextureUnit::on_texel_response(const CoreResponse& resp) {
  uint32_t addr = resp.addr & ~3u;
  bool known = false;
  for (auto& [a, v] : word_values_) {
    if (a == addr) {
      known = true;
      break;
    }
  }
  if (!known) word_values_.push_back({addr, resp.value});
  assert(fetch_outstanding_ > 0);
  fetch_outstanding_--;
}

void TextureUnit::finish_batch(uint64_t now) {
  const TextureStageState& st = stages_[cur_.stage];
  auto read_byte = [&](uint32_t addr) -> uint8_t {
    uint32_t w = addr & ~3u;
    for (const auto& [a, v] : word_values_)
      if (a == w) return static_cast<uint8_t>(v >> (8 * (addr & 3)));
    assert(false && "texel word missing from batch");
    return 0;
  };
  Completion done;
  done.wid = cur_.wid;
  done.rd = cur_.rd;
  done.tmask = cur_.tmask;
  done.generation = cur_.generation;
  for (uint32_t lane = 0; lane < num_threads_; lane++) {
    if (!(cur_.tmask & (1u << lane))) continue;
    const LaneTexels& t = lane_texels_[lane];
    uint8_t raw[4] = {0, 0, 0, 0};
    auto fetch = [&](uint32_t addr) {
      for (uint32_t i = 0; i < st.stride(); i++) raw[i] = read_byte(addr + i);
      return convert_format(raw, st.format);
    };
    Rgba8 color;
    if (t.count == 1) {
      color = fetch(t.addr[0]);
    } else {
      Rgba8 c00 = fetch(t.addr[0]);
      Rgba8 c10 = fetch(t.addr[1]);
      Rgba8 c01 = fetch(t.addr[2]);
      Rgba8 c11 = fetch(t.addr[3]);
      color = filter_bilinear(c00, c10, c01, c11, t.frac_u, t.frac_v);
    }
    done.values[lane] = color.pack();
  }
  completions.push_back(done);
  stats.batches++;
  stats.batch_cycles += now - batch_start_;
  state_ = State::Idle;
}

void TextureUnit::cycle(uint64_t now, Cache& dcache) {
  if (state_ == State::Idle) {
    if (jobs_.empty()) return;
    start_batch(now);
    return;
  }
  if (state_ == State::AddrGen) {
    if (countdown_ > 0) countdown_--;
    if (countdown_ == 0)
      state_ = fetch_words_.empty() ? State::Filter : State::Issue;
    if (state_ == State::Filter) countdown_ = 2;
    return;
  }
  if (state_ == State::Issue) {
    // Present up to one wavefront's width of texel words per cycle.
    std::vector<LaneRequest> group;
    std::vector<size_t> idx;
    for (size_t i = 0; i < fetch_words_.size() && group.size() < num_threads_;
         i++) {
      if (fetch_issued_[i]) continue;
      LaneRequest r;
      r.lane = static_cast<uint8_t>(group.size());
      r.addr = fetch_words_[i];
      r.tag = {cur_.pc, cur_.wid, core_id_, AccessKind::Texel};
      group.push_back(r);
      idx.push_back(i);
    }
    uint32_t accepted = dcache.submit_lanes(group);
    for (size_t k = 0; k < group.size(); k++)
      if (accepted & (1u << k)) fetch_issued_[idx[k]] = true;
    bool all = std::all_of(fetch_issued_.begin(), fetch_issued_.end(),
                           [](bool b) { return b; });
    if (all) state_ = State::WaitData;
    return;
  }
  if (state_ == State::WaitData) {
    // Only when every texel in the batch has returned does filtering begin.
    if (fetch_outstanding_ == 0) {
      state_ = State::Filter;
      countdown_ = 2;
    }
    return;
  }
  if (state_ == State::Filter) {
    if (countdown_ > 0) countdown_--;
    if (countdown_ == 0) finish_batch(now);
  }
}

}  // namespace gpusim
