#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "cache.hpp"
#include "config.hpp"
#include "mem.hpp"

namespace gpusim {

enum TexFormat : uint32_t { kTexRGBA8 = 0, kTexRGB565 = 1, kTexR8 = 2 };
enum TexWrap : uint32_t { kWrapClamp = 0, kWrapRepeat = 1 };
enum TexFilter : uint32_t { kFilterPoint = 0, kFilterBilinear = 1 };

// Sampler CSR block layout: one 32-register window per stage starting at
// kTexCsrBase.  The WRAP register packs wrap_u in bit 0 and wrap_v in bit 1.
inline constexpr uint32_t kTexCsrBase = 0x7C0;
inline constexpr uint32_t kTexCsrStride = 32;
inline constexpr uint32_t kTexCsrAddr = 0;
inline constexpr uint32_t kTexCsrMipoff0 = 1;   // 1..16
inline constexpr uint32_t kTexCsrWidth = 17;
inline constexpr uint32_t kTexCsrHeight = 18;
inline constexpr uint32_t kTexCsrFormat = 19;
inline constexpr uint32_t kTexCsrWrap = 20;
inline constexpr uint32_t kTexCsrFilter = 21;

struct TextureStageState {
  uint32_t base_addr = 0;
  std::array<uint32_t, 16> mip_offsets{};
  uint32_t width = 1;
  uint32_t height = 1;
  uint32_t format = kTexRGBA8;
  uint32_t wrap_u = kWrapClamp;
  uint32_t wrap_v = kWrapClamp;
  uint32_t filter = kFilterPoint;

  uint32_t stride() const {
    return format == kTexRGBA8 ? 4 : format == kTexRGB565 ? 2 : 1;
  }
  uint32_t max_mip() const;
  uint32_t mip_width(uint32_t level) const {
    return std::max(1u, width >> level);
  }
  uint32_t mip_height(uint32_t level) const {
    return std::max(1u, height >> level);
  }
};

// u, v, lod are signed 16.16 fixed-point.
struct TexCoord {
  int32_t u = 0;
  int32_t v = 0;
  int32_t lod = 0;
};

struct Rgba8 {
  uint8_t r = 0, g = 0, b = 0, a = 0;
  bool operator==(const Rgba8&) const = default;
  uint32_t pack() const {
    return static_cast<uint32_t>(r) | (static_cast<uint32_t>(g) << 8) |
           (static_cast<uint32_t>(b) << 16) | (static_cast<uint32_t>(a) << 24);
  }
};

int32_t wrap_coord(int32_t i, int32_t size, uint32_t mode);

// Texel addresses and 8-bit blend fractions for one lane.  Point sampling
// emits the c00 corner with zero blends.
struct LaneTexels {
  std::array<uint32_t, 4> addr{};  // c00, c10, c01, c11
  uint32_t count = 0;              // 1 for point, 4 for bilinear
  uint8_t frac_u = 0;
  uint8_t frac_v = 0;
  uint32_t level = 0;
};

LaneTexels tex_address_gen(const TextureStageState& st, TexCoord coord,
                           uint32_t filter);

Rgba8 convert_format(const uint8_t* raw, uint32_t format);

// lerp(a,b,f) = a + (((b-a)*f + 128) >> 8) per channel.
uint8_t lerp8(uint8_t a, uint8_t b, uint8_t f);
Rgba8 lerp_rgba(Rgba8 a, Rgba8 b, uint8_t f);
Rgba8 filter_bilinear(Rgba8 c00, Rgba8 c10, Rgba8 c01, Rgba8 c11,
                      uint8_t frac_u, uint8_t frac_v);

using TexelReadFn = std::function<uint8_t(uint32_t addr)>;

// Functional sampling path; the cycle-level unit produces identical values.
Rgba8 sample_texture(const TextureStageState& st, TexCoord coord,
                     const TexelReadFn& read);
// Two samples at adjacent mip levels blended by FRAC(lod); the kernel-level
// pseudo-instruction sequence computes the same result with two tex
// instructions and integer lerps.
Rgba8 sample_trilinear(const TextureStageState& st, TexCoord coord,
                       const TexelReadFn& read);

struct TexStats {
  uint64_t batches = 0;
  uint64_t unique_texels = 0;
  uint64_t total_texels = 0;
  uint64_t batch_cycles = 0;
  void add(const TexStats& o) {
    batches += o.batches;
    unique_texels += o.unique_texels;
    total_texels += o.total_texels;
    batch_cycles += o.batch_cycles;
  }
};

// Per-core texture unit.  Jobs are serviced strictly one batch at a time:
// address generation, cross-lane de-duplication, texel fetch through the
// data cache, then a two-cycle filter before writeback.
class TextureUnit {
 public:
  struct Job {
    uint8_t wid = 0;
    uint8_t rd = 0;
    uint32_t tmask = 0;
    uint32_t pc = 0;
    uint8_t stage = 0;
    uint32_t generation = 0;
    std::array<TexCoord, 32> coords{};
  };
  struct Completion {
    uint8_t wid = 0;
    uint8_t rd = 0;
    uint32_t tmask = 0;
    uint32_t generation = 0;
    std::array<uint32_t, 32> values{};
  };

  TextureUnit(const ProcessorConfig& cfg, uint8_t core_id);

  bool csr_in_range(uint32_t csr) const;
  bool csr_write(uint32_t csr, uint32_t value);
  std::optional<uint32_t> csr_read(uint32_t csr) const;
  const TextureStageState& stage_state(uint32_t stage) const {
    return stages_[stage];
  }
  uint32_t num_stages() const { return static_cast<uint32_t>(stages_.size()); }

  bool can_submit() const { return jobs_.size() < queue_depth_; }
  void submit(const Job& job) { jobs_.push_back(job); }

  void cycle(uint64_t now, Cache& dcache);
  void on_texel_response(const CoreResponse& resp);

  bool idle() const { return jobs_.empty() && state_ == State::Idle; }

  std::deque<Completion> completions;
  TexStats stats;

 private:
  enum class State { Idle, AddrGen, Issue, WaitData, Filter };

  void start_batch(uint64_t now);
  void finish_batch(uint64_t now);

  std::vector<TextureStageState> stages_;
  uint8_t core_id_;
  uint32_t queue_depth_;
  uint32_t lat_issue_;
  uint32_t num_threads_;
  bool dedup_;

  std::deque<Job> jobs_;
  State state_ = State::Idle;
  uint32_t countdown_ = 0;
  uint64_t batch_start_ = 0;
  Job cur_;
  std::array<LaneTexels, 32> lane_texels_{};
  std::vector<uint32_t> fetch_words_;         // word-aligned fetch list
  std::vector<bool> fetch_issued_;
  size_t fetch_outstanding_ = 0;
  std::vector<std::pair<uint32_t, uint32_t>> word_values_;  // addr -> word
};

}  // namespace gpusim
