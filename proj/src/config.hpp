#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace gpusim {

struct CacheConfig {
  uint32_t size = 16384;
  uint32_t line_size = 16;
  uint32_t num_banks = 4;
  uint32_t associativity = 1;
  uint32_t num_ports = 2;          // virtual ports per bank
  uint32_t mshr_entries = 8;       // per bank
  uint32_t input_queue_depth = 4;  // per bank
  uint32_t fill_queue_depth = 4;
  uint32_t memreq_queue_depth = 4;

  uint32_t num_lines() const { return size / line_size; }
  uint32_t sets_per_bank() const {
    return num_lines() / (num_banks * associativity);
  }
  bool operator==(const CacheConfig&) const = default;
};

struct ProcessorConfig {
  uint32_t num_cores = 1;
  uint32_t num_clusters = 1;
  uint32_t num_wavefronts = 4;  // per core
  uint32_t num_threads = 4;     // per wavefront

  // issue latencies in cycles per functional class
  uint32_t lat_alu = 1;
  uint32_t lat_mul = 3;
  uint32_t lat_div = 16;
  uint32_t lat_fp = 4;
  uint32_t lat_fsqrt = 16;
  uint32_t lat_tex_issue = 2;

  CacheConfig icache{.size = 8192, .line_size = 16, .num_banks = 1,
                     .associativity = 1, .num_ports = 1};
  CacheConfig dcache{};
  bool l2_enable = false;
  CacheConfig l2{.size = 131072, .line_size = 16, .num_banks = 4,
                 .associativity = 2, .num_ports = 1, .mshr_entries = 16};
  bool l3_enable = false;
  CacheConfig l3{.size = 262144, .line_size = 16, .num_banks = 4,
                 .associativity = 4, .num_ports = 1, .mshr_entries = 16};

  uint32_t mem_latency = 100;    // cycles, >= 1
  uint32_t mem_bandwidth = 1;    // requests accepted per cycle

  uint32_t ram_base = 0x80000000u;
  uint32_t ram_size = 16u << 20;
  uint32_t shm_base = 0x6FF00000u;
  uint32_t shm_size = 16384;
  uint32_t stack_size = 4096;    // per-thread carve-out at RAM top
  uint32_t console_addr = 0xFFFF0000u;

  uint32_t ipdom_depth = 0;      // 0 means: use num_threads
  uint32_t num_barriers = 16;    // local and global table sizes
  uint32_t tex_stages = 2;
  uint32_t tex_queue_depth = 4;
  bool tex_dedup = true;

  uint32_t effective_ipdom_depth() const {
    return ipdom_depth ? ipdom_depth : num_threads;
  }

  // Returns an error message, or empty when the config is sound.
  std::string validate() const;
};

// Applies one `key = value` setting; returns an error string on unknown key
// or bad value.  Key set matches the CLI flag names with '-' as '_'.
std::string config_set(ProcessorConfig& cfg, const std::string& key,
                       const std::string& value);

// Parses flat key = value text ('#' comments allowed).
std::string config_parse_text(ProcessorConfig& cfg, const std::string& text);
std::string config_parse_file(ProcessorConfig& cfg, const std::string& path);

// Stable key -> value view of every setting, for reports.
std::map<std::string, std::string> config_dump(const ProcessorConfig& cfg);

}  // namespace gpusim
