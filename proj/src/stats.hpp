#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cache.hpp"
#include "texture.hpp"

namespace gpusim {

enum class RunStatus { Completed, Timeout, Fault };

struct RunStats {
  uint64_t cycles = 0;
  uint64_t instructions = 0;
  uint64_t lane_instructions = 0;
  double ipc_total = 0.0;
  double lane_ipc = 0.0;
  std::vector<double> ipc_per_core;
  std::vector<uint64_t> instructions_per_core;

  CacheStats l1i, l1d, l2, l3;
  bool l2_enabled = false;
  bool l3_enabled = false;
  uint64_t shm_accesses = 0;
  uint64_t shm_conflicts = 0;
  uint64_t dram_reads = 0;
  uint64_t dram_writes = 0;

  TexStats tex;

  std::string console;
  RunStatus status = RunStatus::Completed;
  std::string fault_message;

  std::map<std::string, std::string> config;

  // Stable schema: every key is always present regardless of config.
  std::string to_json() const;
};

}  // namespace gpusim
