#pragma once

#include "config.hpp"
#include "processor.hpp"
#include "kernel_builder.hpp"
#include "oracle.hpp"

namespace gpusim::test {

// Small, fast config for kernel tests: near-ideal memory, 1 MB RAM.
inline ProcessorConfig fast_cfg(uint32_t cores = 1, uint32_t wavefronts = 4,
                                uint32_t threads = 4) {
  ProcessorConfig cfg;
  cfg.num_cores = cores;
  cfg.num_wavefronts = wavefronts;
  cfg.num_threads = threads;
  cfg.mem_latency = 1;
  cfg.ram_size = 1u << 20;
  return cfg;
}

inline uint32_t boot_sp(const ProcessorConfig& cfg, uint32_t core,
                        uint32_t wid, uint32_t tid) {
  uint32_t idx = (core * cfg.num_wavefronts + wid) * cfg.num_threads + tid;
  return cfg.ram_base + cfg.ram_size - idx * cfg.stack_size;
}

}  // namespace gpusim::test
