#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "processor.hpp"
#include "runtime.hpp"
#include "stats.hpp"

namespace gpusim {

struct TexturePreload {
  uint32_t addr = 0;
  std::vector<uint8_t> bytes;
};

struct SweepPoint {
  std::string value;
  bool ok = false;
  std::string error;
  RunStats stats;
};

// Runs the kernel once per axis value on a private processor built from the
// base config, in parallel worker threads; results are ordered by axis
// value position, independent of completion order.
std::vector<SweepPoint> run_sweep(const ProcessorConfig& base,
                                  const std::string& axis,
                                  const std::vector<std::string>& values,
                                  const KernelImage& image,
                                  const std::vector<TexturePreload>& preloads,
                                  uint64_t max_cycles);

std::string sweep_to_json(const std::string& axis,
                          const std::vector<SweepPoint>& points);
std::string sweep_to_csv(const std::string& axis,
                         const std::vector<SweepPoint>& points);

}  // namespace gpusim
