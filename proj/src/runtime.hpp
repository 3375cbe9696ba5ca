#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gpusim {

// Identification CSRs readable by kernels; writes fault.
inline constexpr uint32_t kCsrThreadId = 0xCC0;
inline constexpr uint32_t kCsrWavefrontId = 0xCC1;
inline constexpr uint32_t kCsrCoreId = 0xCC2;
inline constexpr uint32_t kCsrNumThreads = 0xCC3;
inline constexpr uint32_t kCsrNumWavefronts = 0xCC4;
inline constexpr uint32_t kCsrNumCores = 0xCC5;
inline constexpr uint32_t kCsrThreadMask = 0xCC6;

// Flat little-endian RV32 image copied to load_base at reset; execution
// starts at entry on wavefront 0, thread 0 of every core.
struct KernelImage {
  uint32_t load_base = 0x80000000u;
  uint32_t entry = 0x80000000u;
  std::vector<uint8_t> bytes;
};

struct SimFault {
  std::string message;
  uint32_t pc = 0;
  uint32_t core = 0;
  uint32_t wavefront = 0;
};

}  // namespace gpusim
