#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "isa.hpp"

namespace gpusim::test {

// Straight-line scalar RV32IMF reference interpreter.  Executes one thread
// with no caches, no pipeline and no timing; split/join degenerate to
// balanced stack pushes and pops.  Used as the independent oracle for the
// SIMT engine: per-thread architectural results must match runs of this
// interpreter parameterized by the identity CSR values.
class ScalarOracle {
 public:
  struct Ids {
    uint32_t thread_id = 0;
    uint32_t wavefront_id = 0;
    uint32_t core_id = 0;
    uint32_t num_threads = 1;
    uint32_t num_wavefronts = 1;
    uint32_t num_cores = 1;
  };

  enum class Outcome { Halted, MaxSteps, Fault };

  ScalarOracle(uint32_t ram_base, uint32_t ram_size);

  void load(const std::vector<uint8_t>& bytes, uint32_t base, uint32_t entry);
  Outcome run(uint64_t max_steps);

  uint32_t read_u32(uint32_t addr) const;
  bool contains(uint32_t addr, uint32_t len) const;

  Ids ids;
  uint32_t pc = 0;
  std::array<uint32_t, 32> x{};
  std::array<uint32_t, 32> f{};
  std::vector<uint8_t> mem;
  uint32_t base;
  std::string console;
  std::string fault_msg;
  uint64_t steps = 0;

 private:
  struct StackEntry {
    uint32_t mask;
    bool fall_through;
  };
  Outcome step();
  bool mem_read(uint32_t addr, uint32_t len, uint32_t& out);
  bool mem_write(uint32_t addr, uint32_t len, uint32_t value);

  std::vector<StackEntry> ipdom_;
  bool halted_ = false;
};

}  // namespace gpusim::test
