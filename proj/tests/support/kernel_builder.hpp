#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "isa.hpp"
#include "runtime.hpp"

namespace gpusim::test {

// Tiny label-resolving assembler over the instruction encoder, for building
// test kernels programmatically.
class KernelBuilder {
 public:
  explicit KernelBuilder(uint32_t base = 0x80000000u) : base_(base) {}

  KernelBuilder& label(const std::string& name);
  uint32_t here() const { return base_ + 4 * static_cast<uint32_t>(words_.size()); }

  KernelBuilder& instr(const Instruction& in);
  KernelBuilder& raw(uint32_t word);
  KernelBuilder& word(uint32_t value) { return raw(value); }

  // register-register / register-immediate forms
  KernelBuilder& alu(Op op, uint8_t rd, uint8_t rs1, uint8_t rs2);
  KernelBuilder& alui(Op op, uint8_t rd, uint8_t rs1, int32_t imm);
  KernelBuilder& lui(uint8_t rd, uint32_t imm20);
  KernelBuilder& li(uint8_t rd, uint32_t value);
  KernelBuilder& nop() { return alui(Op::Addi, 0, 0, 0); }

  KernelBuilder& load(Op op, uint8_t rd, uint8_t rs1, int32_t imm);
  KernelBuilder& store(Op op, uint8_t rs2, uint8_t rs1, int32_t imm);

  KernelBuilder& branch(Op op, uint8_t rs1, uint8_t rs2,
                        const std::string& target);
  KernelBuilder& jal(uint8_t rd, const std::string& target);
  KernelBuilder& jalr(uint8_t rd, uint8_t rs1, int32_t imm);
  KernelBuilder& fence();

  KernelBuilder& csrrw(uint8_t rd, uint16_t csr, uint8_t rs1);
  KernelBuilder& csrrs(uint8_t rd, uint16_t csr, uint8_t rs1);

  KernelBuilder& fpr(Op op, uint8_t rd, uint8_t rs1, uint8_t rs2,
                     uint8_t rs3 = 0);

  KernelBuilder& wspawn(uint8_t rs_count, uint8_t rs_pc);
  KernelBuilder& tmc(uint8_t rs1);
  KernelBuilder& split(uint8_t rs1);
  KernelBuilder& join();
  KernelBuilder& bar(uint8_t rs_id, uint8_t rs_count);
  KernelBuilder& tex(uint8_t rd, uint8_t rs_u, uint8_t rs_v, uint8_t rs_lod,
                     uint8_t stage = 0);

  std::vector<uint8_t> build();   // resolves label fixups
  KernelImage image();
  uint32_t base() const { return base_; }

 private:
  struct Fixup {
    size_t index;
    std::string label;
    bool is_jal;
  };
  uint32_t base_;
  std::vector<uint32_t> words_;
  std::map<std::string, uint32_t> labels_;  // byte addresses
  std::vector<Fixup> fixups_;
};

}  // namespace gpusim::test
