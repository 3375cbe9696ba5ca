#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace gpusim {

// Instruction classes. Ext covers the six SIMT/graphics instructions
// (wspawn, tmc, split, join, bar, tex).
enum class InstrKind : uint8_t {
  BaseAlu,
  MulDiv,
  Fp,
  Load,
  Store,
  Branch,
  Jump,
  Csr,
  Ext,
};

enum class Op : uint16_t {
  // RV32I
  Lui, Auipc,
  Jal, Jalr,
  Beq, Bne, Blt, Bge, Bltu, Bgeu,
  Lb, Lh, Lw, Lbu, Lhu,
  Sb, Sh, Sw,
  Addi, Slti, Sltiu, Xori, Ori, Andi, Slli, Srli, Srai,
  Add, Sub, Sll, Slt, Sltu, Xor, Srl, Sra, Or, And,
  Fence,
  Csrrw, Csrrs, Csrrc, Csrrwi, Csrrsi, Csrrci,
  // M
  Mul, Mulh, Mulhsu, Mulhu, Div, Divu, Rem, Remu,
  // F subset
  Flw, Fsw,
  FaddS, FsubS, FmulS, FdivS, FsqrtS,
  FmaddS, FmsubS,
  FminS, FmaxS,
  FeqS, FltS, FleS,
  FcvtWS, FcvtWUS, FcvtSW, FcvtSWU,
  // SIMT extension
  Wspawn, Tmc, Split, Join, Bar, Tex,
};

// One decoded instruction. `imm` carries the immediate where the format has
// one; for Tex it carries the sampler stage index (funct3 field); for Fence
// it carries the raw fm/pred/succ bits. `rm` is the floating-point rounding
// mode field, preserved for re-encoding but always executed as
// round-to-nearest-even.
struct Instruction {
  InstrKind kind = InstrKind::BaseAlu;
  Op op = Op::Add;
  uint8_t rd = 0;
  uint8_t rs1 = 0;
  uint8_t rs2 = 0;
  uint8_t rs3 = 0;
  int32_t imm = 0;
  uint16_t csr = 0;
  uint8_t rm = 0;

  bool operator==(const Instruction&) const = default;
};

// Major opcodes consumed by the extension: one R-type opcode shared by
// wspawn/tmc/split/join/bar, one R4-type opcode for tex.
inline constexpr uint32_t kExtOpcode = 0x0B;   // custom-0
inline constexpr uint32_t kTexOpcode = 0x2B;   // custom-1
inline constexpr uint32_t kExtFunctTmc = 0;
inline constexpr uint32_t kExtFunctWspawn = 1;
inline constexpr uint32_t kExtFunctSplit = 2;
inline constexpr uint32_t kExtFunctJoin = 3;
inline constexpr uint32_t kExtFunctBar = 4;

// Total over all 32-bit words; nullopt means the word is not in the
// supported set and the core raises a fault if it reaches execute.
std::optional<Instruction> decode(uint32_t word);

// Bit-exact inverse of decode on the supported set; nullopt if the
// instruction cannot be represented (bad register index, unsupported op,
// out-of-range immediate).
std::optional<uint32_t> encode(const Instruction& instr);

std::string disassemble(const Instruction& instr);

const char* op_name(Op op);

// True for ops whose destination is an f register.
bool writes_freg(Op op);
// True for ops whose rs1/rs2/rs3 come from f registers (rs1 stays an x
// register for fcvt.s.w[u] and flw/fsw addressing).
bool reads_freg_rs1(Op op);
bool reads_freg_rs2(Op op);

}  // namespace gpusim
