#include "isa.hpp"

#include <array>
#include <cstdio>

namespace gpusim {

namespace {

constexpr uint32_t bits(uint32_t w, int hi, int lo) {
  return (w >> lo) & ((1u << (hi - lo + 1)) - 1);
}

constexpr int32_t sext(uint32_t v, int width) {
  uint32_t m = 1u << (width - 1);
  return static_cast<int32_t>((v ^ m) - m);
}

constexpr uint32_t kOpLui = 0x37, kOpAuipc = 0x17, kOpJal = 0x6F,
                   kOpJalr = 0x67, kOpBranch = 0x63, kOpLoad = 0x03,
                   kOpStore = 0x23, kOpImm = 0x13, kOpReg = 0x33,
                   kOpFence = 0x0F, kOpSystem = 0x73, kOpLoadFp = 0x07,
                   kOpStoreFp = 0x27, kOpFp = 0x53, kOpFmadd = 0x43,
                   kOpFmsub = 0x47;

struct Fields {
  uint32_t opcode, rd, funct3, rs1, rs2, funct7, rs3, funct2;
};

Fields split_fields(uint32_t w) {
  return Fields{bits(w, 6, 0),   bits(w, 11, 7),  bits(w, 14, 12),
                bits(w, 19, 15), bits(w, 24, 20), bits(w, 31, 25),
                bits(w, 31, 27), bits(w, 26, 25)};
}

int32_t imm_i(uint32_t w) { return sext(bits(w, 31, 20), 12); }
int32_t imm_s(uint32_t w) {
  return sext((bits(w, 31, 25) << 5) | bits(w, 11, 7), 12);
}
int32_t imm_b(uint32_t w) {
  uint32_t v = (bits(w, 31, 31) << 12) | (bits(w, 7, 7) << 11) |
               (bits(w, 30, 25) << 5) | (bits(w, 11, 8) << 1);
  return sext(v, 13);
}
int32_t imm_j(uint32_t w) {
  uint32_t v = (bits(w, 31, 31) << 20) | (bits(w, 19, 12) << 12) |
               (bits(w, 20, 20) << 11) | (bits(w, 30, 21) << 1);
  return sext(v, 21);
}

bool valid_rm(uint32_t rm) { return rm <= 4 || rm == 7; }

Instruction make(InstrKind kind, Op op) {
  Instruction i;
  i.kind = kind;
  i.op = op;
  return i;
}

}  // namespace

std::optional<Instruction> decode(uint32_t word) {
  const Fields f = split_fields(word);
  switch (f.opcode) {
    case kOpLui:
    case kOpAuipc: {
      Instruction i = make(InstrKind::BaseAlu, f.opcode == kOpLui ? Op::Lui : Op::Auipc);
      i.rd = f.rd;
      i.imm = static_cast<int32_t>(word & 0xFFFFF000u);
      return i;
    }
    case kOpJal: {
      Instruction i = make(InstrKind::Jump, Op::Jal);
      i.rd = f.rd;
      i.imm = imm_j(word);
      return i;
    }
    case kOpJalr: {
      if (f.funct3 != 0) return std::nullopt;
      Instruction i = make(InstrKind::Jump, Op::Jalr);
      i.rd = f.rd;
      i.rs1 = f.rs1;
      i.imm = imm_i(word);
      return i;
    }
    case kOpBranch: {
      static constexpr std::array<std::optional<Op>, 8> ops = {
          Op::Beq, Op::Bne, std::nullopt, std::nullopt,
          Op::Blt, Op::Bge, Op::Bltu,    Op::Bgeu};
      if (!ops[f.funct3]) return std::nullopt;
      Instruction i = make(InstrKind::Branch, *ops[f.funct3]);
      i.rs1 = f.rs1;
      i.rs2 = f.rs2;
      i.imm = imm_b(word);
      return i;
    }
    case kOpLoad: {
      static constexpr std::array<std::optional<Op>, 8> ops = {
          Op::Lb, Op::Lh, Op::Lw, std::nullopt,
          Op::Lbu, Op::Lhu, std::nullopt, std::nullopt};
      if (!ops[f.funct3]) return std::nullopt;
      Instruction i = make(InstrKind::Load, *ops[f.funct3]);
      i.rd = f.rd;
      i.rs1 = f.rs1;
      i.imm = imm_i(word);
      return i;
    }
    case kOpStore: {
      static constexpr std::array<std::optional<Op>, 8> ops = {
          Op::Sb, Op::Sh, Op::Sw, std::nullopt,
          std::nullopt, std::nullopt, std::nullopt, std::nullopt};
      if (!ops[f.funct3]) return std::nullopt;
      Instruction i = make(InstrKind::Store, *ops[f.funct3]);
      i.rs1 = f.rs1;
      i.rs2 = f.rs2;
      i.imm = imm_s(word);
      return i;
    }
    case kOpImm: {
      Instruction i = make(InstrKind::BaseAlu, Op::Addi);
      i.rd = f.rd;
      i.rs1 = f.rs1;
      switch (f.funct3) {
        case 0: i.op = Op::Addi; i.imm = imm_i(word); return i;
        case 2: i.op = Op::Slti; i.imm = imm_i(word); return i;
        case 3: i.op = Op::Sltiu; i.imm = imm_i(word); return i;
        case 4: i.op = Op::Xori; i.imm = imm_i(word); return i;
        case 6: i.op = Op::Ori; i.imm = imm_i(word); return i;
        case 7: i.op = Op::Andi; i.imm = imm_i(word); return i;
        case 1:
          if (f.funct7 != 0) return std::nullopt;
          i.op = Op::Slli;
          i.imm = static_cast<int32_t>(f.rs2);
          return i;
        case 5:
          if (f.funct7 == 0x00) i.op = Op::Srli;
          else if (f.funct7 == 0x20) i.op = Op::Srai;
          else return std::nullopt;
          i.imm = static_cast<int32_t>(f.rs2);
          return i;
      }
      return std::nullopt;
    }
    case kOpReg: {
      Instruction i = make(InstrKind::BaseAlu, Op::Add);
      i.rd = f.rd;
      i.rs1 = f.rs1;
      i.rs2 = f.rs2;
      if (f.funct7 == 0x01) {
        static constexpr std::array<Op, 8> ops = {Op::Mul,  Op::Mulh,
                                                  Op::Mulhsu, Op::Mulhu,
                                                  Op::Div,  Op::Divu,
                                                  Op::Rem,  Op::Remu};
        i.kind = InstrKind::MulDiv;
        i.op = ops[f.funct3];
        return i;
      }
      if (f.funct7 == 0x00) {
        static constexpr std::array<Op, 8> ops = {Op::Add, Op::Sll, Op::Slt,
                                                  Op::Sltu, Op::Xor, Op::Srl,
                                                  Op::Or,  Op::And};
        i.op = ops[f.funct3];
        return i;
      }
      if (f.funct7 == 0x20) {
        if (f.funct3 == 0) { i.op = Op::Sub; return i; }
        if (f.funct3 == 5) { i.op = Op::Sra; return i; }
        return std::nullopt;
      }
      return std::nullopt;
    }
    case kOpFence: {
      if (f.funct3 != 0) return std::nullopt;
      Instruction i = make(InstrKind::BaseAlu, Op::Fence);
      i.rd = f.rd;
      i.rs1 = f.rs1;
      i.imm = static_cast<int32_t>(bits(word, 31, 20));
      return i;
    }
    case kOpSystem: {
      static constexpr std::array<std::optional<Op>, 8> ops = {
          std::nullopt, Op::Csrrw, Op::Csrrs, Op::Csrrc,
          std::nullopt, Op::Csrrwi, Op::Csrrsi, Op::Csrrci};
      if (!ops[f.funct3]) return std::nullopt;
      Instruction i = make(InstrKind::Csr, *ops[f.funct3]);
      i.rd = f.rd;
      i.rs1 = f.rs1;  // register index or zimm
      i.csr = static_cast<uint16_t>(bits(word, 31, 20));
      return i;
    }
    case kOpLoadFp: {
      if (f.funct3 != 2) return std::nullopt;
      Instruction i = make(InstrKind::Load, Op::Flw);
      i.rd = f.rd;
      i.rs1 = f.rs1;
      i.imm = imm_i(word);
      return i;
    }
    case kOpStoreFp: {
      if (f.funct3 != 2) return std::nullopt;
      Instruction i = make(InstrKind::Store, Op::Fsw);
      i.rs1 = f.rs1;
      i.rs2 = f.rs2;
      i.imm = imm_s(word);
      return i;
    }
    case kOpFp: {
      Instruction i = make(InstrKind::Fp, Op::FaddS);
      i.rd = f.rd;
      i.rs1 = f.rs1;
      i.rs2 = f.rs2;
      switch (f.funct7) {
        case 0x00: case 0x04: case 0x08: case 0x0C: {
          if (!valid_rm(f.funct3)) return std::nullopt;
          static constexpr std::array<Op, 4> ops = {Op::FaddS, Op::FsubS,
                                                    Op::FmulS, Op::FdivS};
          i.op = ops[f.funct7 >> 2];
          i.rm = static_cast<uint8_t>(f.funct3);
          return i;
        }
        case 0x2C:
          if (f.rs2 != 0 || !valid_rm(f.funct3)) return std::nullopt;
          i.op = Op::FsqrtS;
          i.rs2 = 0;
          i.rm = static_cast<uint8_t>(f.funct3);
          return i;
        case 0x14:
          if (f.funct3 == 0) { i.op = Op::FminS; return i; }
          if (f.funct3 == 1) { i.op = Op::FmaxS; return i; }
          return std::nullopt;
        case 0x50:
          if (f.funct3 == 2) { i.op = Op::FeqS; return i; }
          if (f.funct3 == 1) { i.op = Op::FltS; return i; }
          if (f.funct3 == 0) { i.op = Op::FleS; return i; }
          return std::nullopt;
        case 0x60:
          if (f.rs2 > 1 || !valid_rm(f.funct3)) return std::nullopt;
          i.op = f.rs2 == 0 ? Op::FcvtWS : Op::FcvtWUS;
          i.rs2 = 0;  // selector lives in the op, not the register field
          i.rm = static_cast<uint8_t>(f.funct3);
          return i;
        case 0x68:
          if (f.rs2 > 1 || !valid_rm(f.funct3)) return std::nullopt;
          i.op = f.rs2 == 0 ? Op::FcvtSW : Op::FcvtSWU;
          i.rs2 = 0;
          i.rm = static_cast<uint8_t>(f.funct3);
          return i;
      }
      return std::nullopt;
    }
    case kOpFmadd:
    case kOpFmsub: {
      if (f.funct2 != 0 || !valid_rm(f.funct3)) return std::nullopt;
      Instruction i = make(InstrKind::Fp,
                           f.opcode == kOpFmadd ? Op::FmaddS : Op::FmsubS);
      i.rd = f.rd;
      i.rs1 = f.rs1;
      i.rs2 = f.rs2;
      i.rs3 = static_cast<uint8_t>(f.rs3);
      i.rm = static_cast<uint8_t>(f.funct3);
      return i;
    }
    case kExtOpcode: {
      if (f.funct3 != 0) return std::nullopt;
      Instruction i = make(InstrKind::Ext, Op::Join);
      switch (f.funct7) {
        case kExtFunctTmc:
          if (f.rd != 0 || f.rs2 != 0) return std::nullopt;
          i.op = Op::Tmc;
          i.rs1 = f.rs1;
          return i;
        case kExtFunctWspawn:
          if (f.rd != 0) return std::nullopt;
          i.op = Op::Wspawn;
          i.rs1 = f.rs1;
          i.rs2 = f.rs2;
          return i;
        case kExtFunctSplit:
          if (f.rd != 0 || f.rs2 != 0) return std::nullopt;
          i.op = Op::Split;
          i.rs1 = f.rs1;
          return i;
        case kExtFunctJoin:
          if (f.rd != 0 || f.rs1 != 0 || f.rs2 != 0) return std::nullopt;
          i.op = Op::Join;
          return i;
        case kExtFunctBar:
          if (f.rd != 0) return std::nullopt;
          i.op = Op::Bar;
          i.rs1 = f.rs1;
          i.rs2 = f.rs2;
          return i;
      }
      return std::nullopt;
    }
    case kTexOpcode: {
      if (f.funct2 != 0) return std::nullopt;
      Instruction i = make(InstrKind::Ext, Op::Tex);
      i.rd = f.rd;
      i.rs1 = f.rs1;
      i.rs2 = f.rs2;
      i.rs3 = static_cast<uint8_t>(f.rs3);
      i.imm = static_cast<int32_t>(f.funct3);  // sampler stage
      return i;
    }
  }
  return std::nullopt;
}

namespace {

uint32_t enc_r(uint32_t opcode, uint32_t funct3, uint32_t funct7,
               uint32_t rd, uint32_t rs1, uint32_t rs2) {
  return (funct7 << 25) | (rs2 << 20) | (rs1 << 15) | (funct3 << 12) |
         (rd << 7) | opcode;
}

uint32_t enc_i(uint32_t opcode, uint32_t funct3, uint32_t rd, uint32_t rs1,
               uint32_t imm12) {
  return ((imm12 & 0xFFF) << 20) | (rs1 << 15) | (funct3 << 12) | (rd << 7) |
         opcode;
}

uint32_t enc_s(uint32_t opcode, uint32_t funct3, uint32_t rs1, uint32_t rs2,
               uint32_t imm12) {
  return ((imm12 >> 5 & 0x7F) << 25) | (rs2 << 20) | (rs1 << 15) |
         (funct3 << 12) | ((imm12 & 0x1F) << 7) | opcode;
}

uint32_t enc_b(uint32_t opcode, uint32_t funct3, uint32_t rs1, uint32_t rs2,
               uint32_t imm) {
  return ((imm >> 12 & 1) << 31) | ((imm >> 5 & 0x3F) << 25) | (rs2 << 20) |
         (rs1 << 15) | (funct3 << 12) | ((imm >> 1 & 0xF) << 8) |
         ((imm >> 11 & 1) << 7) | opcode;
}

uint32_t enc_j(uint32_t opcode, uint32_t rd, uint32_t imm) {
  return ((imm >> 20 & 1) << 31) | ((imm >> 1 & 0x3FF) << 21) |
         ((imm >> 11 & 1) << 20) | ((imm >> 12 & 0xFF) << 12) | (rd << 7) |
         opcode;
}

uint32_t enc_r4(uint32_t opcode, uint32_t funct3, uint32_t rd, uint32_t rs1,
                uint32_t rs2, uint32_t rs3) {
  return (rs3 << 27) | (rs2 << 20) | (rs1 << 15) | (funct3 << 12) |
         (rd << 7) | opcode;
}

bool fits_simm(int32_t v, int width) {
  int32_t lo = -(1 << (width - 1));
  int32_t hi = (1 << (width - 1)) - 1;
  return v >= lo && v <= hi;
}

}  // namespace

std::optional<uint32_t> encode(const Instruction& in) {
  if (in.rd > 31 || in.rs1 > 31 || in.rs2 > 31 || in.rs3 > 31)
    return std::nullopt;
  const uint32_t rd = in.rd, rs1 = in.rs1, rs2 = in.rs2, rs3 = in.rs3;
  const uint32_t uimm = static_cast<uint32_t>(in.imm);
  switch (in.op) {
    case Op::Lui:
    case Op::Auipc:
      if (uimm & 0xFFF) return std::nullopt;
      return (uimm & 0xFFFFF000u) | (rd << 7) |
             (in.op == Op::Lui ? kOpLui : kOpAuipc);
    case Op::Jal:
      if (!fits_simm(in.imm, 21) || (in.imm & 1)) return std::nullopt;
      return enc_j(kOpJal, rd, uimm);
    case Op::Jalr:
      if (!fits_simm(in.imm, 12)) return std::nullopt;
      return enc_i(kOpJalr, 0, rd, rs1, uimm);
    case Op::Beq: case Op::Bne: case Op::Blt:
    case Op::Bge: case Op::Bltu: case Op::Bgeu: {
      if (!fits_simm(in.imm, 13) || (in.imm & 1)) return std::nullopt;
      uint32_t f3 = in.op == Op::Beq ? 0 : in.op == Op::Bne ? 1
                  : in.op == Op::Blt ? 4 : in.op == Op::Bge ? 5
                  : in.op == Op::Bltu ? 6 : 7;
      return enc_b(kOpBranch, f3, rs1, rs2, uimm);
    }
    case Op::Lb: case Op::Lh: case Op::Lw: case Op::Lbu: case Op::Lhu: {
      if (!fits_simm(in.imm, 12)) return std::nullopt;
      uint32_t f3 = in.op == Op::Lb ? 0 : in.op == Op::Lh ? 1
                  : in.op == Op::Lw ? 2 : in.op == Op::Lbu ? 4 : 5;
      return enc_i(kOpLoad, f3, rd, rs1, uimm);
    }
    case Op::Sb: case Op::Sh: case Op::Sw: {
      if (!fits_simm(in.imm, 12)) return std::nullopt;
      uint32_t f3 = in.op == Op::Sb ? 0 : in.op == Op::Sh ? 1 : 2;
      return enc_s(kOpStore, f3, rs1, rs2, uimm);
    }
    case Op::Addi: case Op::Slti: case Op::Sltiu:
    case Op::Xori: case Op::Ori: case Op::Andi: {
      if (!fits_simm(in.imm, 12)) return std::nullopt;
      uint32_t f3 = in.op == Op::Addi ? 0 : in.op == Op::Slti ? 2
                  : in.op == Op::Sltiu ? 3 : in.op == Op::Xori ? 4
                  : in.op == Op::Ori ? 6 : 7;
      return enc_i(kOpImm, f3, rd, rs1, uimm);
    }
    case Op::Slli: case Op::Srli: case Op::Srai: {
      if (in.imm < 0 || in.imm > 31) return std::nullopt;
      uint32_t f3 = in.op == Op::Slli ? 1 : 5;
      uint32_t f7 = in.op == Op::Srai ? 0x20 : 0x00;
      return enc_r(kOpImm, f3, f7, rd, rs1, uimm);
    }
    case Op::Add: case Op::Sub: case Op::Sll: case Op::Slt: case Op::Sltu:
    case Op::Xor: case Op::Srl: case Op::Sra: case Op::Or: case Op::And: {
      uint32_t f3, f7 = 0;
      switch (in.op) {
        case Op::Add: f3 = 0; break;
        case Op::Sub: f3 = 0; f7 = 0x20; break;
        case Op::Sll: f3 = 1; break;
        case Op::Slt: f3 = 2; break;
        case Op::Sltu: f3 = 3; break;
        case Op::Xor: f3 = 4; break;
        case Op::Srl: f3 = 5; break;
        case Op::Sra: f3 = 5; f7 = 0x20; break;
        case Op::Or: f3 = 6; break;
        default: f3 = 7; break;
      }
      return enc_r(kOpReg, f3, f7, rd, rs1, rs2);
    }
    case Op::Fence:
      if (uimm > 0xFFF) return std::nullopt;
      return enc_i(kOpFence, 0, rd, rs1, uimm);
    case Op::Csrrw: case Op::Csrrs: case Op::Csrrc:
    case Op::Csrrwi: case Op::Csrrsi: case Op::Csrrci: {
      if (in.csr > 0xFFF) return std::nullopt;
      uint32_t f3 = in.op == Op::Csrrw ? 1 : in.op == Op::Csrrs ? 2
                  : in.op == Op::Csrrc ? 3 : in.op == Op::Csrrwi ? 5
                  : in.op == Op::Csrrsi ? 6 : 7;
      return enc_i(kOpSystem, f3, rd, rs1, in.csr);
    }
    case Op::Mul: case Op::Mulh: case Op::Mulhsu: case Op::Mulhu:
    case Op::Div: case Op::Divu: case Op::Rem: case Op::Remu: {
      uint32_t f3 = static_cast<uint32_t>(in.op) - static_cast<uint32_t>(Op::Mul);
      return enc_r(kOpReg, f3, 0x01, rd, rs1, rs2);
    }
    case Op::Flw:
      if (!fits_simm(in.imm, 12)) return std::nullopt;
      return enc_i(kOpLoadFp, 2, rd, rs1, uimm);
    case Op::Fsw:
      if (!fits_simm(in.imm, 12)) return std::nullopt;
      return enc_s(kOpStoreFp, 2, rs1, rs2, uimm);
    case Op::FaddS: case Op::FsubS: case Op::FmulS: case Op::FdivS: {
      if (!valid_rm(in.rm)) return std::nullopt;
      uint32_t f7 = in.op == Op::FaddS ? 0x00 : in.op == Op::FsubS ? 0x04
                  : in.op == Op::FmulS ? 0x08 : 0x0C;
      return enc_r(kOpFp, in.rm, f7, rd, rs1, rs2);
    }
    case Op::FsqrtS:
      if (!valid_rm(in.rm) || in.rs2 != 0) return std::nullopt;
      return enc_r(kOpFp, in.rm, 0x2C, rd, rs1, 0);
    case Op::FminS:
      return enc_r(kOpFp, 0, 0x14, rd, rs1, rs2);
    case Op::FmaxS:
      return enc_r(kOpFp, 1, 0x14, rd, rs1, rs2);
    case Op::FeqS:
      return enc_r(kOpFp, 2, 0x50, rd, rs1, rs2);
    case Op::FltS:
      return enc_r(kOpFp, 1, 0x50, rd, rs1, rs2);
    case Op::FleS:
      return enc_r(kOpFp, 0, 0x50, rd, rs1, rs2);
    case Op::FcvtWS:
    case Op::FcvtWUS:
      if (!valid_rm(in.rm)) return std::nullopt;
      return enc_r(kOpFp, in.rm, 0x60, rd, rs1, in.op == Op::FcvtWS ? 0 : 1);
    case Op::FcvtSW:
    case Op::FcvtSWU:
      if (!valid_rm(in.rm)) return std::nullopt;
      return enc_r(kOpFp, in.rm, 0x68, rd, rs1, in.op == Op::FcvtSW ? 0 : 1);
    case Op::FmaddS:
    case Op::FmsubS:
      if (!valid_rm(in.rm)) return std::nullopt;
      return enc_r4(in.op == Op::FmaddS ? kOpFmadd : kOpFmsub, in.rm, rd,
                    rs1, rs2, rs3);
    case Op::Wspawn:
      return enc_r(kExtOpcode, 0, kExtFunctWspawn, 0, rs1, rs2);
    case Op::Tmc:
      return enc_r(kExtOpcode, 0, kExtFunctTmc, 0, rs1, 0);
    case Op::Split:
      return enc_r(kExtOpcode, 0, kExtFunctSplit, 0, rs1, 0);
    case Op::Join:
      return enc_r(kExtOpcode, 0, kExtFunctJoin, 0, 0, 0);
    case Op::Bar:
      return enc_r(kExtOpcode, 0, kExtFunctBar, 0, rs1, rs2);
    case Op::Tex:
      if (in.imm < 0 || in.imm > 7) return std::nullopt;
      return enc_r4(kTexOpcode, uimm & 7, rd, rs1, rs2, rs3);
  }
  return std::nullopt;
}

const char* op_name(Op op) {
  switch (op) {
    case Op::Lui: return "lui";
    case Op::Auipc: return "auipc";
    case Op::Jal: return "jal";
    case Op::Jalr: return "jalr";
    case Op::Beq: return "beq";
    case Op::Bne: return "bne";
    case Op::Blt: return "blt";
    case Op::Bge: return "bge";
    case Op::Bltu: return "bltu";
    case Op::Bgeu: return "bgeu";
    case Op::Lb: return "lb";
    case Op::Lh: return "lh";
    case Op::Lw: return "lw";
    case Op::Lbu: return "lbu";
    case Op::Lhu: return "lhu";
    case Op::Sb: return "sb";
    case Op::Sh: return "sh";
    case Op::Sw: return "sw";
    case Op::Addi: return "addi";
    case Op::Slti: return "slti";
    case Op::Sltiu: return "sltiu";
    case Op::Xori: return "xori";
    case Op::Ori: return "ori";
    case Op::Andi: return "andi";
    case Op::Slli: return "slli";
    case Op::Srli: return "srli";
    case Op::Srai: return "srai";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Sll: return "sll";
    case Op::Slt: return "slt";
    case Op::Sltu: return "sltu";
    case Op::Xor: return "xor";
    case Op::Srl: return "srl";
    case Op::Sra: return "sra";
    case Op::Or: return "or";
    case Op::And: return "and";
    case Op::Fence: return "fence";
    case Op::Csrrw: return "csrrw";
    case Op::Csrrs: return "csrrs";
    case Op::Csrrc: return "csrrc";
    case Op::Csrrwi: return "csrrwi";
    case Op::Csrrsi: return "csrrsi";
    case Op::Csrrci: return "csrrci";
    case Op::Mul: return "mul";
    case Op::Mulh: return "mulh";
    case Op::Mulhsu: return "mulhsu";
    case Op::Mulhu: return "mulhu";
    case Op::Div: return "div";
    case Op::Divu: return "divu";
    case Op::Rem: return "rem";
    case Op::Remu: return "remu";
    case Op::Flw: return "flw";
    case Op::Fsw: return "fsw";
    case Op::FaddS: return "fadd.s";
    case Op::FsubS: return "fsub.s";
    case Op::FmulS: return "fmul.s";
    case Op::FdivS: return "fdiv.s";
    case Op::FsqrtS: return "fsqrt.s";
    case Op::FmaddS: return "fmadd.s";
    case Op::FmsubS: return "fmsub.s";
    case Op::FminS: return "fmin.s";
    case Op::FmaxS: return "fmax.s";
    case Op::FeqS: return "feq.s";
    case Op::FltS: return "flt.s";
    case Op::FleS: return "fle.s";
    case Op::FcvtWS: return "fcvt.w.s";
    case Op::FcvtWUS: return "fcvt.wu.s";
    case Op::FcvtSW: return "fcvt.s.w";
    case Op::FcvtSWU: return "fcvt.s.wu";
    case Op::Wspawn: return "wspawn";
    case Op::Tmc: return "tmc";
    case Op::Split: return "split";
    case Op::Join: return "join";
    case Op::Bar: return "bar";
    case Op::Tex: return "tex";
  }
  return "?";
}

bool writes_freg(Op op) {
  switch (op) {
    case Op::Flw:
    case Op::FaddS: case Op::FsubS: case Op::FmulS: case Op::FdivS:
    case Op::FsqrtS: case Op::FmaddS: case Op::FmsubS:
    case Op::FminS: case Op::FmaxS:
    case Op::FcvtSW: case Op::FcvtSWU:
      return true;
    default:
      return false;
  }
}

bool reads_freg_rs1(Op op) {
  switch (op) {
    case Op::FaddS: case Op::FsubS: case Op::FmulS: case Op::FdivS:
    case Op::FsqrtS: case Op::FmaddS: case Op::FmsubS:
    case Op::FminS: case Op::FmaxS:
    case Op::FeqS: case Op::FltS: case Op::FleS:
    case Op::FcvtWS: case Op::FcvtWUS:
      return true;
    default:
      return false;
  }
}

bool reads_freg_rs2(Op op) {
  switch (op) {
    case Op::Fsw:
    case Op::FaddS: case Op::FsubS: case Op::FmulS: case Op::FdivS:
    case Op::FmaddS: case Op::FmsubS:
    case Op::FminS: case Op::FmaxS:
    case Op::FeqS: case Op::FltS: case Op::FleS:
      return true;
    default:
      return false;
  }
}

std::string disassemble(const Instruction& in) {
  char buf[96];
  const char* n = op_name(in.op);
  switch (in.kind) {
    case InstrKind::BaseAlu:
      if (in.op == Op::Lui || in.op == Op::Auipc) {
        std::snprintf(buf, sizeof buf, "%s x%u, 0x%x", n, in.rd,
                      static_cast<uint32_t>(in.imm) >> 12);
      } else if (in.op == Op::Fence) {
        std::snprintf(buf, sizeof buf, "fence");
      } else if (static_cast<int>(in.op) >= static_cast<int>(Op::Add) &&
                 static_cast<int>(in.op) <= static_cast<int>(Op::And)) {
        std::snprintf(buf, sizeof buf, "%s x%u, x%u, x%u", n, in.rd, in.rs1,
                      in.rs2);
      } else {
        std::snprintf(buf, sizeof buf, "%s x%u, x%u, %d", n, in.rd, in.rs1,
                      in.imm);
      }
      break;
    case InstrKind::MulDiv:
      std::snprintf(buf, sizeof buf, "%s x%u, x%u, x%u", n, in.rd, in.rs1,
                    in.rs2);
      break;
    case InstrKind::Jump:
      if (in.op == Op::Jal)
        std::snprintf(buf, sizeof buf, "jal x%u, %d", in.rd, in.imm);
      else
        std::snprintf(buf, sizeof buf, "jalr x%u, x%u, %d", in.rd, in.rs1,
                      in.imm);
      break;
    case InstrKind::Branch:
      std::snprintf(buf, sizeof buf, "%s x%u, x%u, %d", n, in.rs1, in.rs2,
                    in.imm);
      break;
    case InstrKind::Load:
      std::snprintf(buf, sizeof buf, "%s %s%u, %d(x%u)", n,
                    in.op == Op::Flw ? "f" : "x", in.rd, in.imm, in.rs1);
      break;
    case InstrKind::Store:
      std::snprintf(buf, sizeof buf, "%s %s%u, %d(x%u)", n,
                    in.op == Op::Fsw ? "f" : "x", in.rs2, in.imm, in.rs1);
      break;
    case InstrKind::Csr:
      if (in.op == Op::Csrrwi || in.op == Op::Csrrsi || in.op == Op::Csrrci)
        std::snprintf(buf, sizeof buf, "%s x%u, 0x%x, %u", n, in.rd, in.csr,
                      in.rs1);
      else
        std::snprintf(buf, sizeof buf, "%s x%u, 0x%x, x%u", n, in.rd, in.csr,
                      in.rs1);
      break;
    case InstrKind::Fp:
      switch (in.op) {
        case Op::FsqrtS:
          std::snprintf(buf, sizeof buf, "fsqrt.s f%u, f%u", in.rd, in.rs1);
          break;
        case Op::FmaddS:
        case Op::FmsubS:
          std::snprintf(buf, sizeof buf, "%s f%u, f%u, f%u, f%u", n, in.rd,
                        in.rs1, in.rs2, in.rs3);
          break;
        case Op::FeqS: case Op::FltS: case Op::FleS:
          std::snprintf(buf, sizeof buf, "%s x%u, f%u, f%u", n, in.rd,
                        in.rs1, in.rs2);
          break;
        case Op::FcvtWS: case Op::FcvtWUS:
          std::snprintf(buf, sizeof buf, "%s x%u, f%u", n, in.rd, in.rs1);
          break;
        case Op::FcvtSW: case Op::FcvtSWU:
          std::snprintf(buf, sizeof buf, "%s f%u, x%u", n, in.rd, in.rs1);
          break;
        default:
          std::snprintf(buf, sizeof buf, "%s f%u, f%u, f%u", n, in.rd,
                        in.rs1, in.rs2);
      }
      break;
    case InstrKind::Ext:
      switch (in.op) {
        case Op::Wspawn:
          std::snprintf(buf, sizeof buf, "wspawn x%u, x%u", in.rs1, in.rs2);
          break;
        case Op::Tmc:
          std::snprintf(buf, sizeof buf, "tmc x%u", in.rs1);
          break;
        case Op::Split:
          std::snprintf(buf, sizeof buf, "split x%u", in.rs1);
          break;
        case Op::Join:
          std::snprintf(buf, sizeof buf, "join");
          break;
        case Op::Bar:
          std::snprintf(buf, sizeof buf, "bar x%u, x%u", in.rs1, in.rs2);
          break;
        default:
          std::snprintf(buf, sizeof buf, "tex x%u, x%u, x%u, x%u", in.rd,
                        in.rs1, in.rs2, in.rs3);
      }
      break;
  }
  return buf;
}

}  // namespace gpusim
