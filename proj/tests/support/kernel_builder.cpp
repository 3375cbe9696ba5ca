#include "kernel_builder.hpp"

#include <stdexcept>

namespace gpusim::test {

KernelBuilder& KernelBuilder::label(const std::string& name) {
  labels_[name] = here();
  return *this;
}

KernelBuilder& KernelBuilder::instr(const Instruction& in) {
  auto w = encode(in);
  if (!w) throw std::runtime_error("unencodable instruction in kernel");
  words_.push_back(*w);
  return *this;
}

KernelBuilder& KernelBuilder::raw(uint32_t word) {
  words_.push_back(word);
  return *this;
}

KernelBuilder& KernelBuilder::alu(Op op, uint8_t rd, uint8_t rs1, uint8_t rs2) {
  Instruction in;
  in.kind = op >= Op::Mul && op <= Op::Remu ? InstrKind::MulDiv
                                            : InstrKind::BaseAlu;
  in.op = op;
  in.rd = rd;
  in.rs1 = rs1;
  in.rs2 = rs2;
  return instr(in);
}

KernelBuilder& KernelBuilder::alui(Op op, uint8_t rd, uint8_t rs1,
                                   int32_t imm) {
  Instruction in;
  in.kind = InstrKind::BaseAlu;
  in.op = op;
  in.rd = rd;
  in.rs1 = rs1;
  in.imm = imm;
  return instr(in);
}

KernelBuilder& KernelBuilder::lui(uint8_t rd, uint32_t imm20) {
  Instruction in;
  in.kind = InstrKind::BaseAlu;
  in.op = Op::Lui;
  in.rd = rd;
  in.imm = static_cast<int32_t>(imm20 << 12);
  return instr(in);
}

KernelBuilder& KernelBuilder::li(uint8_t rd, uint32_t value) {
  int32_t v = static_cast<int32_t>(value);
  if (v >= -2048 && v <= 2047) return alui(Op::Addi, rd, 0, v);
  uint32_t hi = (value + 0x800) & 0xFFFFF000u;
  int32_t lo = static_cast<int32_t>(value - hi);
  Instruction in;
  in.kind = InstrKind::BaseAlu;
  in.op = Op::Lui;
  in.rd = rd;
  in.imm = static_cast<int32_t>(hi);
  instr(in);
  if (lo != 0) alui(Op::Addi, rd, rd, lo);
  return *this;
}

KernelBuilder& KernelBuilder::load(Op op, uint8_t rd, uint8_t rs1,
                                   int32_t imm) {
  Instruction in;
  in.kind = InstrKind::Load;
  in.op = op;
  in.rd = rd;
  in.rs1 = rs1;
  in.imm = imm;
  return instr(in);
}

KernelBuilder& KernelBuilder::store(Op op, uint8_t rs2, uint8_t rs1,
                                    int32_t imm) {
  Instruction in;
  in.kind = InstrKind::Store;
  in.op = op;
  in.rs1 = rs1;
  in.rs2 = rs2;
  in.imm = imm;
  return instr(in);
}

KernelBuilder& KernelBuilder::branch(Op op, uint8_t rs1, uint8_t rs2,
                                     const std::string& target) {
  Instruction in;
  in.kind = InstrKind::Branch;
  in.op = op;
  in.rs1 = rs1;
  in.rs2 = rs2;
  in.imm = 0;
  fixups_.push_back({words_.size(), target, false});
  return instr(in);
}

KernelBuilder& KernelBuilder::jal(uint8_t rd, const std::string& target) {
  Instruction in;
  in.kind = InstrKind::Jump;
  in.op = Op::Jal;
  in.rd = rd;
  in.imm = 0;
  fixups_.push_back({words_.size(), target, true});
  return instr(in);
}

KernelBuilder& KernelBuilder::jalr(uint8_t rd, uint8_t rs1, int32_t imm) {
  Instruction in;
  in.kind = InstrKind::Jump;
  in.op = Op::Jalr;
  in.rd = rd;
  in.rs1 = rs1;
  in.imm = imm;
  return instr(in);
}

KernelBuilder& KernelBuilder::fence() {
  Instruction in;
  in.kind = InstrKind::BaseAlu;
  in.op = Op::Fence;
  in.imm = 0x0FF;
  return instr(in);
}

KernelBuilder& KernelBuilder::csrrw(uint8_t rd, uint16_t csr, uint8_t rs1) {
  Instruction in;
  in.kind = InstrKind::Csr;
  in.op = Op::Csrrw;
  in.rd = rd;
  in.rs1 = rs1;
  in.csr = csr;
  return instr(in);
}

KernelBuilder& KernelBuilder::csrrs(uint8_t rd, uint16_t csr, uint8_t rs1) {
  Instruction in;
  in.kind = InstrKind::Csr;
  in.op = Op::Csrrs;
  in.rd = rd;
  in.rs1 = rs1;
  in.csr = csr;
  return instr(in);
}

KernelBuilder& KernelBuilder::fpr(Op op, uint8_t rd, uint8_t rs1, uint8_t rs2,
                                  uint8_t rs3) {
  Instruction in;
  in.kind = InstrKind::Fp;
  in.op = op;
  in.rd = rd;
  in.rs1 = rs1;
  in.rs2 = rs2;
  in.rs3 = rs3;
  in.rm = 0;
  return instr(in);
}

KernelBuilder& KernelBuilder::wspawn(uint8_t rs_count, uint8_t rs_pc) {
  Instruction in;
  in.kind = InstrKind::Ext;
  in.op = Op::Wspawn;
  in.rs1 = rs_count;
  in.rs2 = rs_pc;
  return instr(in);
}

KernelBuilder& KernelBuilder::tmc(uint8_t rs1) {
  Instruction in;
  in.kind = InstrKind::Ext;
  in.op = Op::Tmc;
  in.rs1 = rs1;
  return instr(in);
}

KernelBuilder& KernelBuilder::split(uint8_t rs1) {
  Instruction in;
  in.kind = InstrKind::Ext;
  in.op = Op::Split;
  in.rs1 = rs1;
  return instr(in);
}

KernelBuilder& KernelBuilder::join() {
  Instruction in;
  in.kind = InstrKind::Ext;
  in.op = Op::Join;
  return instr(in);
}

KernelBuilder& KernelBuilder::bar(uint8_t rs_id, uint8_t rs_count) {
  Instruction in;
  in.kind = InstrKind::Ext;
  in.op = Op::Bar;
  in.rs1 = rs_id;
  in.rs2 = rs_count;
  return instr(in);
}

KernelBuilder& KernelBuilder::tex(uint8_t rd, uint8_t rs_u, uint8_t rs_v,
                                  uint8_t rs_lod, uint8_t stage) {
  Instruction in;
  in.kind = InstrKind::Ext;
  in.op = Op::Tex;
  in.rd = rd;
  in.rs1 = rs_u;
  in.rs2 = rs_v;
  in.rs3 = rs_lod;
  in.imm = stage;
  return instr(in);
}

std::vector<uint8_t> KernelBuilder::build() {
  for (const Fixup& fx : fixups_) {
    auto it = labels_.find(fx.label);
    if (it == labels_.end())
      throw std::runtime_error("undefined label " + fx.label);
    uint32_t instr_addr = base_ + 4 * static_cast<uint32_t>(fx.index);
    int32_t offset = static_cast<int32_t>(it->second - instr_addr);
    auto decoded = decode(words_[fx.index]);
    Instruction in = *decoded;
    in.imm = offset;
    auto w = encode(in);
    if (!w) throw std::runtime_error("branch target out of range");
    words_[fx.index] = *w;
  }
  fixups_.clear();
  std::vector<uint8_t> bytes;
  bytes.reserve(words_.size() * 4);
  for (uint32_t w : words_) {
    bytes.push_back(static_cast<uint8_t>(w));
    bytes.push_back(static_cast<uint8_t>(w >> 8));
    bytes.push_back(static_cast<uint8_t>(w >> 16));
    bytes.push_back(static_cast<uint8_t>(w >> 24));
  }
  return bytes;
}

KernelImage KernelBuilder::image() {
  KernelImage img;
  img.load_base = base_;
  img.entry = base_;
  img.bytes = build();
  return img;
}

}  // namespace gpusim::test
