#include "doctest.h"

#include <cstring>
#include <random>
#include <vector>

#include "isa.hpp"

using namespace gpusim;

namespace {

// Reference encodings produced by an independent RISC-V assembler
// (clang -target riscv32 -march=rv32imf) and frozen here.
struct RefVec {
  uint32_t word;
  const char* asm_text;
};

const RefVec kRefVectors[] = {
    {0xFFFFF0B7u, "lui x1, 0xfffff"},
    {0x12345FB7u, "lui x31, 0x12345"},
    {0x00001037u, "lui x0, 1"},
    {0x00800397u, "auipc x7, 0x800"},
    {0x00000097u, "auipc x1, 0"},
    {0x001000EFu, "jal x1, 2048"},
    {0xFFDFF06Fu, "jal x0, -4"},
    {0x7FFFF2EFu, "jal x5, 1048574"},
    {0xFFC100E7u, "jalr x1, x2, -4"},
    {0x00008067u, "jalr x0, x1, 0"},
    {0x7FFA07E7u, "jalr x15, x20, 2047"},
    {0x04208063u, "beq x1, x2, 64"},
    {0xFC4190E3u, "bne x3, x4, -64"},
    {0x7E62CFE3u, "blt x5, x6, 4094"},
    {0x8083D063u, "bge x7, x8, -4096"},
    {0x00A4E463u, "bltu x9, x10, 8"},
    {0xFEC5FCE3u, "bgeu x11, x12, -8"},
    {0x00010083u, "lb x1, 0(x2)"},
    {0xFFF21183u, "lh x3, -1(x4)"},
    {0xFF832283u, "lw x5, -8(x6)"},
    {0x7FF32283u, "lw x5, 2047(x6)"},
    {0x00A44383u, "lbu x7, 10(x8)"},
    {0x80055483u, "lhu x9, -2048(x10)"},
    {0x001102A3u, "sb x1, 5(x2)"},
    {0xFE321D23u, "sh x3, -6(x4)"},
    {0x40532023u, "sw x5, 1024(x6)"},
    {0x800FA023u, "sw x0, -2048(x31)"},
    {0xFFF10093u, "addi x1, x2, -1"},
    {0x02A00293u, "addi x5, x0, 42"},
    {0xF9C22193u, "slti x3, x4, -100"},
    {0x7FF33293u, "sltiu x5, x6, 2047"},
    {0xFFF44393u, "xori x7, x8, -1"},
    {0x0FF56493u, "ori x9, x10, 255"},
    {0x00F67593u, "andi x11, x12, 15"},
    {0x00011093u, "slli x1, x2, 0"},
    {0x01F21193u, "slli x3, x4, 31"},
    {0x00135293u, "srli x5, x6, 1"},
    {0x41E45393u, "srai x7, x8, 30"},
    {0x003100B3u, "add x1, x2, x3"},
    {0x40628233u, "sub x4, x5, x6"},
    {0x009413B3u, "sll x7, x8, x9"},
    {0x00C5A533u, "slt x10, x11, x12"},
    {0x00F736B3u, "sltu x13, x14, x15"},
    {0x0128C833u, "xor x16, x17, x18"},
    {0x015A59B3u, "srl x19, x20, x21"},
    {0x418BDB33u, "sra x22, x23, x24"},
    {0x01BD6CB3u, "or x25, x26, x27"},
    {0x01EEFE33u, "and x28, x29, x30"},
    {0x0FF0000Fu, "fence"},
    {0x0330000Fu, "fence rw, rw"},
    {0x0210000Fu, "fence r, w"},
    {0xCC0110F3u, "csrrw x1, 0xcc0, x2"},
    {0x7C0221F3u, "csrrs x3, 0x7c0, x4"},
    {0x340332F3u, "csrrc x5, 0x340, x6"},
    {0xCC1FD3F3u, "csrrwi x7, 0xcc1, 31"},
    {0xCC2064F3u, "csrrsi x9, 0xcc2, 0"},
    {0x7C17F5F3u, "csrrci x11, 0x7c1, 15"},
    {0xCC602673u, "csrrs x12, 0xcc6, x0"},
    {0x023100B3u, "mul x1, x2, x3"},
    {0x02629233u, "mulh x4, x5, x6"},
    {0x029423B3u, "mulhsu x7, x8, x9"},
    {0x02C5B533u, "mulhu x10, x11, x12"},
    {0x02F746B3u, "div x13, x14, x15"},
    {0x0328D833u, "divu x16, x17, x18"},
    {0x035A69B3u, "rem x19, x20, x21"},
    {0x038BFB33u, "remu x22, x23, x24"},
    {0x00812087u, "flw f1, 8(x2)"},
    {0xFFC1AF87u, "flw f31, -4(x3)"},
    {0x0042A627u, "fsw f4, 12(x5)"},
    {0xFE032827u, "fsw f0, -16(x6)"},
    {0x003170D3u, "fadd.s f1, f2, f3"},
    {0x003110D3u, "fadd.s f1, f2, f3, rtz"},
    {0x0862F253u, "fsub.s f4, f5, f6"},
    {0x109473D3u, "fmul.s f7, f8, f9"},
    {0x109433D3u, "fmul.s f7, f8, f9, rup"},
    {0x18C5F553u, "fdiv.s f10, f11, f12"},
    {0x580776D3u, "fsqrt.s f13, f14"},
    {0x580746D3u, "fsqrt.s f13, f14, rmm"},
    {0x291807D3u, "fmin.s f15, f16, f17"},
    {0x29499953u, "fmax.s f18, f19, f20"},
    {0xA03120D3u, "feq.s x1, f2, f3"},
    {0xA0629253u, "flt.s x4, f5, f6"},
    {0xA09403D3u, "fle.s x7, f8, f9"},
    {0xC00170D3u, "fcvt.w.s x1, f2"},
    {0xC00110D3u, "fcvt.w.s x1, f2, rtz"},
    {0xC01271D3u, "fcvt.wu.s x3, f4"},
    {0xD00372D3u, "fcvt.s.w f5, x6"},
    {0xD01473D3u, "fcvt.s.wu f7, x8"},
    {0x203170C3u, "fmadd.s f1, f2, f3, f4"},
    {0x203110C3u, "fmadd.s f1, f2, f3, f4, rtz"},
    {0x407372C7u, "fmsub.s f5, f6, f7, f8"},
};

std::string mnemonic_of(const char* asm_text) {
  std::string s(asm_text);
  auto sp = s.find(' ');
  return sp == std::string::npos ? s : s.substr(0, sp);
}

// Random instruction with only the fields its format uses populated, so
// decode(encode(i)) == i can hold exactly.
Instruction random_instr(std::mt19937& rng) {
  static const Op all_ops[] = {
      Op::Lui, Op::Auipc, Op::Jal, Op::Jalr,
      Op::Beq, Op::Bne, Op::Blt, Op::Bge, Op::Bltu, Op::Bgeu,
      Op::Lb, Op::Lh, Op::Lw, Op::Lbu, Op::Lhu,
      Op::Sb, Op::Sh, Op::Sw,
      Op::Addi, Op::Slti, Op::Sltiu, Op::Xori, Op::Ori, Op::Andi,
      Op::Slli, Op::Srli, Op::Srai,
      Op::Add, Op::Sub, Op::Sll, Op::Slt, Op::Sltu, Op::Xor, Op::Srl,
      Op::Sra, Op::Or, Op::And, Op::Fence,
      Op::Csrrw, Op::Csrrs, Op::Csrrc, Op::Csrrwi, Op::Csrrsi, Op::Csrrci,
      Op::Mul, Op::Mulh, Op::Mulhsu, Op::Mulhu, Op::Div, Op::Divu,
      Op::Rem, Op::Remu,
      Op::Flw, Op::Fsw,
      Op::FaddS, Op::FsubS, Op::FmulS, Op::FdivS, Op::FsqrtS,
      Op::FmaddS, Op::FmsubS, Op::FminS, Op::FmaxS,
      Op::FeqS, Op::FltS, Op::FleS,
      Op::FcvtWS, Op::FcvtWUS, Op::FcvtSW, Op::FcvtSWU,
      Op::Wspawn, Op::Tmc, Op::Split, Op::Join, Op::Bar, Op::Tex,
  };
  auto reg = [&] { return static_cast<uint8_t>(rng() % 32); };
  auto simm = [&](int width) {
    return static_cast<int32_t>(rng() % (1u << width)) -
           (1 << (width - 1));
  };
  static const uint8_t rms[] = {0, 1, 2, 3, 4, 7};
  Op op = all_ops[rng() % std::size(all_ops)];
  Instruction i;
  i.op = op;
  switch (op) {
    case Op::Lui: case Op::Auipc:
      i.kind = InstrKind::BaseAlu;
      i.rd = reg();
      i.imm = static_cast<int32_t>(rng() << 12);
      break;
    case Op::Jal:
      i.kind = InstrKind::Jump;
      i.rd = reg();
      i.imm = simm(21) & ~1;
      break;
    case Op::Jalr:
      i.kind = InstrKind::Jump;
      i.rd = reg(); i.rs1 = reg(); i.imm = simm(12);
      break;
    case Op::Beq: case Op::Bne: case Op::Blt:
    case Op::Bge: case Op::Bltu: case Op::Bgeu:
      i.kind = InstrKind::Branch;
      i.rs1 = reg(); i.rs2 = reg(); i.imm = simm(13) & ~1;
      break;
    case Op::Lb: case Op::Lh: case Op::Lw: case Op::Lbu: case Op::Lhu:
      i.kind = InstrKind::Load;
      i.rd = reg(); i.rs1 = reg(); i.imm = simm(12);
      break;
    case Op::Flw:
      i.kind = InstrKind::Load;
      i.rd = reg(); i.rs1 = reg(); i.imm = simm(12);
      break;
    case Op::Sb: case Op::Sh: case Op::Sw: case Op::Fsw:
      i.kind = InstrKind::Store;
      i.rs1 = reg(); i.rs2 = reg(); i.imm = simm(12);
      break;
    case Op::Addi: case Op::Slti: case Op::Sltiu:
    case Op::Xori: case Op::Ori: case Op::Andi:
      i.kind = InstrKind::BaseAlu;
      i.rd = reg(); i.rs1 = reg(); i.imm = simm(12);
      break;
    case Op::Slli: case Op::Srli: case Op::Srai:
      i.kind = InstrKind::BaseAlu;
      i.rd = reg(); i.rs1 = reg(); i.imm = static_cast<int32_t>(rng() % 32);
      break;
    case Op::Fence:
      i.kind = InstrKind::BaseAlu;
      i.rd = reg(); i.rs1 = reg();
      i.imm = static_cast<int32_t>(rng() % 4096);
      break;
    case Op::Csrrw: case Op::Csrrs: case Op::Csrrc:
    case Op::Csrrwi: case Op::Csrrsi: case Op::Csrrci:
      i.kind = InstrKind::Csr;
      i.rd = reg(); i.rs1 = reg();
      i.csr = static_cast<uint16_t>(rng() % 4096);
      break;
    case Op::Mul: case Op::Mulh: case Op::Mulhsu: case Op::Mulhu:
    case Op::Div: case Op::Divu: case Op::Rem: case Op::Remu:
      i.kind = InstrKind::MulDiv;
      i.rd = reg(); i.rs1 = reg(); i.rs2 = reg();
      break;
    case Op::FsqrtS:
      i.kind = InstrKind::Fp;
      i.rd = reg(); i.rs1 = reg(); i.rm = rms[rng() % 6];
      break;
    case Op::FcvtWS: case Op::FcvtWUS: case Op::FcvtSW: case Op::FcvtSWU:
      i.kind = InstrKind::Fp;
      i.rd = reg(); i.rs1 = reg(); i.rm = rms[rng() % 6];
      break;
    case Op::FmaddS: case Op::FmsubS:
      i.kind = InstrKind::Fp;
      i.rd = reg(); i.rs1 = reg(); i.rs2 = reg(); i.rs3 = reg();
      i.rm = rms[rng() % 6];
      break;
    case Op::FminS: case Op::FmaxS: case Op::FeqS: case Op::FltS:
    case Op::FleS:
      i.kind = InstrKind::Fp;
      i.rd = reg(); i.rs1 = reg(); i.rs2 = reg();
      break;
    case Op::FaddS: case Op::FsubS: case Op::FmulS: case Op::FdivS:
      i.kind = InstrKind::Fp;
      i.rd = reg(); i.rs1 = reg(); i.rs2 = reg(); i.rm = rms[rng() % 6];
      break;
    case Op::Wspawn:
      i.kind = InstrKind::Ext;
      i.rs1 = reg(); i.rs2 = reg();
      break;
    case Op::Tmc: case Op::Split:
      i.kind = InstrKind::Ext;
      i.rs1 = reg();
      break;
    case Op::Join:
      i.kind = InstrKind::Ext;
      break;
    case Op::Bar:
      i.kind = InstrKind::Ext;
      i.rs1 = reg(); i.rs2 = reg();
      break;
    case Op::Tex:
      i.kind = InstrKind::Ext;
      i.rd = reg(); i.rs1 = reg(); i.rs2 = reg(); i.rs3 = reg();
      i.imm = static_cast<int32_t>(rng() % 8);
      break;
    default:
      i.kind = InstrKind::BaseAlu;
      i.rd = reg(); i.rs1 = reg(); i.rs2 = reg();
      break;
  }
  return i;
}

}  // namespace

TEST_CASE("decode matches reference assembler vectors") {
  for (const auto& v : kRefVectors) {
    CAPTURE(v.asm_text);
    auto di = decode(v.word);
    REQUIRE(di.has_value());
    CHECK(mnemonic_of(v.asm_text) == op_name(di->op));
    auto re = encode(*di);
    REQUIRE(re.has_value());
    CHECK(*re == v.word);
  }
}

TEST_CASE("decode field extraction on representative formats") {
  // add x1, x2, x3
  auto add = decode(0x003100B3u);
  REQUIRE(add);
  CHECK(add->kind == InstrKind::BaseAlu);
  CHECK(add->op == Op::Add);
  CHECK(add->rd == 1);
  CHECK(add->rs1 == 2);
  CHECK(add->rs2 == 3);

  // lw x5, -8(x6)
  auto lw = decode(0xFF832283u);
  REQUIRE(lw);
  CHECK(lw->kind == InstrKind::Load);
  CHECK(lw->op == Op::Lw);
  CHECK(lw->rd == 5);
  CHECK(lw->rs1 == 6);
  CHECK(lw->imm == -8);

  // sw x5, 1024(x6)
  auto sw = decode(0x40532023u);
  REQUIRE(sw);
  CHECK(sw->op == Op::Sw);
  CHECK(sw->rs1 == 6);
  CHECK(sw->rs2 == 5);
  CHECK(sw->imm == 1024);

  // bge x7, x8, -4096
  auto bge = decode(0x8083D063u);
  REQUIRE(bge);
  CHECK(bge->op == Op::Bge);
  CHECK(bge->rs1 == 7);
  CHECK(bge->rs2 == 8);
  CHECK(bge->imm == -4096);

  // jal x5, 1048574
  auto jal = decode(0x7FFFF2EFu);
  REQUIRE(jal);
  CHECK(jal->op == Op::Jal);
  CHECK(jal->rd == 5);
  CHECK(jal->imm == 1048574);

  // lui x31, 0x12345
  auto lui = decode(0x12345FB7u);
  REQUIRE(lui);
  CHECK(lui->op == Op::Lui);
  CHECK(lui->rd == 31);
  CHECK(static_cast<uint32_t>(lui->imm) == 0x12345000u);

  // srai x7, x8, 30
  auto srai = decode(0x41E45393u);
  REQUIRE(srai);
  CHECK(srai->op == Op::Srai);
  CHECK(srai->imm == 30);

  // csrrwi x7, 0xcc1, 31
  auto csr = decode(0xCC1FD3F3u);
  REQUIRE(csr);
  CHECK(csr->op == Op::Csrrwi);
  CHECK(csr->rd == 7);
  CHECK(csr->rs1 == 31);
  CHECK(csr->csr == 0xCC1);

  // fmadd.s f1, f2, f3, f4 (dynamic rm = 7)
  auto fma = decode(0x203170C3u);
  REQUIRE(fma);
  CHECK(fma->op == Op::FmaddS);
  CHECK(fma->rd == 1);
  CHECK(fma->rs1 == 2);
  CHECK(fma->rs2 == 3);
  CHECK(fma->rs3 == 4);
  CHECK(fma->rm == 7);

  // fsqrt.s f13, f14, rmm
  auto fsq = decode(0x580746D3u);
  REQUIRE(fsq);
  CHECK(fsq->op == Op::FsqrtS);
  CHECK(fsq->rd == 13);
  CHECK(fsq->rs1 == 14);
  CHECK(fsq->rm == 4);
}

TEST_CASE("extension instruction encodings") {
  // tmc rs1=5 round-trips through its fixed encoding.
  Instruction tmc;
  tmc.kind = InstrKind::Ext;
  tmc.op = Op::Tmc;
  tmc.rs1 = 5;
  auto w = encode(tmc);
  REQUIRE(w);
  CHECK((*w & 0x7F) == kExtOpcode);
  auto d = decode(*w);
  REQUIRE(d);
  CHECK(d->op == Op::Tmc);
  CHECK(d->rs1 == 5);

  // join uses the shared extension opcode with its own funct7.
  Instruction join;
  join.kind = InstrKind::Ext;
  join.op = Op::Join;
  auto jw = encode(join);
  REQUIRE(jw);
  CHECK((*jw & 0x7F) == kExtOpcode);
  CHECK((*jw >> 25) == kExtFunctJoin);

  // tex is R4-type on its own opcode; three sources plus stage in funct3.
  Instruction tex;
  tex.kind = InstrKind::Ext;
  tex.op = Op::Tex;
  tex.rd = 10; tex.rs1 = 11; tex.rs2 = 12; tex.rs3 = 13; tex.imm = 1;
  auto tw = encode(tex);
  REQUIRE(tw);
  CHECK((*tw & 0x7F) == kTexOpcode);
  auto td = decode(*tw);
  REQUIRE(td);
  CHECK(td->rs3 == 13);
  CHECK(td->imm == 1);

  // Extension footprint: the five wavefront-control ops share one major
  // opcode, tex sits alone on another.
  for (Op op : {Op::Wspawn, Op::Tmc, Op::Split, Op::Join, Op::Bar}) {
    Instruction i;
    i.kind = InstrKind::Ext;
    i.op = op;
    i.rs1 = 1; i.rs2 = op == Op::Wspawn || op == Op::Bar ? 2 : 0;
    if (op == Op::Join) i.rs1 = 0;
    auto e = encode(i);
    REQUIRE(e);
    CHECK((*e & 0x7F) == kExtOpcode);
  }
}

TEST_CASE("illegal words") {
  CHECK(!decode(0x00000000u));      // defined illegal in the base ISA
  CHECK(!decode(0xFFFFFFFFu));
  CHECK(!decode(0x00000073u));      // ecall: unsupported system op
  CHECK(!decode(0x00100073u));      // ebreak
  CHECK(!decode(0x0000100Fu));      // fence.i not in the set
  // fsgnj.s (funct7=0x10): outside the implemented subset.
  CHECK(!decode(0x203100D3u));
  // fnmadd opcode not supported.
  CHECK(!decode(0x203170CFu));
  // extension opcode with out-of-range funct7
  CHECK(!decode((31u << 25) | kExtOpcode));
  // extension op with nonzero rd is malformed
  CHECK(!decode((1u << 7) | (kExtFunctJoin << 25) | kExtOpcode));
}

TEST_CASE("unencodable instructions") {
  Instruction i;
  i.kind = InstrKind::Fp;
  i.op = Op::FaddS;
  i.rd = 40;  // register index out of range
  CHECK(!encode(i));

  Instruction b;
  b.kind = InstrKind::Branch;
  b.op = Op::Beq;
  b.imm = 1;  // odd branch offset
  CHECK(!encode(b));

  Instruction big;
  big.kind = InstrKind::Load;
  big.op = Op::Lw;
  big.imm = 4096;  // immediate out of range
  CHECK(!encode(big));

  Instruction badrm;
  badrm.kind = InstrKind::Fp;
  badrm.op = Op::FaddS;
  badrm.rm = 5;  // reserved rounding mode
  CHECK(!encode(badrm));
}

TEST_CASE("round-trip property over random instructions") {
  std::mt19937 rng(0xC0FFEE);
  for (int n = 0; n < 100000; n++) {
    Instruction i = random_instr(rng);
    auto w = encode(i);
    REQUIRE(w.has_value());
    auto d = decode(*w);
    REQUIRE(d.has_value());
    CAPTURE(disassemble(i));
    CHECK(*d == i);
    auto w2 = encode(*d);
    REQUIRE(w2.has_value());
    CHECK(*w2 == *w);  // encode(decode(w)) == w on valid words
  }
}

TEST_CASE("decode is total and consistent on arbitrary words") {
  std::mt19937 rng(1234);
  int valid = 0;
  for (int n = 0; n < 100000; n++) {
    uint32_t w = rng();
    auto d = decode(w);  // must never trap
    if (d) {
      valid++;
      auto re = encode(*d);
      REQUIRE(re.has_value());
      CHECK(*re == w);
    }
  }
  CHECK(valid > 0);
}
