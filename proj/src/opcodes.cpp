// SPDX-License-Identifier: Apache-2.0
#include "bcv/opcodes.hpp"

#include <array>

namespace bcv {
namespace {

struct OpcodeRow {
  std::string_view name;
  OperandFormat format;
};

using F = OperandFormat;

constexpr std::array<OpcodeRow, kOpcodeCount> kTable = {{
    {"nop", F::None}, {"aconst_null", F::None},
    {"iconst_m1", F::None}, {"iconst_0", F::None}, {"iconst_1", F::None}, {"iconst_2", F::None},
    {"iconst_3", F::None}, {"iconst_4", F::None}, {"iconst_5", F::None},
    {"lconst_0", F::None}, {"lconst_1", F::None},
    {"fconst_0", F::None}, {"fconst_1", F::None}, {"fconst_2", F::None},
    {"dconst_0", F::None}, {"dconst_1", F::None},
    {"bipush", F::Byte}, {"sipush", F::Short},
    {"ldc", F::Ldc}, {"ldc_w", F::LdcWide}, {"ldc2_w", F::LdcWide},
    {"iload", F::Local}, {"lload", F::Local}, {"fload", F::Local}, {"dload", F::Local}, {"aload", F::Local},
    {"iload_0", F::ShortLocal}, {"iload_1", F::ShortLocal}, {"iload_2", F::ShortLocal}, {"iload_3", F::ShortLocal},
    {"lload_0", F::ShortLocal}, {"lload_1", F::ShortLocal}, {"lload_2", F::ShortLocal}, {"lload_3", F::ShortLocal},
    {"fload_0", F::ShortLocal}, {"fload_1", F::ShortLocal}, {"fload_2", F::ShortLocal}, {"fload_3", F::ShortLocal},
    {"dload_0", F::ShortLocal}, {"dload_1", F::ShortLocal}, {"dload_2", F::ShortLocal}, {"dload_3", F::ShortLocal},
    {"aload_0", F::ShortLocal}, {"aload_1", F::ShortLocal}, {"aload_2", F::ShortLocal}, {"aload_3", F::ShortLocal},
    {"iaload", F::None}, {"laload", F::None}, {"faload", F::None}, {"daload", F::None},
    {"aaload", F::None}, {"baload", F::None}, {"caload", F::None}, {"saload", F::None},
    {"istore", F::Local}, {"lstore", F::Local}, {"fstore", F::Local}, {"dstore", F::Local}, {"astore", F::Local},
    {"istore_0", F::ShortLocal}, {"istore_1", F::ShortLocal}, {"istore_2", F::ShortLocal}, {"istore_3", F::ShortLocal},
    {"lstore_0", F::ShortLocal}, {"lstore_1", F::ShortLocal}, {"lstore_2", F::ShortLocal}, {"lstore_3", F::ShortLocal},
    {"fstore_0", F::ShortLocal}, {"fstore_1", F::ShortLocal}, {"fstore_2", F::ShortLocal}, {"fstore_3", F::ShortLocal},
    {"dstore_0", F::ShortLocal}, {"dstore_1", F::ShortLocal}, {"dstore_2", F::ShortLocal}, {"dstore_3", F::ShortLocal},
    {"astore_0", F::ShortLocal}, {"astore_1", F::ShortLocal}, {"astore_2", F::ShortLocal}, {"astore_3", F::ShortLocal},
    {"iastore", F::None}, {"lastore", F::None}, {"fastore", F::None}, {"dastore", F::None},
    {"aastore", F::None}, {"bastore", F::None}, {"castore", F::None}, {"sastore", F::None},
    {"pop", F::None}, {"pop2", F::None}, {"dup", F::None}, {"dup_x1", F::None}, {"dup_x2", F::None},
    {"dup2", F::None}, {"dup2_x1", F::None}, {"dup2_x2", F::None}, {"swap", F::None},
    {"iadd", F::None}, {"ladd", F::None}, {"fadd", F::None}, {"dadd", F::None},
    {"isub", F::None}, {"lsub", F::None}, {"fsub", F::None}, {"dsub", F::None},
    {"imul", F::None}, {"lmul", F::None}, {"fmul", F::None}, {"dmul", F::None},
    {"idiv", F::None}, {"ldiv", F::None}, {"fdiv", F::None}, {"ddiv", F::None},
    {"irem", F::None}, {"lrem", F::None}, {"frem", F::None}, {"drem", F::None},
    {"ineg", F::None}, {"lneg", F::None}, {"fneg", F::None}, {"dneg", F::None},
    {"ishl", F::None}, {"lshl", F::None}, {"ishr", F::None}, {"lshr", F::None},
    {"iushr", F::None}, {"lushr", F::None}, {"iand", F::None}, {"land", F::None},
    {"ior", F::None}, {"lor", F::None}, {"ixor", F::None}, {"lxor", F::None},
    {"iinc", F::Iinc},
    {"i2l", F::None}, {"i2f", F::None}, {"i2d", F::None}, {"l2i", F::None}, {"l2f", F::None},
    {"l2d", F::None}, {"f2i", F::None}, {"f2l", F::None}, {"f2d", F::None}, {"d2i", F::None},
    {"d2l", F::None}, {"d2f", F::None}, {"i2b", F::None}, {"i2c", F::None}, {"i2s", F::None},
    {"lcmp", F::None}, {"fcmpl", F::None}, {"fcmpg", F::None}, {"dcmpl", F::None}, {"dcmpg", F::None},
    {"ifeq", F::Branch}, {"ifne", F::Branch}, {"iflt", F::Branch}, {"ifge", F::Branch},
    {"ifgt", F::Branch}, {"ifle", F::Branch},
    {"if_icmpeq", F::Branch}, {"if_icmpne", F::Branch}, {"if_icmplt", F::Branch}, {"if_icmpge", F::Branch},
    {"if_icmpgt", F::Branch}, {"if_icmple", F::Branch}, {"if_acmpeq", F::Branch}, {"if_acmpne", F::Branch},
    {"goto", F::Branch}, {"jsr", F::Branch}, {"ret", F::Local},
    {"tableswitch", F::TableSwitch}, {"lookupswitch", F::LookupSwitch},
    {"ireturn", F::None}, {"lreturn", F::None}, {"freturn", F::None}, {"dreturn", F::None},
    {"areturn", F::None}, {"return", F::None},
    {"getstatic", F::Field}, {"putstatic", F::Field}, {"getfield", F::Field}, {"putfield", F::Field},
    {"invokevirtual", F::Method}, {"invokespecial", F::Method}, {"invokestatic", F::Method},
    {"invokeinterface", F::InterfaceMethod}, {"invokedynamic", F::Dynamic},
    {"new", F::Class}, {"newarray", F::Byte}, {"anewarray", F::Class}, {"arraylength", F::None},
    {"athrow", F::None}, {"checkcast", F::Class}, {"instanceof", F::Class},
    {"monitorenter", F::None}, {"monitorexit", F::None}, {"wide", F::Wide},
    {"multianewarray", F::MultiArray}, {"ifnull", F::Branch}, {"ifnonnull", F::Branch},
    {"goto_w", F::BranchWide}, {"jsr_w", F::BranchWide},
}};

int code(Opcode op) { return static_cast<int>(op); }

}  // namespace

std::string_view mnemonic(Opcode op) { return kTable[static_cast<std::size_t>(op)].name; }

OperandFormat operand_format(Opcode op) { return kTable[static_cast<std::size_t>(op)].format; }

std::optional<Opcode> opcode_from_mnemonic(std::string_view name) {
  for (int i = 0; i < kOpcodeCount; ++i) {
    if (kTable[static_cast<std::size_t>(i)].name == name) return static_cast<Opcode>(i);
  }
  return std::nullopt;
}

std::optional<ShortLocalForm> short_local_form(Opcode op) {
  int c = code(op);
  if (c >= code(Opcode::ILOAD_0) && c <= code(Opcode::ALOAD_3)) {
    int rel = c - code(Opcode::ILOAD_0);
    return ShortLocalForm{static_cast<Opcode>(code(Opcode::ILOAD) + rel / 4), rel % 4};
  }
  if (c >= code(Opcode::ISTORE_0) && c <= code(Opcode::ASTORE_3)) {
    int rel = c - code(Opcode::ISTORE_0);
    return ShortLocalForm{static_cast<Opcode>(code(Opcode::ISTORE) + rel / 4), rel % 4};
  }
  return std::nullopt;
}

Opcode canonical_opcode(Opcode op) {
  if (auto s = short_local_form(op)) return s->base;
  switch (op) {
    case Opcode::LDC_W:
    case Opcode::LDC2_W: return Opcode::LDC;
    case Opcode::GOTO_W: return Opcode::GOTO;
    case Opcode::JSR_W: return Opcode::JSR;
    default: return op;
  }
}

bool is_canonical(Opcode op) { return canonical_opcode(op) == op && op != Opcode::WIDE; }

bool is_conditional_branch(Opcode op) {
  return (op >= Opcode::IFEQ && op <= Opcode::IF_ACMPNE) || op == Opcode::IFNULL ||
         op == Opcode::IFNONNULL;
}

bool is_return(Opcode op) { return op >= Opcode::IRETURN && op <= Opcode::RETURN; }

bool ends_flow(Opcode op) {
  return is_return(op) || op == Opcode::GOTO || op == Opcode::GOTO_W || op == Opcode::ATHROW ||
         op == Opcode::TABLESWITCH || op == Opcode::LOOKUPSWITCH || op == Opcode::RET ||
         op == Opcode::JSR || op == Opcode::JSR_W;
}

}  // namespace bcv
