// SPDX-License-Identifier: Apache-2.0
#include "bcv/class_builder.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>

#include "bcv/error.hpp"

namespace bcv {
namespace {

[[noreturn]] void inconsistent(const std::string& what) { throw Error(ErrorCode::PlanInconsistent, what); }

// ---------------------------------------------------------------------------
// Constant pool interning

class PoolWriter {
 public:
  std::uint16_t utf8(const std::string& s) {
    return intern("U" + s, [&](std::vector<std::uint8_t>& out) {
      auto bytes = encode_modified_utf8(s);
      if (bytes.size() > 0xFFFF) inconsistent("constant string too long");
      out.push_back(1);
      put2(out, static_cast<std::uint16_t>(bytes.size()));
      out.insert(out.end(), bytes.begin(), bytes.end());
    });
  }
  std::uint16_t class_ref(const std::string& name) {
    auto n = utf8(name);
    return intern("C" + name, [&](auto& out) { out.push_back(7); put2(out, n); });
  }
  std::uint16_t string_ref(const std::string& s) {
    auto n = utf8(s);
    return intern("S" + s, [&](auto& out) { out.push_back(8); put2(out, n); });
  }
  std::uint16_t integer(std::int32_t v) {
    return intern("I" + std::to_string(v), [&](auto& out) { out.push_back(3); put4(out, static_cast<std::uint32_t>(v)); });
  }
  std::uint16_t floating(float v) {
    auto bits = std::bit_cast<std::uint32_t>(v);
    return intern("F" + std::to_string(bits), [&](auto& out) { out.push_back(4); put4(out, bits); });
  }
  std::uint16_t long_value(std::int64_t v) {
    auto bits = static_cast<std::uint64_t>(v);
    return intern("J" + std::to_string(bits), [&](auto& out) {
      out.push_back(5);
      put4(out, static_cast<std::uint32_t>(bits >> 32));
      put4(out, static_cast<std::uint32_t>(bits));
    }, 2);
  }
  std::uint16_t double_value(double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    return intern("D" + std::to_string(bits), [&](auto& out) {
      out.push_back(6);
      put4(out, static_cast<std::uint32_t>(bits >> 32));
      put4(out, static_cast<std::uint32_t>(bits));
    }, 2);
  }
  std::uint16_t name_and_type(const std::string& name, const std::string& desc) {
    auto n = utf8(name);
    auto d = utf8(desc);
    return intern("N" + name + "\n" + desc, [&](auto& out) { out.push_back(12); put2(out, n); put2(out, d); });
  }
  std::uint16_t member(std::uint8_t tag, const MemberRef& m) {
    auto c = class_ref(m.owner);
    auto nt = name_and_type(m.name, m.descriptor);
    return intern("M" + std::to_string(tag) + m.owner + "\n" + m.name + "\n" + m.descriptor,
                  [&](auto& out) { out.push_back(tag); put2(out, c); put2(out, nt); });
  }
  std::uint16_t invoke_dynamic(std::uint16_t bsm, const std::string& name, const std::string& desc) {
    auto nt = name_and_type(name, desc);
    return intern("Y" + std::to_string(bsm) + name + "\n" + desc,
                  [&](auto& out) { out.push_back(18); put2(out, bsm); put2(out, nt); });
  }
  std::uint16_t loadable(const ConstantValue& v) {
    switch (v.kind) {
      case ConstantValue::Kind::Int: return integer(static_cast<std::int32_t>(v.integer));
      case ConstantValue::Kind::Float: return floating(static_cast<float>(v.real));
      case ConstantValue::Kind::Long: return long_value(v.integer);
      case ConstantValue::Kind::Double: return double_value(v.real);
      case ConstantValue::Kind::String: return string_ref(v.text);
      case ConstantValue::Kind::Class: return class_ref(v.text);
    }
    inconsistent("bad constant kind");
  }

  std::uint16_t count() const { return next_; }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

  static void put2(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
  }
  static void put4(std::vector<std::uint8_t>& out, std::uint32_t v) {
    put2(out, static_cast<std::uint16_t>(v >> 16));
    put2(out, static_cast<std::uint16_t>(v));
  }

 private:
  template <typename Emit>
  std::uint16_t intern(const std::string& key, Emit emit, int slots = 1) {
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    if (next_ + slots > 0xFFFF) inconsistent("constant pool overflow");
    std::uint16_t idx = next_;
    emit(bytes_);
    next_ = static_cast<std::uint16_t>(next_ + slots);
    index_.emplace(key, idx);
    return idx;
  }

  std::map<std::string, std::uint16_t> index_;
  std::vector<std::uint8_t> bytes_;
  std::uint16_t next_ = 1;
};

using Bytes = std::vector<std::uint8_t>;

// ---------------------------------------------------------------------------
// Stack effects, in slots.

struct Effect {
  int pop = 0;
  int push = 0;
};

int type_slots(const std::string& desc) { return JType::parse(desc).slots(); }

Effect stack_effect(const RawInstruction& ins) {
  using O = Opcode;
  const O op = ins.op;
  if (op >= O::ICONST_M1 && op <= O::ICONST_5) return {0, 1};
  switch (op) {
    case O::NOP: return {0, 0};
    case O::ACONST_NULL: return {0, 1};
    case O::LCONST_0: case O::LCONST_1: case O::DCONST_0: case O::DCONST_1: return {0, 2};
    case O::FCONST_0: case O::FCONST_1: case O::FCONST_2: case O::BIPUSH: case O::SIPUSH: return {0, 1};
    case O::LDC: return {0, ins.constant && ins.constant->is_wide() ? 2 : 1};
    case O::ILOAD: case O::FLOAD: case O::ALOAD: return {0, 1};
    case O::LLOAD: case O::DLOAD: return {0, 2};
    case O::ISTORE: case O::FSTORE: case O::ASTORE: return {1, 0};
    case O::LSTORE: case O::DSTORE: return {2, 0};
    case O::IALOAD: case O::FALOAD: case O::AALOAD: case O::BALOAD: case O::CALOAD: case O::SALOAD: return {2, 1};
    case O::LALOAD: case O::DALOAD: return {2, 2};
    case O::IASTORE: case O::FASTORE: case O::AASTORE: case O::BASTORE: case O::CASTORE: case O::SASTORE: return {3, 0};
    case O::LASTORE: case O::DASTORE: return {4, 0};
    case O::POP: return {1, 0};
    case O::POP2: return {2, 0};
    case O::DUP: return {1, 2};
    case O::DUP_X1: return {2, 3};
    case O::DUP_X2: return {3, 4};
    case O::DUP2: return {2, 4};
    case O::DUP2_X1: return {3, 5};
    case O::DUP2_X2: return {4, 6};
    case O::SWAP: return {2, 2};
    case O::IADD: case O::FADD: case O::ISUB: case O::FSUB: case O::IMUL: case O::FMUL: case O::IDIV:
    case O::FDIV: case O::IREM: case O::FREM: case O::ISHL: case O::ISHR: case O::IUSHR: case O::IAND:
    case O::IOR: case O::IXOR:
      return {2, 1};
    case O::LADD: case O::DADD: case O::LSUB: case O::DSUB: case O::LMUL: case O::DMUL: case O::LDIV:
    case O::DDIV: case O::LREM: case O::DREM: case O::LAND: case O::LOR: case O::LXOR:
      return {4, 2};
    case O::LSHL: case O::LSHR: case O::LUSHR: return {3, 2};
    case O::INEG: case O::FNEG: return {1, 1};
    case O::LNEG: case O::DNEG: return {2, 2};
    case O::IINC: return {0, 0};
    case O::I2L: case O::I2D: case O::F2L: case O::F2D: return {1, 2};
    case O::I2F: case O::F2I: case O::I2B: case O::I2C: case O::I2S: return {1, 1};
    case O::L2I: case O::L2F: case O::D2I: case O::D2F: return {2, 1};
    case O::L2D: case O::D2L: return {2, 2};
    case O::LCMP: case O::DCMPL: case O::DCMPG: return {4, 1};
    case O::FCMPL: case O::FCMPG: return {2, 1};
    case O::IFEQ: case O::IFNE: case O::IFLT: case O::IFGE: case O::IFGT: case O::IFLE: case O::IFNULL:
    case O::IFNONNULL:
      return {1, 0};
    case O::IF_ICMPEQ: case O::IF_ICMPNE: case O::IF_ICMPLT: case O::IF_ICMPGE: case O::IF_ICMPGT:
    case O::IF_ICMPLE: case O::IF_ACMPEQ: case O::IF_ACMPNE:
      return {2, 0};
    case O::GOTO: case O::RET: return {0, 0};
    case O::JSR: return {0, 1};
    case O::TABLESWITCH: case O::LOOKUPSWITCH: return {1, 0};
    case O::IRETURN: case O::FRETURN: case O::ARETURN: return {1, 0};
    case O::LRETURN: case O::DRETURN: return {2, 0};
    case O::RETURN: return {0, 0};
    case O::GETSTATIC: return {0, type_slots(ins.member->descriptor)};
    case O::PUTSTATIC: return {type_slots(ins.member->descriptor), 0};
    case O::GETFIELD: return {1, type_slots(ins.member->descriptor)};
    case O::PUTFIELD: return {1 + type_slots(ins.member->descriptor), 0};
    case O::INVOKEVIRTUAL: case O::INVOKESPECIAL: case O::INVOKESTATIC: case O::INVOKEINTERFACE:
    case O::INVOKEDYNAMIC: {
      auto md = MethodDescriptor::parse(ins.member->descriptor);
      int receiver = (op == O::INVOKESTATIC || op == O::INVOKEDYNAMIC) ? 0 : 1;
      return {md.param_slots() + receiver, md.ret.slots()};
    }
    case O::NEW: return {0, 1};
    case O::NEWARRAY: case O::ANEWARRAY: case O::ARRAYLENGTH: case O::CHECKCAST: case O::INSTANCEOF:
      return {1, 1};
    case O::ATHROW: case O::MONITORENTER: case O::MONITOREXIT: return {1, 0};
    case O::MULTIANEWARRAY: return {static_cast<int>(ins.immediate), 1};
    default: break;
  }
  inconsistent("opcode not in normal form: " + std::string(mnemonic(op)));
}

bool fits_s1(std::int64_t v) { return v >= -128 && v <= 127; }
bool fits_s2(std::int64_t v) { return v >= -32768 && v <= 32767; }

// ---------------------------------------------------------------------------
// Code layout

struct Layout {
  std::vector<const RawInstruction*> ins;
  std::vector<std::size_t> label_pos;  // label id -> instruction index (ins.size() == end)
  std::vector<bool> wide_jump;
  std::vector<std::uint32_t> offsets;  // size ins.size() + 1
};

std::size_t encoded_size(const RawInstruction& ins, std::uint32_t offset, bool wide_jump,
                         const std::vector<std::uint16_t>& ldc_index, std::size_t k) {
  using O = Opcode;
  switch (operand_format(ins.op)) {
    case OperandFormat::None: return 1;
    case OperandFormat::Local:
      if (ins.local < 0 || ins.local > 0xFFFF) inconsistent("local index out of range");
      if (ins.op != O::RET && ins.local < 4) return 1;
      return ins.local <= 0xFF ? 2 : 4;
    case OperandFormat::Byte: return 2;
    case OperandFormat::Short: return 3;
    case OperandFormat::Ldc:
      if (ins.constant && ins.constant->is_wide()) return 3;
      return ldc_index[k] <= 0xFF ? 2 : 3;
    case OperandFormat::Iinc:
      return (ins.local <= 0xFF && fits_s1(ins.immediate)) ? 3 : 6;
    case OperandFormat::Branch: return wide_jump ? 5 : 3;
    case OperandFormat::TableSwitch:
    case OperandFormat::LookupSwitch: {
      std::size_t pad = (4 - (offset + 1) % 4) % 4;
      std::size_t body = ins.op == O::TABLESWITCH ? 12 + 4 * ins.keys.size() : 8 + 8 * ins.keys.size();
      return 1 + pad + body;
    }
    case OperandFormat::Field:
    case OperandFormat::Method:
    case OperandFormat::Class: return 3;
    case OperandFormat::InterfaceMethod:
    case OperandFormat::Dynamic: return 5;
    case OperandFormat::MultiArray: return 4;
    default: break;
  }
  inconsistent("cannot encode " + std::string(mnemonic(ins.op)));
}

void check_operands(const RawInstruction& ins) {
  using O = Opcode;
  if (!is_canonical(ins.op)) inconsistent("non-canonical opcode " + std::string(mnemonic(ins.op)));
  switch (operand_format(ins.op)) {
    case OperandFormat::Byte:
      if (ins.op == O::BIPUSH && !fits_s1(ins.immediate)) inconsistent("bipush operand out of range");
      if (ins.op == O::NEWARRAY && (ins.immediate < 4 || ins.immediate > 11)) inconsistent("bad newarray type");
      break;
    case OperandFormat::Short:
      if (!fits_s2(ins.immediate)) inconsistent("sipush operand out of range");
      break;
    case OperandFormat::Iinc:
      if (!fits_s2(ins.immediate) || ins.local < 0 || ins.local > 0xFFFF) inconsistent("iinc operand out of range");
      break;
    case OperandFormat::Ldc:
      if (!ins.constant) inconsistent("ldc without constant");
      break;
    case OperandFormat::Branch:
      if (ins.targets.size() != 1) inconsistent("branch needs exactly one target");
      break;
    case OperandFormat::TableSwitch:
      for (std::size_t i = 1; i < ins.keys.size(); ++i) {
        if (ins.keys[i] != ins.keys[i - 1] + 1) inconsistent("tableswitch keys must be contiguous");
      }
      [[fallthrough]];
    case OperandFormat::LookupSwitch:
      if (ins.targets.size() != ins.keys.size() + 1) inconsistent("switch target/key count mismatch");
      if (ins.op == O::TABLESWITCH && ins.keys.empty()) inconsistent("empty tableswitch");
      break;
    case OperandFormat::Field:
    case OperandFormat::Method:
    case OperandFormat::InterfaceMethod:
    case OperandFormat::Dynamic:
      if (!ins.member) inconsistent(std::string(mnemonic(ins.op)) + " without member reference");
      break;
    case OperandFormat::Class:
    case OperandFormat::MultiArray:
      if (ins.class_name.empty()) inconsistent(std::string(mnemonic(ins.op)) + " without class operand");
      break;
    default:
      break;
  }
}

Layout layout_code(const CodePlan& code, const std::vector<std::uint16_t>& ldc_index) {
  Layout l;
  std::map<std::int32_t, std::size_t> labels;
  for (const auto& item : code.items) {
    if (const auto* mark = std::get_if<LabelMark>(&item)) {
      if (!labels.emplace(mark->id, l.ins.size()).second) inconsistent("label bound twice");
    } else {
      l.ins.push_back(&std::get<RawInstruction>(item));
    }
  }
  std::int32_t max_label = -1;
  for (auto& [id, pos] : labels) max_label = std::max(max_label, id);
  auto resolve = [&](std::int32_t id) {
    auto it = labels.find(id);
    if (it == labels.end()) inconsistent("branch to unbound label " + std::to_string(id));
    return it->second;
  };
  for (const auto* ins : l.ins) {
    check_operands(*ins);
    for (auto t : ins->targets) {
      if (resolve(t) >= l.ins.size()) inconsistent("branch past end of code");
    }
  }
  for (const auto& e : code.exception_table) {
    resolve(e.start);
    resolve(e.end);
    if (resolve(e.handler) >= l.ins.size()) inconsistent("handler past end of code");
  }
  l.label_pos.assign(static_cast<std::size_t>(max_label + 1), 0);
  for (auto& [id, pos] : labels) {
    if (id < 0) inconsistent("negative label id");
    l.label_pos[static_cast<std::size_t>(id)] = pos;
  }
  l.wide_jump.assign(l.ins.size(), false);
  for (int round = 0;; ++round) {
    l.offsets.assign(l.ins.size() + 1, 0);
    for (std::size_t k = 0; k < l.ins.size(); ++k) {
      l.offsets[k + 1] = l.offsets[k] + static_cast<std::uint32_t>(encoded_size(*l.ins[k], l.offsets[k], l.wide_jump[k], ldc_index, k));
    }
    bool changed = false;
    for (std::size_t k = 0; k < l.ins.size(); ++k) {
      if (operand_format(l.ins[k]->op) != OperandFormat::Branch || l.wide_jump[k]) continue;
      std::int64_t disp = static_cast<std::int64_t>(l.offsets[l.label_pos[static_cast<std::size_t>(l.ins[k]->targets[0])]]) - l.offsets[k];
      if (!fits_s2(disp)) {
        if (l.ins[k]->op != Opcode::GOTO && l.ins[k]->op != Opcode::JSR) inconsistent("conditional branch out of range");
        l.wide_jump[k] = true;
        changed = true;
      }
    }
    if (!changed) break;
    if (round > 64) inconsistent("branch layout did not converge");
  }
  if (l.offsets.back() > 65535) inconsistent("code too large");
  return l;
}

struct Sizes {
  std::uint16_t max_stack = 0;
  std::uint16_t max_locals = 0;
};

Sizes compute_sizes(const Layout& l, const CodePlan& code, const MethodPlan& m) {
  auto md = MethodDescriptor::parse(m.descriptor);
  int locals = md.param_slots() + ((m.access & access::kStatic) ? 0 : 1);
  for (const auto* ins : l.ins) {
    switch (ins->op) {
      case Opcode::LLOAD: case Opcode::DLOAD: case Opcode::LSTORE: case Opcode::DSTORE:
        locals = std::max(locals, ins->local + 2);
        break;
      case Opcode::ILOAD: case Opcode::FLOAD: case Opcode::ALOAD: case Opcode::ISTORE: case Opcode::FSTORE:
      case Opcode::ASTORE: case Opcode::IINC: case Opcode::RET:
        locals = std::max(locals, ins->local + 1);
        break;
      default:
        break;
    }
  }
  for (const auto& ln : code.local_names) locals = std::max(locals, ln.slot + JType::parse(ln.descriptor).slots());

  const std::size_t n = l.ins.size();
  std::vector<int> depth(n, -1);
  std::vector<std::size_t> work;
  int max_depth = 0;
  auto flow = [&](std::size_t to, int d) {
    if (to >= n) inconsistent("control falls off the end of the code");
    if (depth[to] == -1) {
      depth[to] = d;
      work.push_back(to);
    } else if (depth[to] != d) {
      inconsistent("stack depth mismatch at instruction " + std::to_string(to));
    }
  };
  if (n == 0) inconsistent("empty code");
  flow(0, 0);
  for (const auto& e : code.exception_table) flow(l.label_pos[static_cast<std::size_t>(e.handler)], 1);
  while (!work.empty()) {
    std::size_t k = work.back();
    work.pop_back();
    const auto& ins = *l.ins[k];
    Effect eff = stack_effect(ins);
    int d = depth[k] - eff.pop;
    if (d < 0) inconsistent("stack underflow at instruction " + std::to_string(k) + " (" + std::string(mnemonic(ins.op)) + ")");
    d += eff.push;
    max_depth = std::max({max_depth, d, depth[k]});
    for (auto t : ins.targets) flow(l.label_pos[static_cast<std::size_t>(t)], d);
    if (!ends_flow(ins.op)) flow(k + 1, d);
  }
  if (max_depth > 0xFFFF || locals > 0xFFFF) inconsistent("frame too large");
  return {static_cast<std::uint16_t>(max_depth), static_cast<std::uint16_t>(locals)};
}

void put1(Bytes& out, std::uint8_t v) { out.push_back(v); }
void put2(Bytes& out, std::uint16_t v) { PoolWriter::put2(out, v); }
void put4(Bytes& out, std::uint32_t v) { PoolWriter::put4(out, v); }

Bytes encode_code(const Layout& l, PoolWriter& pool, const std::vector<std::uint16_t>& ldc_index) {
  using O = Opcode;
  Bytes out;
  auto target = [&](std::int32_t label) { return l.offsets[l.label_pos[static_cast<std::size_t>(label)]]; };
  for (std::size_t k = 0; k < l.ins.size(); ++k) {
    const auto& ins = *l.ins[k];
    const std::uint32_t here = l.offsets[k];
    const auto rel = [&](std::int32_t label) {
      return static_cast<std::int64_t>(target(label)) - static_cast<std::int64_t>(here);
    };
    switch (operand_format(ins.op)) {
      case OperandFormat::None:
        put1(out, static_cast<std::uint8_t>(ins.op));
        break;
      case OperandFormat::Local:
        if (ins.op != O::RET && ins.local < 4) {
          int base = ins.op <= O::ALOAD ? static_cast<int>(O::ILOAD_0) + (static_cast<int>(ins.op) - static_cast<int>(O::ILOAD)) * 4
                                        : static_cast<int>(O::ISTORE_0) + (static_cast<int>(ins.op) - static_cast<int>(O::ISTORE)) * 4;
          put1(out, static_cast<std::uint8_t>(base + ins.local));
        } else if (ins.local <= 0xFF) {
          put1(out, static_cast<std::uint8_t>(ins.op));
          put1(out, static_cast<std::uint8_t>(ins.local));
        } else {
          put1(out, static_cast<std::uint8_t>(O::WIDE));
          put1(out, static_cast<std::uint8_t>(ins.op));
          put2(out, static_cast<std::uint16_t>(ins.local));
        }
        break;
      case OperandFormat::Byte:
        put1(out, static_cast<std::uint8_t>(ins.op));
        put1(out, static_cast<std::uint8_t>(ins.immediate));
        break;
      case OperandFormat::Short:
        put1(out, static_cast<std::uint8_t>(ins.op));
        put2(out, static_cast<std::uint16_t>(ins.immediate));
        break;
      case OperandFormat::Ldc: {
        std::uint16_t idx = ldc_index[k];
        if (ins.constant->is_wide()) {
          put1(out, static_cast<std::uint8_t>(O::LDC2_W));
          put2(out, idx);
        } else if (idx <= 0xFF) {
          put1(out, static_cast<std::uint8_t>(O::LDC));
          put1(out, static_cast<std::uint8_t>(idx));
        } else {
          put1(out, static_cast<std::uint8_t>(O::LDC_W));
          put2(out, idx);
        }
        break;
      }
      case OperandFormat::Iinc:
        if (ins.local <= 0xFF && fits_s1(ins.immediate)) {
          put1(out, static_cast<std::uint8_t>(O::IINC));
          put1(out, static_cast<std::uint8_t>(ins.local));
          put1(out, static_cast<std::uint8_t>(ins.immediate));
        } else {
          put1(out, static_cast<std::uint8_t>(O::WIDE));
          put1(out, static_cast<std::uint8_t>(O::IINC));
          put2(out, static_cast<std::uint16_t>(ins.local));
          put2(out, static_cast<std::uint16_t>(ins.immediate));
        }
        break;
      case OperandFormat::Branch:
        if (l.wide_jump[k]) {
          put1(out, static_cast<std::uint8_t>(ins.op == O::GOTO ? O::GOTO_W : O::JSR_W));
          put4(out, static_cast<std::uint32_t>(rel(ins.targets[0])));
        } else {
          put1(out, static_cast<std::uint8_t>(ins.op));
          put2(out, static_cast<std::uint16_t>(rel(ins.targets[0])));
        }
        break;
      case OperandFormat::TableSwitch:
      case OperandFormat::LookupSwitch:
        put1(out, static_cast<std::uint8_t>(ins.op));
        while ((out.size()) % 4 != 0) put1(out, 0);
        put4(out, static_cast<std::uint32_t>(rel(ins.targets[0])));
        if (ins.op == O::TABLESWITCH) {
          put4(out, static_cast<std::uint32_t>(ins.keys.front()));
          put4(out, static_cast<std::uint32_t>(ins.keys.back()));
          for (std::size_t i = 1; i < ins.targets.size(); ++i) put4(out, static_cast<std::uint32_t>(rel(ins.targets[i])));
        } else {
          put4(out, static_cast<std::uint32_t>(ins.keys.size()));
          std::vector<std::size_t> order(ins.keys.size());
          for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
          std::sort(order.begin(), order.end(), [&](auto a, auto b) { return ins.keys[a] < ins.keys[b]; });
          for (auto i : order) {
            put4(out, static_cast<std::uint32_t>(ins.keys[i]));
            put4(out, static_cast<std::uint32_t>(rel(ins.targets[i + 1])));
          }
        }
        break;
      case OperandFormat::Field:
        put1(out, static_cast<std::uint8_t>(ins.op));
        put2(out, pool.member(9, *ins.member));
        break;
      case OperandFormat::Method:
        put1(out, static_cast<std::uint8_t>(ins.op));
        put2(out, pool.member(ins.member->interface ? 11 : 10, *ins.member));
        break;
      case OperandFormat::InterfaceMethod: {
        auto md = MethodDescriptor::parse(ins.member->descriptor);
        put1(out, static_cast<std::uint8_t>(ins.op));
        put2(out, pool.member(11, *ins.member));
        put1(out, static_cast<std::uint8_t>(md.param_slots() + 1));
        put1(out, 0);
        break;
      }
      case OperandFormat::Dynamic:
        put1(out, static_cast<std::uint8_t>(ins.op));
        put2(out, pool.invoke_dynamic(static_cast<std::uint16_t>(ins.immediate), ins.member->name, ins.member->descriptor));
        put2(out, 0);
        break;
      case OperandFormat::Class:
        put1(out, static_cast<std::uint8_t>(ins.op));
        put2(out, pool.class_ref(ins.class_name));
        break;
      case OperandFormat::MultiArray:
        put1(out, static_cast<std::uint8_t>(ins.op));
        put2(out, pool.class_ref(ins.class_name));
        put1(out, static_cast<std::uint8_t>(ins.immediate));
        break;
      default:
        inconsistent("cannot encode " + std::string(mnemonic(ins.op)));
    }
    if (out.size() != l.offsets[k + 1]) inconsistent("internal layout error");
  }
  return out;
}

// Constants are interned before layout so ldc's short/wide choice is known.
std::vector<std::uint16_t> intern_ldc(const CodePlan& code, PoolWriter& pool) {
  std::vector<std::uint16_t> out;
  for (const auto& item : code.items) {
    if (const auto* ins = std::get_if<RawInstruction>(&item)) {
      out.push_back(ins->op == Opcode::LDC && ins->constant ? pool.loadable(*ins->constant) : 0);
    }
  }
  return out;
}

void write_element(Bytes& out, const ElementValue& v, PoolWriter& pool);

void write_annotation(Bytes& out, const AnnotationValue& a, PoolWriter& pool) {
  put2(out, pool.utf8("L" + internal_name(a.type) + ";"));
  put2(out, static_cast<std::uint16_t>(a.elements.size()));
  for (const auto& [name, value] : a.elements) {
    put2(out, pool.utf8(name));
    write_element(out, value, pool);
  }
}

void write_element(Bytes& out, const ElementValue& v, PoolWriter& pool) {
  put1(out, static_cast<std::uint8_t>(v.tag));
  switch (v.tag) {
    case 'B': case 'C': case 'I': case 'S': case 'Z':
      put2(out, pool.integer(static_cast<std::int32_t>(v.integer)));
      break;
    case 'J': put2(out, pool.long_value(v.integer)); break;
    case 'F': put2(out, pool.floating(static_cast<float>(v.real))); break;
    case 'D': put2(out, pool.double_value(v.real)); break;
    case 's': case 'c': put2(out, pool.utf8(v.text)); break;
    case 'e':
      put2(out, pool.utf8(v.text));
      put2(out, pool.utf8(v.enum_const));
      break;
    case '@':
      if (v.nested.size() != 1) inconsistent("nested annotation element needs one annotation");
      write_annotation(out, v.nested.front(), pool);
      break;
    case '[':
      put2(out, static_cast<std::uint16_t>(v.items.size()));
      for (const auto& item : v.items) write_element(out, item, pool);
      break;
    default:
      inconsistent(std::string("bad element tag '") + v.tag + "'");
  }
}

void write_attribute(Bytes& out, PoolWriter& pool, const std::string& name, const Bytes& body) {
  put2(out, pool.utf8(name));
  put4(out, static_cast<std::uint32_t>(body.size()));
  out.insert(out.end(), body.begin(), body.end());
}

Bytes annotations_body(const std::vector<AnnotationValue>& list, PoolWriter& pool) {
  Bytes body;
  put2(body, static_cast<std::uint16_t>(list.size()));
  for (const auto& a : list) write_annotation(body, a, pool);
  return body;
}

Bytes encode_method(const MethodPlan& m, PoolWriter& pool) {
  Bytes out;
  auto md = MethodDescriptor::parse(m.descriptor);
  bool bodiless = (m.access & (access::kAbstract | access::kNative)) != 0;
  if (bodiless == m.code.has_value()) inconsistent("method " + m.name + ": code presence does not match flags");
  put2(out, m.access);
  put2(out, pool.utf8(m.name));
  put2(out, pool.utf8(m.descriptor));
  std::vector<std::pair<std::string, Bytes>> attrs;
  if (m.code) {
    const auto& code = *m.code;
    auto ldc_index = intern_ldc(code, pool);
    Layout l = layout_code(code, ldc_index);
    Sizes sizes = compute_sizes(l, code, m);
    Bytes body;
    put2(body, sizes.max_stack);
    put2(body, sizes.max_locals);
    Bytes bytecode = encode_code(l, pool, ldc_index);
    put4(body, static_cast<std::uint32_t>(bytecode.size()));
    body.insert(body.end(), bytecode.begin(), bytecode.end());
    put2(body, static_cast<std::uint16_t>(code.exception_table.size()));
    auto offset_of = [&](std::int32_t label) { return static_cast<std::uint16_t>(l.offsets[l.label_pos[static_cast<std::size_t>(label)]]); };
    for (const auto& e : code.exception_table) {
      put2(body, offset_of(e.start));
      put2(body, offset_of(e.end));
      put2(body, offset_of(e.handler));
      put2(body, e.catch_type.empty() ? 0 : pool.class_ref(e.catch_type));
    }
    std::vector<std::pair<std::string, Bytes>> code_attrs;
    if (!code.local_names.empty()) {
      Bytes lvt;
      put2(lvt, static_cast<std::uint16_t>(code.local_names.size()));
      for (const auto& ln : code.local_names) {
        JType::parse(ln.descriptor);
        put2(lvt, 0);
        put2(lvt, static_cast<std::uint16_t>(bytecode.size()));
        put2(lvt, pool.utf8(ln.name));
        put2(lvt, pool.utf8(ln.descriptor));
        put2(lvt, ln.slot);
      }
      code_attrs.emplace_back("LocalVariableTable", std::move(lvt));
    }
    put2(body, static_cast<std::uint16_t>(code_attrs.size()));
    for (const auto& [name, data] : code_attrs) write_attribute(body, pool, name, data);
    attrs.emplace_back("Code", std::move(body));
  }
  if (!m.annotations.empty()) attrs.emplace_back("RuntimeVisibleAnnotations", annotations_body(m.annotations, pool));
  if (!m.parameter_names.empty()) {
    if (m.parameter_names.size() != md.params.size()) inconsistent("parameter name count mismatch in " + m.name);
    Bytes body;
    put1(body, static_cast<std::uint8_t>(m.parameter_names.size()));
    for (const auto& p : m.parameter_names) {
      put2(body, p.empty() ? 0 : pool.utf8(p));
      put2(body, 0);
    }
    attrs.emplace_back("MethodParameters", std::move(body));
  }
  put2(out, static_cast<std::uint16_t>(attrs.size()));
  for (const auto& [name, data] : attrs) write_attribute(out, pool, name, data);
  return out;
}

}  // namespace

std::vector<std::uint8_t> build_class(const ClassPlan& plan) {
  PoolWriter pool;
  Bytes body;
  put2(body, plan.access);
  put2(body, pool.class_ref(plan.name));
  put2(body, plan.super_class ? pool.class_ref(*plan.super_class) : 0);
  put2(body, static_cast<std::uint16_t>(plan.interfaces.size()));
  for (const auto& i : plan.interfaces) put2(body, pool.class_ref(i));
  put2(body, static_cast<std::uint16_t>(plan.fields.size()));
  for (const auto& f : plan.fields) {
    if (JType::parse(f.descriptor).is_void()) inconsistent("void field " + f.name);
    put2(body, f.access);
    put2(body, pool.utf8(f.name));
    put2(body, pool.utf8(f.descriptor));
    if (f.annotations.empty()) {
      put2(body, 0);
    } else {
      put2(body, 1);
      write_attribute(body, pool, "RuntimeVisibleAnnotations", annotations_body(f.annotations, pool));
    }
  }
  put2(body, static_cast<std::uint16_t>(plan.methods.size()));
  for (const auto& m : plan.methods) {
    try {
      Bytes mb = encode_method(m, pool);
      body.insert(body.end(), mb.begin(), mb.end());
    } catch (const Error& e) {
      throw e.located(dotted_name(plan.name) + "." + m.name);
    }
  }
  if (plan.annotations.empty()) {
    put2(body, 0);
  } else {
    put2(body, 1);
    write_attribute(body, pool, "RuntimeVisibleAnnotations", annotations_body(plan.annotations, pool));
  }

  Bytes out;
  put4(out, 0xCAFEBABE);
  put2(out, 0);
  put2(out, plan.major_version);
  put2(out, pool.count());
  out.insert(out.end(), pool.bytes().begin(), pool.bytes().end());
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

namespace {

CodePlan normalize_code(const CodePlan& code) {
  // Positions of labels, measured in instructions.
  std::map<std::int32_t, std::size_t> pos;
  std::vector<RawInstruction> ins;
  for (const auto& item : code.items) {
    if (const auto* mark = std::get_if<LabelMark>(&item)) {
      pos[mark->id] = ins.size();
    } else {
      auto i = std::get<RawInstruction>(item);
      if (auto s = short_local_form(i.op)) i.local = s->slot;
      i.op = canonical_opcode(i.op);
      i.offset = 0;
      ins.push_back(std::move(i));
    }
  }
  auto at = [&](std::int32_t id) {
    auto it = pos.find(id);
    if (it == pos.end()) inconsistent("unbound label " + std::to_string(id));
    return it->second;
  };
  std::set<std::size_t> used;
  for (const auto& i : ins) for (auto t : i.targets) used.insert(at(t));
  for (const auto& e : code.exception_table) {
    used.insert(at(e.start));
    used.insert(at(e.end));
    used.insert(at(e.handler));
  }
  std::map<std::size_t, std::int32_t> renumber;
  for (auto p : used) renumber.emplace(p, static_cast<std::int32_t>(renumber.size()));
  CodePlan out;
  out.local_names = code.local_names;
  for (std::size_t k = 0; k <= ins.size(); ++k) {
    if (auto it = renumber.find(k); it != renumber.end()) out.items.emplace_back(LabelMark{it->second});
    if (k == ins.size()) break;
    auto i = ins[k];
    for (auto& t : i.targets) t = renumber.at(at(t));
    out.items.emplace_back(std::move(i));
  }
  for (auto e : code.exception_table) {
    e.start = renumber.at(at(e.start));
    e.end = renumber.at(at(e.end));
    e.handler = renumber.at(at(e.handler));
    out.exception_table.push_back(std::move(e));
  }
  return out;
}

}  // namespace

ClassPlan normalize(const ClassPlan& plan) {
  ClassPlan out = plan;
  for (auto& m : out.methods) {
    if (m.code) m.code = normalize_code(*m.code);
  }
  return out;
}

ClassPlan to_plan(const ClassFile& cf) {
  ClassPlan plan;
  plan.major_version = cf.major_version;
  plan.access = cf.access;
  plan.name = cf.this_class;
  plan.super_class = cf.super_class;
  plan.interfaces = cf.interfaces;
  plan.annotations = cf.class_annotations;
  for (const auto& f : cf.fields) plan.fields.push_back({f.access, f.name, f.type.descriptor(), f.annotations});
  for (const auto& m : cf.methods) {
    MethodPlan mp;
    mp.access = m.access;
    mp.name = m.name;
    mp.descriptor = m.descriptor.text();
    mp.annotations = m.annotations;
    mp.parameter_names = m.parameter_names;
    if (m.code) {
      // Label ids are byte offsets here; normalize_code renumbers them.
      CodePlan cp;
      std::set<std::int32_t> offsets;
      for (const auto& ins : m.code->instructions) for (auto t : ins.targets) offsets.insert(t);
      for (const auto& e : m.code->exception_table) {
        offsets.insert(e.start);
        offsets.insert(e.end);
        offsets.insert(e.handler);
      }
      for (const auto& ins : m.code->instructions) {
        if (offsets.count(static_cast<std::int32_t>(ins.offset))) cp.items.emplace_back(LabelMark{static_cast<std::int32_t>(ins.offset)});
        cp.items.emplace_back(ins);
      }
      if (offsets.count(static_cast<std::int32_t>(m.code->code_length))) {
        cp.items.emplace_back(LabelMark{static_cast<std::int32_t>(m.code->code_length)});
      }
      cp.exception_table = m.code->exception_table;
      cp.local_names = m.code->local_names;
      mp.code = normalize_code(cp);
    }
    plan.methods.push_back(std::move(mp));
  }
  return plan;
}

// ---------------------------------------------------------------------------
// CodeBuilder

CodeBuilder& CodeBuilder::push(RawInstruction ins) {
  plan_.items.emplace_back(std::move(ins));
  return *this;
}

CodeBuilder& CodeBuilder::bind(Label l) {
  plan_.items.emplace_back(LabelMark{l});
  return *this;
}

CodeBuilder& CodeBuilder::op(Opcode op) {
  RawInstruction ins;
  ins.op = op;
  return push(std::move(ins));
}

CodeBuilder& CodeBuilder::iconst(std::int32_t v) {
  if (v >= -1 && v <= 5) return op(static_cast<Opcode>(static_cast<int>(Opcode::ICONST_0) + v));
  RawInstruction ins;
  ins.immediate = v;
  if (fits_s1(v)) ins.op = Opcode::BIPUSH;
  else if (fits_s2(v)) ins.op = Opcode::SIPUSH;
  else return ldc(ConstantValue::of_int(v));
  return push(std::move(ins));
}

CodeBuilder& CodeBuilder::lconst(std::int64_t v) {
  if (v == 0) return op(Opcode::LCONST_0);
  if (v == 1) return op(Opcode::LCONST_1);
  return ldc(ConstantValue::of_long(v));
}

CodeBuilder& CodeBuilder::dconst(double v) {
  if (v == 0.0 && !std::signbit(v)) return op(Opcode::DCONST_0);
  if (v == 1.0) return op(Opcode::DCONST_1);
  return ldc(ConstantValue::of_double(v));
}

CodeBuilder& CodeBuilder::ldc(ConstantValue v) {
  RawInstruction ins;
  ins.op = Opcode::LDC;
  ins.constant = std::move(v);
  return push(std::move(ins));
}

CodeBuilder& CodeBuilder::local(Opcode op, int slot) {
  RawInstruction ins;
  ins.op = op;
  ins.local = slot;
  return push(std::move(ins));
}

CodeBuilder& CodeBuilder::iinc(int slot, int delta) {
  RawInstruction ins;
  ins.op = Opcode::IINC;
  ins.local = slot;
  ins.immediate = delta;
  return push(std::move(ins));
}

CodeBuilder& CodeBuilder::branch(Opcode op, Label target) {
  RawInstruction ins;
  ins.op = op;
  ins.targets.push_back(target);
  return push(std::move(ins));
}

CodeBuilder& CodeBuilder::tableswitch(Label dflt, std::int32_t low, const std::vector<Label>& targets) {
  RawInstruction ins;
  ins.op = Opcode::TABLESWITCH;
  ins.targets.push_back(dflt);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    ins.keys.push_back(low + static_cast<std::int32_t>(i));
    ins.targets.push_back(targets[i]);
  }
  return push(std::move(ins));
}

CodeBuilder& CodeBuilder::lookupswitch(Label dflt, const std::vector<std::pair<std::int32_t, Label>>& cases) {
  RawInstruction ins;
  ins.op = Opcode::LOOKUPSWITCH;
  ins.targets.push_back(dflt);
  auto sorted = cases;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& [k, l] : sorted) {
    ins.keys.push_back(k);
    ins.targets.push_back(l);
  }
  return push(std::move(ins));
}

CodeBuilder& CodeBuilder::field(Opcode op, std::string owner, std::string name, std::string descriptor) {
  RawInstruction ins;
  ins.op = op;
  ins.member = MemberRef{std::move(owner), std::move(name), std::move(descriptor), false};
  return push(std::move(ins));
}

CodeBuilder& CodeBuilder::invoke(Opcode op, std::string owner, std::string name, std::string descriptor,
                                 bool interface) {
  RawInstruction ins;
  ins.op = op;
  ins.member = MemberRef{std::move(owner), std::move(name), std::move(descriptor),
                         interface || op == Opcode::INVOKEINTERFACE};
  return push(std::move(ins));
}

CodeBuilder& CodeBuilder::invokedynamic(std::string name, std::string descriptor, int bootstrap) {
  RawInstruction ins;
  ins.op = Opcode::INVOKEDYNAMIC;
  ins.member = MemberRef{"", std::move(name), std::move(descriptor), false};
  ins.immediate = bootstrap;
  return push(std::move(ins));
}

CodeBuilder& CodeBuilder::type_op(Opcode op, std::string class_name) {
  RawInstruction ins;
  ins.op = op;
  ins.class_name = std::move(class_name);
  return push(std::move(ins));
}

CodeBuilder& CodeBuilder::newarray(JType::Kind element) {
  static const std::map<JType::Kind, int> codes = {
      {JType::Kind::Boolean, 4}, {JType::Kind::Char, 5}, {JType::Kind::Float, 6}, {JType::Kind::Double, 7},
      {JType::Kind::Byte, 8},    {JType::Kind::Short, 9}, {JType::Kind::Int, 10},  {JType::Kind::Long, 11}};
  RawInstruction ins;
  ins.op = Opcode::NEWARRAY;
  ins.immediate = codes.at(element);
  return push(std::move(ins));
}

CodeBuilder& CodeBuilder::local_name(int slot, std::string name, std::string descriptor) {
  plan_.local_names.push_back({static_cast<std::uint16_t>(slot), std::move(name), std::move(descriptor)});
  return *this;
}

CodeBuilder& CodeBuilder::try_catch(Label start, Label end, Label handler, std::string type) {
  plan_.exception_table.push_back({start, end, handler, std::move(type)});
  return *this;
}

}  // namespace bcv
