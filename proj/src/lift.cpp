// SPDX-License-Identifier: Apache-2.0
#include "bcv/lift.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "bcv/error.hpp"

namespace bcv {
namespace {

using grimp::CallKind;
using grimp::Expr;
using grimp::LValue;
using grimp::Op;
using grimp::Stmt;

enum class Sort : char { I = 'i', J = 'j', F = 'f', D = 'd', A = 'a' };

Sort sort_of(const JType& t) {
  switch (t.kind()) {
    case JType::Kind::Long: return Sort::J;
    case JType::Kind::Float: return Sort::F;
    case JType::Kind::Double: return Sort::D;
    case JType::Kind::Object:
    case JType::Kind::Array: return Sort::A;
    default: return Sort::I;
  }
}

JType default_type(Sort s) {
  switch (s) {
    case Sort::I: return JType::of(JType::Kind::Int);
    case Sort::J: return JType::of(JType::Kind::Long);
    case Sort::F: return JType::of(JType::Kind::Float);
    case Sort::D: return JType::of(JType::Kind::Double);
    case Sort::A: return JType::object("java/lang/Object");
  }
  return JType::of(JType::Kind::Int);
}

bool is_wide(Sort s) { return s == Sort::J || s == Sort::D; }

JType int_type() { return JType::of(JType::Kind::Int); }

[[noreturn]] void unsupported(const std::string& what, std::uint32_t offset) {
  throw Error(ErrorCode::Unsupported, what, "offset " + std::to_string(offset));
}

void replace_local(Expr& e, const std::string& from, const std::string& to) {
  if (e.kind == Expr::Kind::Local && e.text == from) e.text = to;
  for (auto& a : e.args) replace_local(a, from, to);
}

bool is_simple(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Local: case Expr::Kind::IntConst: case Expr::Kind::LongConst: case Expr::Kind::FloatConst:
    case Expr::Kind::DoubleConst: case Expr::Kind::Null: case Expr::Kind::StringConst: case Expr::Kind::ClassConst:
      return true;
    default:
      return false;
  }
}

bool may_trap(const Expr& e) {
  bool found = false;
  grimp::for_each_expr(e, [&](const Expr& x) {
    found = found || x.kind == Expr::Kind::ArrayRead || x.kind == Expr::Kind::FieldRead ||
            x.kind == Expr::Kind::ArrayLength || (x.kind == Expr::Kind::Cast && x.type.is_reference()) ||
            (x.kind == Expr::Kind::Binary && (x.op == Op::Div || x.op == Op::Rem) && !x.type.is_floating());
  });
  return found;
}

struct VarKey {
  int slot;
  Sort sort;
  auto operator<=>(const VarKey&) const = default;
};

class Lifter {
 public:
  Lifter(const MethodInfo& m, std::string_view owner) : m_(m), owner_(owner), code_(*m.code) {}

  grimp::Body run() {
    reject_unsupported();
    body_.method = {owner_, m_.name, m_.descriptor.text(), false};
    body_.is_static = m_.is_static();
    name_locals();
    find_blocks();
    simulate();
    assemble();
    refine_types();
    return std::move(body_);
  }

 private:
  // ---- validation

  void reject_unsupported() {
    if (!code_.exception_table.empty()) unsupported("exception handlers are not supported", 0);
    for (const auto& ins : code_.instructions) {
      switch (ins.op) {
        case Opcode::ATHROW: unsupported("athrow is not supported", ins.offset);
        case Opcode::JSR: case Opcode::RET: unsupported("subroutines (jsr/ret) are not supported", ins.offset);
        case Opcode::INVOKEDYNAMIC: unsupported("invokedynamic is not supported", ins.offset);
        case Opcode::MONITORENTER: case Opcode::MONITOREXIT:
          unsupported("monitors are not supported", ins.offset);
        case Opcode::MULTIANEWARRAY: unsupported("multi-dimensional array creation is not supported", ins.offset);
        default: break;
      }
    }
  }

  // ---- locals

  void name_locals() {
    std::set<VarKey> used;
    for (const auto& ins : code_.instructions) {
      switch (ins.op) {
        case Opcode::ILOAD: case Opcode::ISTORE: case Opcode::IINC: used.insert({ins.local, Sort::I}); break;
        case Opcode::LLOAD: case Opcode::LSTORE: used.insert({ins.local, Sort::J}); break;
        case Opcode::FLOAD: case Opcode::FSTORE: used.insert({ins.local, Sort::F}); break;
        case Opcode::DLOAD: case Opcode::DSTORE: used.insert({ins.local, Sort::D}); break;
        case Opcode::ALOAD: case Opcode::ASTORE: used.insert({ins.local, Sort::A}); break;
        default: break;
      }
    }
    int slot = 0;
    if (!m_.is_static()) {
      add_var({0, Sort::A}, "this", JType::object(owner_), true);
      body_.params.push_back("this");
      slot = 1;
    }
    const auto& params = m_.descriptor.params;
    for (std::size_t i = 0; i < params.size(); ++i) {
      std::string name;
      if (i < m_.parameter_names.size() && !m_.parameter_names[i].empty()) name = m_.parameter_names[i];
      if (name.empty()) name = lvt_name(slot, params[i]).value_or("");
      if (name.empty()) name = "p" + std::to_string(i);
      name = add_var({slot, sort_of(params[i])}, name, params[i], true);
      body_.params.push_back(name);
      slot += params[i].slots();
    }
    for (const auto& key : used) {
      if (vars_.count(key)) continue;
      JType type = default_type(key.sort);
      std::string name;
      for (const auto& ln : code_.local_names) {
        if (ln.slot == key.slot) {
          JType t = JType::parse(ln.descriptor);
          if (sort_of(t) == key.sort) {
            name = ln.name;
            type = t;
            break;
          }
        }
      }
      bool declared = !name.empty();
      if (!declared) name = "l" + std::to_string(key.slot);
      name = add_var(key, name, type, false);
      if (declared) body_.find_local(name)->ex = grimp::ex_of(type);
    }
  }

  std::optional<std::string> lvt_name(int slot, const JType& t) const {
    for (const auto& ln : code_.local_names) {
      if (ln.slot == slot && sort_of(JType::parse(ln.descriptor)) == sort_of(t)) return ln.name;
    }
    return std::nullopt;
  }

  std::string unique_name(std::string name, Sort sort) {
    if (!taken_.count(name)) return name;
    std::string candidate = name + "_" + static_cast<char>(sort);
    for (int n = 1; taken_.count(candidate); ++n) candidate = name + "$" + std::to_string(n);
    return candidate;
  }

  std::string add_var(VarKey key, std::string name, JType type, bool param) {
    name = unique_name(std::move(name), key.sort);
    taken_.insert(name);
    vars_[key] = name;
    grimp::Ex ex = param ? grimp::ex_of(type) : grimp::Ex::Unknown;
    body_.locals.push_back({name, key.slot, std::move(type), ex, param});
    return name;
  }

  std::string add_temp(const std::string& name, JType type) {
    taken_.insert(name);
    body_.locals.push_back({name, -1, std::move(type), grimp::Ex::Unknown, false});
    return name;
  }

  std::string fresh_temp(const JType& type) {
    std::string name;
    do {
      name = "$t" + std::to_string(temp_counter_++);
    } while (taken_.count(name));
    return add_temp(name, type);
  }

  Expr var(int slot, Sort sort) {
    const std::string& name = vars_.at({slot, sort});
    return grimp::local(name, body_.find_local(name)->type);
  }

  // ---- blocks

  void find_blocks() {
    const auto& ins = code_.instructions;
    std::set<std::size_t> leaders = {0};
    for (std::size_t i = 0; i < ins.size(); ++i) {
      for (auto t : ins[i].targets) {
        auto idx = code_.index_at(t);
        leaders.insert(*idx);
        targeted_.insert(*idx);
      }
      if ((!ins[i].targets.empty() || ends_flow(ins[i].op)) && i + 1 < ins.size()) leaders.insert(i + 1);
    }
    starts_.assign(leaders.begin(), leaders.end());
    for (std::size_t b = 0; b < starts_.size(); ++b) block_at_[starts_[b]] = b;
    entry_.assign(starts_.size(), std::nullopt);
    out_.assign(starts_.size(), {});
    // Successors of one branch receive the same stack, so they share merge variables.
    group_.resize(starts_.size());
    for (std::size_t b = 0; b < group_.size(); ++b) group_[b] = b;
    for (std::size_t i = 0; i < ins.size(); ++i) {
      if (ins[i].targets.empty()) continue;
      std::size_t first = block_at_[*code_.index_at(ins[i].targets[0])];
      for (auto t : ins[i].targets) unite(first, block_at_[*code_.index_at(t)]);
      if (!ends_flow(ins[i].op) && i + 1 < ins.size()) unite(first, block_at_[i + 1]);
    }
  }

  std::size_t find(std::size_t b) {
    while (group_[b] != b) b = group_[b] = group_[group_[b]];
    return b;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) group_[std::max(a, b)] = std::min(a, b);
  }

  std::size_t block_end(std::size_t b) const {
    return b + 1 < starts_.size() ? starts_[b + 1] : code_.instructions.size();
  }

  std::string label_for(std::size_t instr) const {
    return "L" + std::to_string(code_.instructions[instr].offset);
  }

  void reach(std::size_t instr, const std::vector<Sort>& sorts, std::uint32_t from) {
    std::size_t b = block_at_.at(instr);
    if (!entry_[b]) {
      entry_[b] = sorts;
      work_.push_back(b);
    } else if (*entry_[b] != sorts) {
      throw Error(ErrorCode::StackMismatch,
                  "inconsistent operand stack at offset " + std::to_string(code_.instructions[instr].offset),
                  "offset " + std::to_string(from));
    }
  }

  // ---- symbolic execution

  void simulate() {
    reach(0, {}, 0);
    while (!work_.empty()) {
      std::size_t b = work_.front();
      work_.pop_front();
      simulate_block(b);
    }
  }

  std::string merge_name(std::size_t k) {
    auto [it, fresh] = group_names_.emplace(find(merge_block_), group_names_.size());
    (void)fresh;
    return "$s" + std::to_string(it->second) + "_" + std::to_string(k);
  }

  Expr merge_var(std::size_t k, Sort s) {
    std::string name = merge_name(k);
    if (!body_.find_local(name)) add_temp(name, default_type(s));
    return grimp::local(name, body_.find_local(name)->type);
  }

  void emit(Stmt s) {
    s.offset = static_cast<std::int32_t>(offset_);
    stmts_->push_back(std::move(s));
  }

  void emit_assign(LValue lhs, Expr rhs) {
    Stmt s;
    s.kind = Stmt::Kind::Assign;
    s.lhs = std::move(lhs);
    s.expr = std::move(rhs);
    emit(std::move(s));
  }

  static LValue local_lvalue(const Expr& local) {
    LValue l;
    l.kind = LValue::Kind::Local;
    l.name = local.text;
    l.type = local.type;
    return l;
  }

  Expr pop() {
    if (stack_.empty()) throw Error(ErrorCode::StackMismatch, "operand stack underflow", "offset " + std::to_string(offset_));
    Expr e = std::move(stack_.back());
    stack_.pop_back();
    return e;
  }

  void push(Expr e) { stack_.push_back(std::move(e)); }

  // Evaluates stack entry i into a temporary, keeping earlier effects ordered.
  // Locals count: a pending read of a variable about to be overwritten.
  void spill(std::size_t i) {
    if (is_simple(stack_[i]) && stack_[i].kind != Expr::Kind::Local) return;
    bool call = grimp::has_call(stack_[i]);
    bool heap = grimp::reads_heap(stack_[i]);
    for (std::size_t j = 0; j < i; ++j) {
      if (is_simple(stack_[j])) continue;
      if ((call || heap) && (grimp::has_call(stack_[j]) || (call && grimp::reads_heap(stack_[j])))) spill(j);
    }
    Expr t = grimp::local(fresh_temp(stack_[i].type), stack_[i].type);
    emit_assign(local_lvalue(t), std::move(stack_[i]));
    stack_[i] = std::move(t);
  }

  template <typename Pred>
  void spill_if(Pred pred) {
    for (std::size_t i = 0; i < stack_.size(); ++i) {
      if (pred(stack_[i])) spill(i);
    }
  }

  // Before a statement with side effects: entries that observe the heap or
  // have effects of their own are evaluated first.
  void spill_effects() {
    spill_if([](const Expr& e) { return grimp::has_call(e) || grimp::reads_heap(e) || may_trap(e); });
  }

  // Saves the stack into the merge variables expected by successors.
  std::vector<Sort> save_stack(std::size_t successor, std::vector<Expr*> pending) {
    merge_block_ = block_at_.at(successor);
    std::vector<Sort> sorts;
    for (const auto& e : stack_) sorts.push_back(sort_of(e.type));
    std::vector<std::size_t> targets;
    for (std::size_t k = 0; k < stack_.size(); ++k) {
      const Expr& e = stack_[k];
      if (!(e.kind == Expr::Kind::Local && e.text == merge_name(k))) targets.push_back(k);
    }
    for (std::size_t n = 0; n < targets.size(); ++n) {
      std::size_t k = targets[n];
      std::string target = merge_name(k);
      bool clobbers = false;
      for (std::size_t m = n + 1; m < targets.size(); ++m) clobbers = clobbers || grimp::reads_local(stack_[targets[m]], target);
      for (Expr* p : pending) clobbers = clobbers || grimp::reads_local(*p, target);
      if (!clobbers) continue;
      Expr copy = grimp::local(fresh_temp(default_type(sorts[k])), default_type(sorts[k]));
      emit_assign(local_lvalue(copy), merge_var(k, sorts[k]));
      for (std::size_t m = n + 1; m < targets.size(); ++m) replace_local(stack_[targets[m]], target, copy.text);
      for (Expr* p : pending) replace_local(*p, target, copy.text);
    }
    for (auto k : targets) emit_assign(local_lvalue(merge_var(k, sorts[k])), std::move(stack_[k]));
    stack_.clear();
    return sorts;
  }

  JType element_type(const Expr& array, Opcode op) {
    if (array.type.kind() == JType::Kind::Array) {
      JType el = array.type.element();
      if (op != Opcode::BALOAD && op != Opcode::BASTORE) return el;
      if (el.kind() == JType::Kind::Boolean || el.kind() == JType::Kind::Byte) return el;
    }
    switch (op) {
      case Opcode::IALOAD: case Opcode::IASTORE: return int_type();
      case Opcode::LALOAD: case Opcode::LASTORE: return JType::of(JType::Kind::Long);
      case Opcode::FALOAD: case Opcode::FASTORE: return JType::of(JType::Kind::Float);
      case Opcode::DALOAD: case Opcode::DASTORE: return JType::of(JType::Kind::Double);
      case Opcode::BALOAD: case Opcode::BASTORE: return JType::of(JType::Kind::Byte);
      case Opcode::CALOAD: case Opcode::CASTORE: return JType::of(JType::Kind::Char);
      case Opcode::SALOAD: case Opcode::SASTORE: return JType::of(JType::Kind::Short);
      default: return JType::object("java/lang/Object");
    }
  }

  Expr make(Expr::Kind kind, JType type, std::vector<Expr> args = {}) {
    Expr e;
    e.kind = kind;
    e.type = std::move(type);
    e.args = std::move(args);
    return e;
  }

  void store_local(const Expr& target, Expr v) {
    if (v.kind == Expr::Kind::Local && v.text == target.text) return;
    if (grimp::has_call(v)) spill_effects();
    spill_if([&](const Expr& e) { return grimp::reads_local(e, target.text); });
    emit_assign(local_lvalue(target), std::move(v));
  }

  void binary_op(Op op, JType type) {
    Expr b = pop();
    Expr a = pop();
    push(grimp::binary(op, std::move(a), std::move(b), std::move(type)));
  }

  void cast(JType to) {
    Expr v = pop();
    push(make(Expr::Kind::Cast, std::move(to), {std::move(v)}));
  }

  bool wide_top(std::size_t depth_from_top) const {
    return is_wide(sort_of(stack_[stack_.size() - 1 - depth_from_top].type));
  }

  void make_duplicable(std::size_t from) {
    for (std::size_t i = from; i < stack_.size(); ++i) {
      if (!is_simple(stack_[i])) spill(i);
    }
  }

  // Implements dup-family instructions: the top `n` entries are copied to
  // below the next `skip` entries.
  void dup_entries(std::size_t n, std::size_t skip) {
    if (stack_.size() < n + skip) throw Error(ErrorCode::StackMismatch, "operand stack underflow", "offset " + std::to_string(offset_));
    make_duplicable(stack_.size() - n);
    std::vector<Expr> top(stack_.end() - static_cast<long>(n), stack_.end());
    stack_.insert(stack_.end() - static_cast<long>(n + skip), top.begin(), top.end());
  }

  std::size_t entries_for_slots(int slots) const {
    std::size_t n = 0;
    int seen = 0;
    while (seen < slots) {
      if (n >= stack_.size()) throw Error(ErrorCode::StackMismatch, "operand stack underflow", "offset " + std::to_string(offset_));
      seen += is_wide(sort_of(stack_[stack_.size() - 1 - n].type)) ? 2 : 1;
      ++n;
    }
    if (seen != slots) throw Error(ErrorCode::StackMismatch, "stack operation splits a wide value", "offset " + std::to_string(offset_));
    return n;
  }

  void discard(Expr v) {
    if (!grimp::has_call(v) && !may_trap(v)) return;
    if (v.kind == Expr::Kind::Call) {
      spill_effects();
      Stmt s;
      s.kind = Stmt::Kind::Invoke;
      s.expr = std::move(v);
      emit(std::move(s));
    } else {
      spill_effects();
      Expr t = grimp::local(fresh_temp(v.type), v.type);
      emit_assign(local_lvalue(t), std::move(v));
    }
  }

  Expr condition(Op op, Expr a, Expr b) {
    return grimp::binary(op, std::move(a), std::move(b), JType::of(JType::Kind::Boolean));
  }

  static Op branch_op(Opcode op) {
    switch (op) {
      case Opcode::IFEQ: case Opcode::IF_ICMPEQ: case Opcode::IF_ACMPEQ: case Opcode::IFNULL: return Op::Eq;
      case Opcode::IFNE: case Opcode::IF_ICMPNE: case Opcode::IF_ACMPNE: case Opcode::IFNONNULL: return Op::Ne;
      case Opcode::IFLT: case Opcode::IF_ICMPLT: return Op::Lt;
      case Opcode::IFGE: case Opcode::IF_ICMPGE: return Op::Ge;
      case Opcode::IFGT: case Opcode::IF_ICMPGT: return Op::Gt;
      default: return Op::Le;
    }
  }

  void simulate_block(std::size_t b) {
    stack_.clear();
    const auto& sorts = *entry_[b];
    merge_block_ = b;
    for (std::size_t k = 0; k < sorts.size(); ++k) stack_.push_back(merge_var(k, sorts[k]));
    stmts_ = &out_[b];
    const auto& ins = code_.instructions;
    std::size_t end = block_end(b);
    for (std::size_t i = starts_[b]; i < end; ++i) {
      offset_ = ins[i].offset;
      step(ins[i]);
    }
    const auto& tail = ins[end - 1];
    if (!ends_flow(tail.op) && tail.targets.empty()) {
      if (end >= ins.size()) throw Error(ErrorCode::StackMismatch, "control falls off the end of the method");
      reach(end, save_stack(end, {}), tail.offset);
    }
  }

  void step(const RawInstruction& in) {
    using O = Opcode;
    const O op = in.op;
    if (op >= O::ICONST_M1 && op <= O::ICONST_5) {
      push(grimp::int_const(static_cast<int>(op) - static_cast<int>(O::ICONST_0)));
      return;
    }
    switch (op) {
      case O::NOP: return;
      case O::ACONST_NULL: push(make(Expr::Kind::Null, JType::object("java/lang/Object"))); return;
      case O::LCONST_0: case O::LCONST_1: push(grimp::long_const(op == O::LCONST_1)); return;
      case O::FCONST_0: case O::FCONST_1: case O::FCONST_2: {
        Expr e = make(Expr::Kind::FloatConst, JType::of(JType::Kind::Float));
        e.real = static_cast<int>(op) - static_cast<int>(O::FCONST_0);
        push(std::move(e));
        return;
      }
      case O::DCONST_0: case O::DCONST_1: {
        Expr e = make(Expr::Kind::DoubleConst, JType::of(JType::Kind::Double));
        e.real = op == O::DCONST_1 ? 1.0 : 0.0;
        push(std::move(e));
        return;
      }
      case O::BIPUSH: case O::SIPUSH: push(grimp::int_const(static_cast<std::int32_t>(in.immediate))); return;
      case O::LDC: {
        const auto& c = *in.constant;
        switch (c.kind) {
          case ConstantValue::Kind::Int: push(grimp::int_const(static_cast<std::int32_t>(c.integer))); return;
          case ConstantValue::Kind::Long: push(grimp::long_const(c.integer)); return;
          case ConstantValue::Kind::Float: {
            Expr e = make(Expr::Kind::FloatConst, JType::of(JType::Kind::Float));
            e.real = c.real;
            push(std::move(e));
            return;
          }
          case ConstantValue::Kind::Double: {
            Expr e = make(Expr::Kind::DoubleConst, JType::of(JType::Kind::Double));
            e.real = c.real;
            push(std::move(e));
            return;
          }
          case ConstantValue::Kind::String: {
            Expr e = make(Expr::Kind::StringConst, JType::object("java/lang/String"));
            e.text = c.text;
            push(std::move(e));
            return;
          }
          case ConstantValue::Kind::Class: {
            Expr e = make(Expr::Kind::ClassConst, JType::object("java/lang/Class"));
            e.text = c.text;
            push(std::move(e));
            return;
          }
        }
        return;
      }
      case O::ILOAD: push(var(in.local, Sort::I)); return;
      case O::LLOAD: push(var(in.local, Sort::J)); return;
      case O::FLOAD: push(var(in.local, Sort::F)); return;
      case O::DLOAD: push(var(in.local, Sort::D)); return;
      case O::ALOAD: push(var(in.local, Sort::A)); return;
      case O::ISTORE: store_local(var(in.local, Sort::I), pop()); return;
      case O::LSTORE: store_local(var(in.local, Sort::J), pop()); return;
      case O::FSTORE: store_local(var(in.local, Sort::F), pop()); return;
      case O::DSTORE: store_local(var(in.local, Sort::D), pop()); return;
      case O::ASTORE: store_local(var(in.local, Sort::A), pop()); return;
      case O::IINC: {
        Expr x = var(in.local, Sort::I);
        spill_if([&](const Expr& e) { return grimp::reads_local(e, x.text); });
        emit_assign(local_lvalue(x), grimp::binary(Op::Add, x, grimp::int_const(static_cast<std::int32_t>(in.immediate)), int_type()));
        return;
      }
      case O::IALOAD: case O::LALOAD: case O::FALOAD: case O::DALOAD: case O::AALOAD: case O::BALOAD:
      case O::CALOAD: case O::SALOAD: {
        Expr idx = pop();
        Expr arr = pop();
        JType el = element_type(arr, op);
        push(make(Expr::Kind::ArrayRead, el, {std::move(arr), std::move(idx)}));
        return;
      }
      case O::IASTORE: case O::LASTORE: case O::FASTORE: case O::DASTORE: case O::AASTORE: case O::BASTORE:
      case O::CASTORE: case O::SASTORE: {
        Expr v = pop();
        Expr idx = pop();
        Expr arr = pop();
        spill_effects();
        LValue l;
        l.kind = LValue::Kind::Array;
        l.type = element_type(arr, op);
        l.args = {std::move(arr), std::move(idx)};
        emit_assign(std::move(l), std::move(v));
        return;
      }
      case O::POP: discard(pop()); return;
      case O::POP2:
        if (wide_top(0)) {
          discard(pop());
        } else {
          Expr a = pop();
          Expr b = pop();
          discard(std::move(b));
          discard(std::move(a));
        }
        return;
      case O::DUP: dup_entries(1, 0); return;
      case O::DUP_X1: dup_entries(1, 1); return;
      case O::DUP_X2: dup_entries(1, entries_for_slots(3) - 1); return;
      case O::DUP2: dup_entries(entries_for_slots(2), 0); return;
      case O::DUP2_X1: {
        std::size_t n = entries_for_slots(2);
        std::size_t below = entries_for_slots(3) - n;
        dup_entries(n, below);
        return;
      }
      case O::DUP2_X2: {
        std::size_t n = entries_for_slots(2);
        std::size_t below = entries_for_slots(4) - n;
        dup_entries(n, below);
        return;
      }
      case O::SWAP: {
        if (stack_.size() < 2) throw Error(ErrorCode::StackMismatch, "operand stack underflow", "offset " + std::to_string(offset_));
        // Swapping reverses evaluation order, so effects are fixed first.
        auto effects = [](const Expr& e) { return grimp::has_call(e) || grimp::reads_heap(e) || may_trap(e); };
        std::size_t top = stack_.size() - 1;
        if (effects(stack_[top]) || effects(stack_[top - 1])) {
          if (!is_simple(stack_[top - 1])) spill(top - 1);
          if (!is_simple(stack_[top])) spill(top);
        }
        std::swap(stack_[top], stack_[top - 1]);
        return;
      }
      case O::IADD: binary_op(Op::Add, int_type()); return;
      case O::LADD: binary_op(Op::Add, JType::of(JType::Kind::Long)); return;
      case O::FADD: binary_op(Op::Add, JType::of(JType::Kind::Float)); return;
      case O::DADD: binary_op(Op::Add, JType::of(JType::Kind::Double)); return;
      case O::ISUB: binary_op(Op::Sub, int_type()); return;
      case O::LSUB: binary_op(Op::Sub, JType::of(JType::Kind::Long)); return;
      case O::FSUB: binary_op(Op::Sub, JType::of(JType::Kind::Float)); return;
      case O::DSUB: binary_op(Op::Sub, JType::of(JType::Kind::Double)); return;
      case O::IMUL: binary_op(Op::Mul, int_type()); return;
      case O::LMUL: binary_op(Op::Mul, JType::of(JType::Kind::Long)); return;
      case O::FMUL: binary_op(Op::Mul, JType::of(JType::Kind::Float)); return;
      case O::DMUL: binary_op(Op::Mul, JType::of(JType::Kind::Double)); return;
      case O::IDIV: binary_op(Op::Div, int_type()); return;
      case O::LDIV: binary_op(Op::Div, JType::of(JType::Kind::Long)); return;
      case O::FDIV: binary_op(Op::Div, JType::of(JType::Kind::Float)); return;
      case O::DDIV: binary_op(Op::Div, JType::of(JType::Kind::Double)); return;
      case O::IREM: binary_op(Op::Rem, int_type()); return;
      case O::LREM: binary_op(Op::Rem, JType::of(JType::Kind::Long)); return;
      case O::FREM: binary_op(Op::Rem, JType::of(JType::Kind::Float)); return;
      case O::DREM: binary_op(Op::Rem, JType::of(JType::Kind::Double)); return;
      case O::INEG: case O::LNEG: case O::FNEG: case O::DNEG: {
        Expr v = pop();
        JType t = v.type.is_integral() && v.type.kind() != JType::Kind::Long ? int_type() : v.type;
        push(make(Expr::Kind::Neg, std::move(t), {std::move(v)}));
        return;
      }
      case O::ISHL: binary_op(Op::Shl, int_type()); return;
      case O::LSHL: binary_op(Op::Shl, JType::of(JType::Kind::Long)); return;
      case O::ISHR: binary_op(Op::Shr, int_type()); return;
      case O::LSHR: binary_op(Op::Shr, JType::of(JType::Kind::Long)); return;
      case O::IUSHR: binary_op(Op::Ushr, int_type()); return;
      case O::LUSHR: binary_op(Op::Ushr, JType::of(JType::Kind::Long)); return;
      case O::IAND: binary_op(Op::And, int_type()); return;
      case O::LAND: binary_op(Op::And, JType::of(JType::Kind::Long)); return;
      case O::IOR: binary_op(Op::Or, int_type()); return;
      case O::LOR: binary_op(Op::Or, JType::of(JType::Kind::Long)); return;
      case O::IXOR: binary_op(Op::Xor, int_type()); return;
      case O::LXOR: binary_op(Op::Xor, JType::of(JType::Kind::Long)); return;
      case O::I2L: case O::F2L: case O::D2L: cast(JType::of(JType::Kind::Long)); return;
      case O::I2F: case O::L2F: case O::D2F: cast(JType::of(JType::Kind::Float)); return;
      case O::I2D: case O::L2D: case O::F2D: cast(JType::of(JType::Kind::Double)); return;
      case O::L2I: case O::F2I: case O::D2I: cast(int_type()); return;
      case O::I2B: cast(JType::of(JType::Kind::Byte)); return;
      case O::I2C: cast(JType::of(JType::Kind::Char)); return;
      case O::I2S: cast(JType::of(JType::Kind::Short)); return;
      case O::LCMP: binary_op(Op::Cmp, int_type()); return;
      case O::FCMPL: case O::DCMPL: binary_op(Op::Cmpl, int_type()); return;
      case O::FCMPG: case O::DCMPG: binary_op(Op::Cmpg, int_type()); return;
      case O::IFEQ: case O::IFNE: case O::IFLT: case O::IFGE: case O::IFGT: case O::IFLE: {
        Expr v = pop();
        Expr cond;
        if (v.kind == Expr::Kind::Binary && v.op == Op::Cmp) {
          cond = condition(branch_op(op), std::move(v.args[0]), std::move(v.args[1]));
        } else {
          cond = condition(branch_op(op), std::move(v), grimp::int_const(0));
        }
        branch(std::move(cond), in);
        return;
      }
      case O::IFNULL: case O::IFNONNULL: {
        Expr v = pop();
        branch(condition(branch_op(op), std::move(v), make(Expr::Kind::Null, JType::object("java/lang/Object"))), in);
        return;
      }
      case O::IF_ICMPEQ: case O::IF_ICMPNE: case O::IF_ICMPLT: case O::IF_ICMPGE: case O::IF_ICMPGT:
      case O::IF_ICMPLE: case O::IF_ACMPEQ: case O::IF_ACMPNE: {
        Expr b = pop();
        Expr a = pop();
        branch(condition(branch_op(op), std::move(a), std::move(b)), in);
        return;
      }
      case O::GOTO: {
        std::size_t target = *code_.index_at(in.targets[0]);
        auto sorts = save_stack(target, {});
        Stmt s;
        s.kind = Stmt::Kind::Goto;
        s.label = label_for(target);
        emit(std::move(s));
        reach(target, sorts, in.offset);
        return;
      }
      case O::TABLESWITCH: case O::LOOKUPSWITCH: {
        if (!is_simple(stack_.back())) spill(stack_.size() - 1);
        Expr key = pop();
        std::vector<Expr*> pending = {&key};
        auto sorts = save_stack(*code_.index_at(in.targets[0]), pending);
        for (std::size_t k = 0; k < in.keys.size(); ++k) {
          std::size_t target = *code_.index_at(in.targets[k + 1]);
          Stmt s;
          s.kind = Stmt::Kind::If;
          s.expr = condition(Op::Eq, key, grimp::int_const(in.keys[k]));
          s.label = label_for(target);
          emit(std::move(s));
          reach(target, sorts, in.offset);
        }
        std::size_t dflt = *code_.index_at(in.targets[0]);
        Stmt s;
        s.kind = Stmt::Kind::Goto;
        s.label = label_for(dflt);
        emit(std::move(s));
        reach(dflt, sorts, in.offset);
        return;
      }
      case O::IRETURN: case O::LRETURN: case O::FRETURN: case O::DRETURN: case O::ARETURN: {
        Stmt s;
        s.kind = Stmt::Kind::Return;
        s.expr = pop();
        emit(std::move(s));
        return;
      }
      case O::RETURN: {
        Stmt s;
        s.kind = Stmt::Kind::Return;
        emit(std::move(s));
        return;
      }
      case O::GETSTATIC: {
        Expr e = make(Expr::Kind::StaticRead, JType::parse(in.member->descriptor));
        e.member = in.member;
        push(std::move(e));
        return;
      }
      case O::PUTSTATIC: {
        Expr v = pop();
        spill_effects();
        LValue l;
        l.kind = LValue::Kind::Static;
        l.member = in.member;
        l.type = JType::parse(in.member->descriptor);
        emit_assign(std::move(l), std::move(v));
        return;
      }
      case O::GETFIELD: {
        Expr obj = pop();
        Expr e = make(Expr::Kind::FieldRead, JType::parse(in.member->descriptor), {std::move(obj)});
        e.member = in.member;
        push(std::move(e));
        return;
      }
      case O::PUTFIELD: {
        Expr v = pop();
        Expr obj = pop();
        spill_effects();
        LValue l;
        l.kind = LValue::Kind::Field;
        l.member = in.member;
        l.type = JType::parse(in.member->descriptor);
        l.args = {std::move(obj)};
        emit_assign(std::move(l), std::move(v));
        return;
      }
      case O::INVOKEVIRTUAL: case O::INVOKESPECIAL: case O::INVOKESTATIC: case O::INVOKEINTERFACE: {
        auto md = MethodDescriptor::parse(in.member->descriptor);
        std::vector<Expr> args(md.params.size());
        for (std::size_t k = md.params.size(); k-- > 0;) args[k] = pop();
        if (op != O::INVOKESTATIC) args.insert(args.begin(), pop());
        spill_effects();
        Expr e = make(Expr::Kind::Call, md.ret, std::move(args));
        e.member = in.member;
        e.call = op == O::INVOKESTATIC ? CallKind::Static
                 : op == O::INVOKEVIRTUAL ? CallKind::Virtual
                 : op == O::INVOKEINTERFACE ? CallKind::Interface
                                            : CallKind::Special;
        if (md.ret.is_void()) {
          Stmt s;
          s.kind = Stmt::Kind::Invoke;
          s.expr = std::move(e);
          emit(std::move(s));
        } else {
          push(std::move(e));
        }
        return;
      }
      case O::NEW: {
        std::string name;
        do {
          name = "$n" + std::to_string(new_counter_++);
        } while (taken_.count(name));
        JType t = JType::object(in.class_name);
        add_temp(name, t);
        spill_effects();
        Stmt s;
        s.kind = Stmt::Kind::New;
        s.lhs = local_lvalue(grimp::local(name, t));
        s.label = in.class_name;
        emit(std::move(s));
        push(grimp::local(name, t));
        return;
      }
      case O::NEWARRAY: case O::ANEWARRAY: {
        Expr len = pop();
        spill_effects();
        JType el;
        if (op == O::ANEWARRAY) {
          el = JType::object(in.class_name);
        } else {
          static const JType::Kind kinds[] = {JType::Kind::Boolean, JType::Kind::Char, JType::Kind::Float,
                                              JType::Kind::Double,  JType::Kind::Byte, JType::Kind::Short,
                                              JType::Kind::Int,     JType::Kind::Long};
          el = JType::of(kinds[in.immediate - 4]);
        }
        JType t = JType::array_of(el);
        std::string name;
        do {
          name = "$a" + std::to_string(new_counter_++);
        } while (taken_.count(name));
        add_temp(name, t);
        Stmt s;
        s.kind = Stmt::Kind::NewArray;
        s.lhs = local_lvalue(grimp::local(name, t));
        s.expr = std::move(len);
        s.type = el;
        emit(std::move(s));
        push(grimp::local(name, t));
        return;
      }
      case O::ARRAYLENGTH: {
        Expr arr = pop();
        push(make(Expr::Kind::ArrayLength, int_type(), {std::move(arr)}));
        return;
      }
      case O::CHECKCAST: cast(JType::object(in.class_name)); return;
      case O::INSTANCEOF: {
        Expr v = pop();
        Expr e = make(Expr::Kind::InstanceOf, JType::of(JType::Kind::Boolean), {std::move(v)});
        e.text = in.class_name;
        push(std::move(e));
        return;
      }
      default:
        break;
    }
    unsupported("unsupported instruction " + std::string(mnemonic(op)), in.offset);
  }

  void branch(Expr cond, const RawInstruction& in) {
    std::vector<Expr*> pending = {&cond};
    std::size_t target = *code_.index_at(in.targets[0]);
    auto sorts = save_stack(target, pending);
    Stmt s;
    s.kind = Stmt::Kind::If;
    s.expr = std::move(cond);
    s.label = label_for(target);
    emit(std::move(s));
    reach(target, sorts, in.offset);
    std::size_t next = *code_.index_at(static_cast<std::int32_t>(in.offset)) + 1;
    if (next >= code_.instructions.size()) throw Error(ErrorCode::StackMismatch, "control falls off the end of the method");
    reach(next, sorts, in.offset);
  }

  // ---- assembly

  void assemble() {
    for (std::size_t b = 0; b < starts_.size(); ++b) {
      if (!entry_[b]) continue;
      if (targeted_.count(starts_[b])) {
        Stmt s;
        s.kind = Stmt::Kind::Label;
        s.label = label_for(starts_[b]);
        s.offset = static_cast<std::int32_t>(code_.instructions[starts_[b]].offset);
        body_.stmts.push_back(std::move(s));
      }
      for (auto& s : out_[b]) body_.stmts.push_back(std::move(s));
    }
  }

  // Untyped reference locals take the type of what is stored in them; array
  // element types follow from the array expressions.
  void refine_types() {
    std::set<std::string> declared;
    for (const auto& l : body_.locals) {
      if (l.param || l.type != default_type(Sort::A)) declared.insert(l.name);
    }
    for (int round = 0; round < 8; ++round) {
      bool changed = false;
      std::map<std::string, std::optional<JType>> assigned;
      for (auto& s : body_.stmts) {
        if (s.lhs) {
          for (auto& a : s.lhs->args) retype(a);
        }
        if (s.expr) retype(*s.expr);
        if (s.kind == Stmt::Kind::Assign && s.lhs->kind == LValue::Kind::Array && s.lhs->args[0].type.kind() == JType::Kind::Array) {
          s.lhs->type = s.lhs->args[0].type.element();
        }
        if (s.kind == Stmt::Kind::Assign && s.lhs->kind == LValue::Kind::Local && s.expr->type.is_reference()) {
          auto [it, fresh] = assigned.emplace(s.lhs->name, s.expr->type);
          if (!fresh && it->second && *it->second != s.expr->type) it->second = std::nullopt;
        }
      }
      for (auto& l : body_.locals) {
        if (declared.count(l.name) || l.type != default_type(Sort::A) || !l.type.is_reference()) continue;
        auto it = assigned.find(l.name);
        if (it != assigned.end() && it->second && *it->second != l.type) {
          l.type = *it->second;
          changed = true;
        }
      }
      if (!changed) break;
    }
    for (auto& s : body_.stmts) {
      if (s.lhs && s.lhs->kind == LValue::Kind::Local) s.lhs->type = body_.find_local(s.lhs->name)->type;
    }
  }

  void retype(Expr& e) {
    for (auto& a : e.args) retype(a);
    if (e.kind == Expr::Kind::Local) {
      e.type = body_.find_local(e.text)->type;
    } else if (e.kind == Expr::Kind::ArrayRead && e.args[0].type.kind() == JType::Kind::Array) {
      JType el = e.args[0].type.element();
      if (sort_of(el) == sort_of(e.type)) e.type = el;
    }
  }

  const MethodInfo& m_;
  std::string owner_;
  const CodeAttribute& code_;
  grimp::Body body_;
  std::map<VarKey, std::string> vars_;
  std::set<std::string> taken_;
  int temp_counter_ = 0;
  int new_counter_ = 0;

  std::vector<std::size_t> starts_;
  std::map<std::size_t, std::size_t> block_at_;
  std::set<std::size_t> targeted_;
  std::vector<std::optional<std::vector<Sort>>> entry_;
  std::vector<std::vector<Stmt>> out_;
  std::deque<std::size_t> work_;
  std::vector<std::size_t> group_;
  std::map<std::size_t, std::size_t> group_names_;
  std::size_t merge_block_ = 0;

  std::vector<Expr> stack_;
  std::vector<Stmt>* stmts_ = nullptr;
  std::uint32_t offset_ = 0;
};

}  // namespace

grimp::Body simulate_stack(const MethodInfo& m, std::string_view owner) {
  if (!m.code) throw Error(ErrorCode::Unsupported, "method has no code", dotted_name(owner) + "." + m.name);
  try {
    return Lifter(m, owner).run();
  } catch (const Error& e) {
    throw e.located(dotted_name(owner) + "." + m.name);
  }
}

}  // namespace bcv
