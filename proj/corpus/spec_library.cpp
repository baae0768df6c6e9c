// SPDX-License-Identifier: Apache-2.0
#include "bcv/corpus.hpp"

namespace bcv::corpus {

namespace {

struct Ty {
  std::string d;  // descriptor
  Opcode load, ret;
  int slots;
};

Ty ty(const std::string& d) {
  switch (d[0]) {
    case 'J': return {d, Opcode::LLOAD, Opcode::LRETURN, 2};
    case 'F': return {d, Opcode::FLOAD, Opcode::FRETURN, 1};
    case 'D': return {d, Opcode::DLOAD, Opcode::DRETURN, 2};
    case 'L': return {d, Opcode::ALOAD, Opcode::ARETURN, 1};
    default: return {d, Opcode::ILOAD, Opcode::IRETURN, 1};
  }
}

const std::vector<std::string> kAll = {"I", "J", "F", "D", "Z", "Ljava/lang/Object;"};
const std::vector<std::string> kNumeric = {"I", "J", "F", "D"};

MethodPlan method(std::string name, std::string desc, CodeBuilder& c) {
  MethodPlan m;
  m.name = std::move(name);
  m.descriptor = std::move(desc);
  m.code = c.build();
  return m;
}

// `return a OP b;` as javac compiles it: a branch on the negated test.
MethodPlan comparison(const std::string& name, const Ty& t, Opcode cmp, Opcode negated_jump) {
  CodeBuilder c;
  auto no = c.new_label();
  c.local(t.load, 0).local(t.load, t.slots);
  if (cmp != Opcode::NOP) c.op(cmp);
  c.branch(negated_jump, no).iconst(1).op(Opcode::IRETURN).bind(no).iconst(0).op(Opcode::IRETURN);
  return method(name, "(" + t.d + t.d + ")Z", c);
}

ClassPlan operator_class(const spec::Namespace& ns) {
  ClassPlan p;
  p.name = ns.owner("Operator");
  for (const auto& d : kAll) {
    Ty t = ty(d);
    switch (d[0]) {
      case 'L':
        p.methods.push_back(comparison("eq", t, Opcode::NOP, Opcode::IF_ACMPNE));
        p.methods.push_back(comparison("neq", t, Opcode::NOP, Opcode::IF_ACMPEQ));
        break;
      case 'J':
        p.methods.push_back(comparison("eq", t, Opcode::LCMP, Opcode::IFNE));
        p.methods.push_back(comparison("neq", t, Opcode::LCMP, Opcode::IFEQ));
        break;
      case 'F':
      case 'D': {
        Opcode l = d == "F" ? Opcode::FCMPL : Opcode::DCMPL;
        p.methods.push_back(comparison("eq", t, l, Opcode::IFNE));
        p.methods.push_back(comparison("neq", t, l, Opcode::IFEQ));
        break;
      }
      default:
        p.methods.push_back(comparison("eq", t, Opcode::NOP, Opcode::IF_ICMPNE));
        p.methods.push_back(comparison("neq", t, Opcode::NOP, Opcode::IF_ICMPEQ));
    }
  }
  for (const auto& d : kNumeric) {
    Ty t = ty(d);
    if (d == "I") {
      p.methods.push_back(comparison("lt", t, Opcode::NOP, Opcode::IF_ICMPGE));
      p.methods.push_back(comparison("lte", t, Opcode::NOP, Opcode::IF_ICMPGT));
      p.methods.push_back(comparison("gt", t, Opcode::NOP, Opcode::IF_ICMPLE));
      p.methods.push_back(comparison("gte", t, Opcode::NOP, Opcode::IF_ICMPLT));
      continue;
    }
    Opcode g = d == "J" ? Opcode::LCMP : d == "F" ? Opcode::FCMPG : Opcode::DCMPG;
    Opcode l = d == "J" ? Opcode::LCMP : d == "F" ? Opcode::FCMPL : Opcode::DCMPL;
    p.methods.push_back(comparison("lt", t, g, Opcode::IFGE));
    p.methods.push_back(comparison("lte", t, g, Opcode::IFGT));
    p.methods.push_back(comparison("gt", t, l, Opcode::IFLE));
    p.methods.push_back(comparison("gte", t, l, Opcode::IFLT));
  }
  {
    CodeBuilder c;
    auto no = c.new_label();
    c.iload(0).branch(Opcode::IFNE, no).iconst(1).op(Opcode::IRETURN).bind(no).iconst(0).op(Opcode::IRETURN);
    p.methods.push_back(method("not", "(Z)Z", c));
  }
  {
    // !a | b
    CodeBuilder c;
    auto f = c.new_label();
    auto join = c.new_label();
    c.iload(0).branch(Opcode::IFNE, f).iconst(1).go(join).bind(f).iconst(0).bind(join);
    c.iload(1).op(Opcode::IOR).op(Opcode::IRETURN);
    p.methods.push_back(method("implies", "(ZZ)Z", c));
  }
  return p;
}

ClassPlan special_class(const spec::Namespace& ns) {
  ClassPlan p;
  p.name = ns.owner("Special");
  for (const auto& d : kAll) {
    Ty t = ty(d);
    {
      CodeBuilder c;
      auto no = c.new_label();
      c.iload(0).branch(Opcode::IFEQ, no).local(t.load, 1).op(t.ret).bind(no).local(t.load, 1 + t.slots).op(t.ret);
      p.methods.push_back(method("conditional", "(Z" + d + d + ")" + d, c));
    }
    {
      CodeBuilder c;
      c.local(t.load, 0).op(t.ret);
      p.methods.push_back(method("old", "(" + d + ")" + d, c));
    }
  }
  return p;
}

ClassPlan quantifier_class(const spec::Namespace& ns) {
  ClassPlan p;
  p.name = ns.owner("Quantifier");
  for (const auto& d : kAll) {
    Ty t = ty(d);
    for (const char* q : {"forall", "exists"}) {
      CodeBuilder c;
      c.iload(t.slots).op(Opcode::IRETURN);
      p.methods.push_back(method(q, "(" + d + "Z)Z", c));
    }
  }
  return p;
}

ClassPlan binding_class(const spec::Namespace& ns) {
  ClassPlan p;
  p.name = ns.owner("Binding");
  auto add = [&](const char* name, const char* desc, Opcode value, Opcode ret) {
    CodeBuilder c;
    c.op(value).op(ret);
    p.methods.push_back(method(name, desc, c));
  };
  add("integer", "()I", Opcode::ICONST_0, Opcode::IRETURN);
  add("longInteger", "()J", Opcode::LCONST_0, Opcode::LRETURN);
  add("floatingPoint", "()F", Opcode::FCONST_0, Opcode::FRETURN);
  add("real", "()D", Opcode::DCONST_0, Opcode::DRETURN);
  add("bool", "()Z", Opcode::ICONST_0, Opcode::IRETURN);
  add("reference", "()Ljava/lang/Object;", Opcode::ACONST_NULL, Opcode::ARETURN);
  return p;
}

ClassPlan contract_class(const spec::Namespace& ns) {
  ClassPlan p;
  p.name = ns.owner("Contract");
  for (const char* name : {"invariant", "assertion", "assumption"}) {
    CodeBuilder c;
    c.op(Opcode::RETURN);
    p.methods.push_back(method(name, "(Z)V", c));
  }
  return p;
}

}  // namespace

std::vector<ClassPlan> spec_library(const spec::Namespace& ns) {
  return {operator_class(ns), special_class(ns), quantifier_class(ns), binding_class(ns), contract_class(ns)};
}

}  // namespace bcv::corpus
