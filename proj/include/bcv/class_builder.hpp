// SPDX-License-Identifier: Apache-2.0
//
// Declarative classfile synthesis. A ClassPlan describes a class with code
// written against symbolic labels; build_class() lays it out, interns the
// constant pool, picks short/wide encodings and computes max_stack/max_locals.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bcv/classfile.hpp"

namespace bcv {

struct LabelMark {
  std::int32_t id = 0;
  friend bool operator==(const LabelMark&, const LabelMark&) = default;
};

using CodeItem = std::variant<RawInstruction, LabelMark>;

struct CodePlan {
  std::vector<CodeItem> items;                  // branch targets are label ids
  std::vector<ExceptionEntry> exception_table;  // start/end/handler are label ids
  std::vector<LocalName> local_names;           // each spans the whole method

  friend bool operator==(const CodePlan&, const CodePlan&) = default;
};

struct FieldPlan {
  std::uint16_t access = access::kPrivate;
  std::string name;
  std::string descriptor;
  std::vector<AnnotationValue> annotations;

  friend bool operator==(const FieldPlan&, const FieldPlan&) = default;
};

struct MethodPlan {
  std::uint16_t access = access::kPublic | access::kStatic;
  std::string name;
  std::string descriptor;
  std::vector<AnnotationValue> annotations;
  std::vector<std::string> parameter_names;
  std::optional<CodePlan> code;

  friend bool operator==(const MethodPlan&, const MethodPlan&) = default;
};

struct ClassPlan {
  std::uint16_t major_version = 52;
  std::uint16_t access = access::kPublic | access::kSuper;
  std::string name;  // internal name
  std::optional<std::string> super_class = std::string("java/lang/Object");
  std::vector<std::string> interfaces;
  std::vector<FieldPlan> fields;
  std::vector<MethodPlan> methods;
  std::vector<AnnotationValue> annotations;

  friend bool operator==(const ClassPlan&, const ClassPlan&) = default;
};

/// Emits classfile bytes. Throws E_PLAN_INCONSISTENT for unbound labels,
/// operand overflow, stack underflow or mismatched depths at merge points.
std::vector<std::uint8_t> build_class(const ClassPlan& plan);

/// Canonical opcodes, labels renumbered by position, unreferenced labels dropped.
ClassPlan normalize(const ClassPlan& plan);

/// Converts a parsed class back into its plan normal form.
ClassPlan to_plan(const ClassFile& cf);

// Fluent assembler for CodePlan.
class CodeBuilder {
 public:
  using Label = std::int32_t;

  Label new_label() { return next_label_++; }
  CodeBuilder& bind(Label l);

  CodeBuilder& op(Opcode op);
  CodeBuilder& iconst(std::int32_t v);
  CodeBuilder& lconst(std::int64_t v);
  CodeBuilder& dconst(double v);
  CodeBuilder& ldc(ConstantValue v);

  CodeBuilder& iload(int slot) { return local(Opcode::ILOAD, slot); }
  CodeBuilder& lload(int slot) { return local(Opcode::LLOAD, slot); }
  CodeBuilder& dload(int slot) { return local(Opcode::DLOAD, slot); }
  CodeBuilder& aload(int slot) { return local(Opcode::ALOAD, slot); }
  CodeBuilder& istore(int slot) { return local(Opcode::ISTORE, slot); }
  CodeBuilder& lstore(int slot) { return local(Opcode::LSTORE, slot); }
  CodeBuilder& dstore(int slot) { return local(Opcode::DSTORE, slot); }
  CodeBuilder& astore(int slot) { return local(Opcode::ASTORE, slot); }
  CodeBuilder& local(Opcode op, int slot);
  CodeBuilder& iinc(int slot, int delta);

  CodeBuilder& branch(Opcode op, Label target);
  CodeBuilder& go(Label target) { return branch(Opcode::GOTO, target); }
  CodeBuilder& tableswitch(Label dflt, std::int32_t low, const std::vector<Label>& targets);
  CodeBuilder& lookupswitch(Label dflt, const std::vector<std::pair<std::int32_t, Label>>& cases);

  CodeBuilder& field(Opcode op, std::string owner, std::string name, std::string descriptor);
  CodeBuilder& invoke(Opcode op, std::string owner, std::string name, std::string descriptor,
                      bool interface = false);
  CodeBuilder& invokestatic(std::string owner, std::string name, std::string descriptor) {
    return invoke(Opcode::INVOKESTATIC, std::move(owner), std::move(name), std::move(descriptor));
  }
  CodeBuilder& invokedynamic(std::string name, std::string descriptor, int bootstrap = 0);
  CodeBuilder& type_op(Opcode op, std::string class_name);
  CodeBuilder& newarray(JType::Kind element);

  CodeBuilder& local_name(int slot, std::string name, std::string descriptor);
  CodeBuilder& try_catch(Label start, Label end, Label handler, std::string type = {});

  CodePlan build() const { return plan_; }

 private:
  CodeBuilder& push(RawInstruction ins);

  CodePlan plan_;
  Label next_label_ = 0;
};

}  // namespace bcv
