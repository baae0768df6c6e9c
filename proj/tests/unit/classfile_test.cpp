// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "bcv/class_builder.hpp"
#include "bcv/classfile.hpp"
#include "bcv/error.hpp"
#include "rng.hpp"

namespace bcv {
namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::Io;
}

TEST(Classfile, BadMagic) {
  std::vector<std::uint8_t> bytes = {0xCA, 0xFE, 0xBA, 0xBF, 0, 0, 0, 52};
  EXPECT_EQ(code_of([&] { parse_class(bytes); }), ErrorCode::Magic);
}

TEST(Classfile, TruncatedInput) {
  ClassPlan plan;
  plan.name = "A";
  auto bytes = build_class(plan);
  for (std::size_t n : {4ul, 9ul, bytes.size() - 1}) {
    std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + static_cast<long>(n));
    EXPECT_EQ(code_of([&] { parse_class(cut); }), ErrorCode::Truncated) << n;
  }
}

TEST(Classfile, EmptyClassRoundTrip) {
  ClassPlan plan;
  plan.name = "A";
  ClassFile cf = parse_class(build_class(plan));
  EXPECT_EQ(cf.this_class, "A");
  EXPECT_TRUE(cf.methods.empty());
  EXPECT_EQ(cf.super_class, std::optional<std::string>("java/lang/Object"));
  EXPECT_EQ(to_plan(cf), normalize(plan));
  EXPECT_EQ(build_class(to_plan(cf)), build_class(plan));
}

TEST(Classfile, VersionOutsideRangeRejected) {
  ClassPlan plan;
  plan.name = "A";
  plan.major_version = 48;
  EXPECT_EQ(code_of([&] { parse_class(build_class(plan)); }), ErrorCode::Unsupported);
  plan.major_version = 66;
  EXPECT_EQ(code_of([&] { parse_class(build_class(plan)); }), ErrorCode::Unsupported);
  plan.major_version = 61;
  EXPECT_EQ(parse_class(build_class(plan)).major_version, 61);
}

TEST(Classfile, BranchToUnboundLabel) {
  CodeBuilder b;
  b.go(7);
  ClassPlan plan;
  plan.name = "A";
  plan.methods.push_back({access::kPublic | access::kStatic, "m", "()V", {}, {}, b.build()});
  EXPECT_EQ(code_of([&] { build_class(plan); }), ErrorCode::PlanInconsistent);
}

TEST(Classfile, StackUnderflowAndMismatch) {
  ClassPlan plan;
  plan.name = "A";
  CodeBuilder under;
  under.op(Opcode::IADD).op(Opcode::IRETURN);
  plan.methods.push_back({access::kPublic | access::kStatic, "m", "()I", {}, {}, under.build()});
  EXPECT_EQ(code_of([&] { build_class(plan); }), ErrorCode::PlanInconsistent);

  CodeBuilder mismatch;
  auto join = mismatch.new_label();
  auto other = mismatch.new_label();
  mismatch.iload(0).branch(Opcode::IFEQ, other).iconst(1).go(join).bind(other).bind(join).op(Opcode::RETURN);
  plan.methods[0] = {access::kPublic | access::kStatic, "m", "(I)V", {}, {}, mismatch.build()};
  EXPECT_EQ(code_of([&] { build_class(plan); }), ErrorCode::PlanInconsistent);
}

TEST(Classfile, MaxStackAndLocals) {
  CodeBuilder b;
  b.iload(0).iload(1).iload(2).op(Opcode::IADD).op(Opcode::IADD).istore(5).iload(5).op(Opcode::IRETURN);
  ClassPlan plan;
  plan.name = "A";
  plan.methods.push_back({access::kPublic | access::kStatic, "m", "(III)I", {}, {}, b.build()});
  ClassFile cf = parse_class(build_class(plan));
  const auto& code = *cf.methods[0].code;
  EXPECT_EQ(code.max_stack, 3);
  EXPECT_EQ(code.max_locals, 6);
}

TEST(Classfile, ShortAndWideEncodings) {
  CodeBuilder b;
  b.iconst(-1).istore(3).iconst(100).istore(300).iinc(300, 1000).iconst(40000).istore(1)
      .lconst(5).lstore(4).dconst(2.5).dstore(6).iload(300).op(Opcode::IRETURN);
  ClassPlan plan;
  plan.name = "A";
  plan.methods.push_back({access::kPublic | access::kStatic, "m", "()I", {}, {}, b.build()});
  auto bytes = build_class(plan);
  ClassFile cf = parse_class(bytes);
  EXPECT_EQ(to_plan(cf), normalize(plan));
  const auto& ins = cf.methods[0].code->instructions;
  EXPECT_EQ(ins[1].op, Opcode::ISTORE);
  EXPECT_EQ(ins[1].local, 3);
  EXPECT_EQ(ins[4].op, Opcode::IINC);
  EXPECT_EQ(ins[4].immediate, 1000);
  EXPECT_EQ(ins[5].op, Opcode::LDC);
  EXPECT_EQ(ins[5].constant, ConstantValue::of_int(40000));
  EXPECT_EQ(ins[7].constant, ConstantValue::of_long(5));
}

TEST(Classfile, LongJumpsBecomeGotoW) {
  CodeBuilder b;
  auto top = b.new_label();
  auto done = b.new_label();
  auto body = b.new_label();
  b.bind(top).iload(0).branch(Opcode::IFNE, body).go(done).bind(body);
  for (int i = 0; i < 12000; ++i) b.iinc(0, -1);
  b.go(top).bind(done).op(Opcode::RETURN);
  ClassPlan plan;
  plan.name = "A";
  plan.methods.push_back({access::kPublic | access::kStatic, "m", "(I)V", {}, {}, b.build()});
  ClassFile cf = parse_class(build_class(plan));
  EXPECT_EQ(to_plan(cf), normalize(plan));
  int wide = 0;
  for (const auto& ins : cf.methods[0].code->instructions) wide += ins.op == Opcode::GOTO;
  EXPECT_EQ(wide, 2);
  EXPECT_GT(cf.methods[0].code->code_length, 36000u);
}

TEST(Classfile, ModifiedUtf8RoundTrip) {
  std::string text = std::string("a\0b", 3) + "\xC3\xA9" + "\xF0\x9F\x98\x80";
  auto bytes = encode_modified_utf8(text);
  // NUL is two bytes; the supplementary character becomes a surrogate pair of 3-byte groups.
  EXPECT_EQ(bytes.size(), 1u + 2u + 1u + 2u + 6u);
  EXPECT_EQ(decode_modified_utf8(bytes), text);

  ClassPlan plan;
  plan.name = "p/\xC3\xA9t\xF0\x9F\x98\x80";
  EXPECT_EQ(parse_class(build_class(plan)).this_class, plan.name);
}

AnnotationValue ann(std::string type, std::string value) {
  return {std::move(type), {{"value", ElementValue::of_string(std::move(value))}}};
}

TEST(Classfile, AnnotationsInOrderAndRepeatableExpanded) {
  CodeBuilder b;
  b.op(Opcode::RETURN);
  MethodPlan m{access::kPublic | access::kStatic, "m", "()V", {}, {}, b.build()};
  AnnotationValue container{"byteback.annotations.Contract$Ensures",
                            {{"value", ElementValue::of_array({ElementValue::of_annotation(ann("byteback.annotations.Contract$Ensure", "a")),
                                                               ElementValue::of_annotation(ann("byteback.annotations.Contract$Ensure", "b"))})}}};
  m.annotations = {ann("byteback.annotations.Contract$Require", "no_ones"), container};
  MethodPlan plain{access::kPublic | access::kStatic, "n", "()V", {}, {}, b.build()};
  ClassPlan plan;
  plan.name = "A";
  plan.methods = {m, plain};
  ClassFile cf = parse_class(build_class(plan));
  auto anns = read_annotations(cf.methods[0]);
  ASSERT_EQ(anns.size(), 3u);
  EXPECT_EQ(anns[0].type, "byteback.annotations.Contract$Require");
  EXPECT_EQ(anns[0].string_value(), std::optional<std::string>("no_ones"));
  EXPECT_EQ(anns[1].string_value(), std::optional<std::string>("a"));
  EXPECT_EQ(anns[2].string_value(), std::optional<std::string>("b"));
  EXPECT_TRUE(read_annotations(cf.methods[1]).empty());
}

TEST(Classfile, WideConstantsOccupyTwoSlots) {
  CodeBuilder b;
  b.ldc(ConstantValue::of_long(1234567890123LL)).op(Opcode::POP2).ldc(ConstantValue::of_double(0.1)).op(Opcode::POP2)
      .ldc(ConstantValue::of_int(99999)).op(Opcode::IRETURN);
  ClassPlan plan;
  plan.name = "A";
  plan.methods.push_back({access::kPublic | access::kStatic, "m", "()I", {}, {}, b.build()});
  ClassFile cf = parse_class(build_class(plan));
  const auto& ins = cf.methods[0].code->instructions;
  EXPECT_EQ(ins[0].constant, ConstantValue::of_long(1234567890123LL));
  EXPECT_EQ(ins[2].constant, ConstantValue::of_double(0.1));
  EXPECT_EQ(ins[4].constant, ConstantValue::of_int(99999));
}

TEST(Classfile, AbstractMethodHasNoCode) {
  ClassPlan plan;
  plan.name = "A";
  plan.access = access::kPublic | access::kAbstract;
  plan.methods.push_back({access::kPublic | access::kAbstract, "m", "()V", {}, {}, std::nullopt});
  ClassFile cf = parse_class(build_class(plan));
  EXPECT_TRUE(cf.methods[0].is_abstract());
  EXPECT_FALSE(cf.methods[0].code.has_value());
}

// Random plans: straight-line integer code with forward and backward branches.
ClassPlan random_plan(testing::Rng& rng) {
  ClassPlan plan;
  plan.name = "r/P" + std::to_string(rng.uniform(0, 99));
  int methods = rng.uniform(1, 3);
  for (int m = 0; m < methods; ++m) {
    CodeBuilder b;
    int nlabels = rng.uniform(1, 4);
    std::vector<CodeBuilder::Label> labels;
    for (int i = 0; i < nlabels; ++i) labels.push_back(b.new_label());
    std::vector<bool> bound(labels.size(), false);
    int params = rng.uniform(0, 3);
    int locals = params + rng.uniform(0, 300);
    for (int k = 0; k < rng.uniform(1, 30); ++k) {
      switch (rng.uniform(0, 6)) {
        case 0: b.iconst(rng.uniform(-70000, 70000)).istore(rng.uniform(0, locals)); break;
        case 1: b.iinc(rng.uniform(0, locals), rng.uniform(-300, 300)); break;
        case 2: b.iload(rng.uniform(0, locals)).branch(Opcode::IFLT, rng.pick(labels)); break;
        case 3: b.lconst(rng.uniform(-3, 3)).lstore(rng.uniform(0, locals)); break;
        case 4: b.ldc(ConstantValue::of_string("s" + std::to_string(rng.uniform(0, 5)))).astore(rng.uniform(0, locals)); break;
        case 5: {
          int i = rng.uniform(0, nlabels - 1);
          if (!bound[static_cast<std::size_t>(i)]) {
            b.bind(labels[static_cast<std::size_t>(i)]);
            bound[static_cast<std::size_t>(i)] = true;
          }
          break;
        }
        default: b.iload(rng.uniform(0, locals)).iload(rng.uniform(0, locals)).op(Opcode::IMUL).istore(rng.uniform(0, locals)); break;
      }
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (!bound[i]) b.bind(labels[i]);
    }
    b.iconst(0).op(Opcode::IRETURN);
    std::string desc = "(" + std::string(static_cast<std::size_t>(params), 'I') + ")I";
    MethodPlan mp{access::kPublic | access::kStatic, "m" + std::to_string(m), desc, {}, {}, b.build()};
    if (rng.chance(0.5)) {
      for (int p = 0; p < params; ++p) mp.parameter_names.push_back("arg" + std::to_string(p));
    }
    if (rng.chance(0.3)) mp.annotations.push_back(ann("x.Y$Z", "v" + std::to_string(m)));
    plan.methods.push_back(std::move(mp));
  }
  if (rng.chance(0.5)) plan.fields.push_back({access::kPrivate, "f", "[J", {}});
  return plan;
}

TEST(ClassfileProperty, ParseBuildIsIdentityOnNormalForm) {
  testing::Rng rng(20261016);
  for (int i = 0; i < 300; ++i) {
    ClassPlan plan = random_plan(rng);
    ClassFile cf = parse_class(build_class(plan));
    ASSERT_EQ(to_plan(cf), normalize(plan)) << "plan " << i;
    for (const auto& m : cf.methods) {
      for (const auto& ins : m.code->instructions) {
        for (auto t : ins.targets) ASSERT_TRUE(m.code->index_at(t).has_value());
      }
    }
  }
}

}  // namespace
}  // namespace bcv
