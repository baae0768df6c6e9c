// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <set>

#include "aggregate_oracle.hpp"
#include "bcv/class_builder.hpp"
#include "bcv/error.hpp"
#include "bcv/lift.hpp"
#include "bcv/spec.hpp"

namespace bcv {
namespace {

using interp::Value;

const spec::Namespace kNs;

ClassFile compile(const std::string& desc, const CodeBuilder& cb, std::vector<AnnotationValue> annotations = {}) {
  ClassPlan plan;
  plan.name = "t/T";
  MethodPlan m;
  m.name = "m";
  m.descriptor = desc;
  m.code = cb.build();
  m.annotations = std::move(annotations);
  plan.methods.push_back(std::move(m));
  return parse_class(build_class(plan));
}

grimp::Body lift(const ClassFile& cf) { return infer_expected_types(simulate_stack(cf.methods.at(0), cf.this_class)); }

spec::Context context() {
  spec::Context ctx;
  ctx.is_pure = [](const MemberRef&) { return false; };
  return ctx;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::Io;
}

CodeBuilder& op_call(CodeBuilder& cb, const char* name, const char* desc) {
  return cb.invokestatic(kNs.owner("Operator"), name, desc);
}

TEST(Spec, NamespaceNames) {
  EXPECT_EQ(kNs.annotation("Require"), "byteback.annotations.Contract$Require");
  EXPECT_EQ(kNs.owner("Operator"), "byteback/annotations/Operator");
  spec::Namespace other{"my.spec"};
  EXPECT_EQ(other.owner("Binding"), "my/spec/Binding");
}

TEST(Spec, IntrinsicTableIsInjective) {
  std::set<std::string> keys;
  for (const auto& [m, ref] : spec::intrinsic_table(kNs)) {
    EXPECT_TRUE(keys.insert(m.owner + "." + m.name + m.descriptor).second) << m.name << m.descriptor;
    auto back = spec::recognize_intrinsic(m, kNs);
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(*back, ref);
  }
  EXPECT_FALSE(spec::recognize_intrinsic({kNs.owner("Operator"), "eq", "(Ljava/lang/String;)Z"}, kNs));
  EXPECT_FALSE(spec::recognize_intrinsic({"other/Operator", "eq", "(II)Z"}, kNs));
}

TEST(Spec, AggregateInlinesChain) {
  CodeBuilder cb;
  // t = a + 1; return lt(t, b)
  cb.iload(0).iconst(1).op(Opcode::IADD).istore(2).iload(2).iload(1);
  op_call(cb, "lt", "(II)Z").op(Opcode::IRETURN);
  auto agg = spec::aggregate(lift(compile("(II)Z", cb)), context());
  EXPECT_EQ(agg.expr.kind, grimp::Expr::Kind::Intrinsic);
  EXPECT_EQ(agg.expr.intrinsic, grimp::Intrinsic::Lt);
  interp::TestHeap heap;
  EXPECT_EQ(spec::evaluate(agg, {Value::of_int(1), Value::of_int(3)}, heap), Value::of_int(1));
  EXPECT_EQ(spec::evaluate(agg, {Value::of_int(2), Value::of_int(3)}, heap), Value::of_int(0));
}

TEST(Spec, SsaRenamesReassignedSlots) {
  CodeBuilder cb;
  cb.iload(0).iconst(1).op(Opcode::IADD).istore(0).iload(0).iload(0).op(Opcode::IMUL).op(Opcode::IRETURN);
  auto body = lift(compile("(I)I", cb));
  EXPECT_EQ(code_of([&] { spec::aggregate_ssa(body, context()); }), ErrorCode::NonSsa);
  auto agg = spec::aggregate(body, context());
  interp::TestHeap heap;
  EXPECT_EQ(spec::evaluate(agg, {Value::of_int(4)}, heap), Value::of_int(25));
}

TEST(Spec, BranchingIsNotAggregable) {
  CodeBuilder cb;
  auto no = cb.new_label();
  cb.iload(0).branch(Opcode::IFEQ, no).iconst(1).op(Opcode::IRETURN).bind(no).iconst(0).op(Opcode::IRETURN);
  auto body = lift(compile("(I)Z", cb));
  auto v = spec::check_aggregable(body, context());
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v[0].reason, spec::Violation::Reason::Branching);
  EXPECT_EQ(code_of([&] { spec::aggregate(body, context()); }), ErrorCode::NotAggregable);
}

TEST(Spec, HeapWriteAndImpureCallAreViolations) {
  CodeBuilder w;
  w.iconst(1).field(Opcode::PUTSTATIC, "t/T", "x", "I").iconst(1).op(Opcode::IRETURN);
  auto v = spec::check_aggregable(lift(compile("()Z", w)), context());
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v[0].reason, spec::Violation::Reason::ImpureWrite);

  CodeBuilder c;
  c.invokestatic("t/Other", "g", "()Z").op(Opcode::IRETURN);
  auto body = lift(compile("()Z", c));
  v = spec::check_aggregable(body, context());
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v[0].reason, spec::Violation::Reason::ImpureCall);
  auto ctx = context();
  ctx.is_pure = [](const MemberRef& m) { return m.owner == "t/Other"; };
  EXPECT_TRUE(spec::check_aggregable(body, ctx).empty());
}

TEST(Spec, NodeBudget) {
  CodeBuilder cb;
  cb.iload(0).istore(1);
  for (int k = 0; k < 20; ++k) cb.iload(1).iload(1).op(Opcode::IADD).istore(1);
  cb.iload(1).op(Opcode::IRETURN);
  auto body = lift(compile("(I)I", cb));
  auto ctx = context();
  ctx.max_nodes = 1000;
  EXPECT_EQ(code_of([&] { spec::aggregate(body, ctx); }), ErrorCode::AggregateTooLarge);
  ctx.max_nodes = 100'000'000;
  EXPECT_NO_THROW(spec::aggregate(body, ctx));
}

TEST(Spec, BindingOutsideQuantifierEscapes) {
  CodeBuilder cb;
  cb.invokestatic(kNs.owner("Binding"), "integer", "()I").istore(0).iload(0).iconst(0);
  op_call(cb, "eq", "(II)Z").op(Opcode::IRETURN);
  EXPECT_EQ(code_of([&] { spec::aggregate(lift(compile("()Z", cb)), context()); }), ErrorCode::BindingEscape);
}

TEST(Spec, QuantifierAggregates) {
  CodeBuilder cb;
  cb.invokestatic(kNs.owner("Binding"), "integer", "()I").istore(1).iload(1).iload(1).iload(0);
  op_call(cb, "lt", "(II)Z");
  cb.invokestatic(kNs.owner("Quantifier"), "exists", "(IZ)Z").op(Opcode::IRETURN);
  auto agg = spec::aggregate(lift(compile("(I)Z", cb)), context());
  EXPECT_EQ(agg.expr.intrinsic, grimp::Intrinsic::Exists);
  interp::TestHeap heap;
  EXPECT_EQ(code_of([&] { spec::evaluate(agg, {Value::of_int(1)}, heap); }), ErrorCode::Unsupported);
}

TEST(Spec, ContractsResolve) {
  ClassPlan plan;
  plan.name = "t/C";
  auto predicate = [&](const char* name, const char* desc) {
    MethodPlan m;
    m.name = name;
    m.descriptor = desc;
    m.annotations.push_back({kNs.annotation("Predicate"), {}});
    CodeBuilder cb;
    cb.iconst(1).op(Opcode::IRETURN);
    m.code = cb.build();
    return m;
  };
  plan.methods.push_back(predicate("pre", "(I)Z"));
  plan.methods.push_back(predicate("post", "(II)Z"));
  MethodPlan m;
  m.name = "f";
  m.descriptor = "(I)I";
  m.annotations.push_back({kNs.annotation("Require"), {{"value", ElementValue::of_string("pre")}}});
  m.annotations.push_back({kNs.annotation("Ensure"), {{"value", ElementValue::of_string("post")}}});
  CodeBuilder cb;
  cb.iload(0).op(Opcode::IRETURN);
  m.code = cb.build();
  plan.methods.push_back(m);
  auto contracts = spec::resolve_contracts(parse_class(build_class(plan)), kNs);
  ASSERT_EQ(contracts.size(), 3U);
  EXPECT_TRUE(contracts[0].is_predicate);
  ASSERT_EQ(contracts[2].preconditions.size(), 1U);
  EXPECT_EQ(contracts[2].preconditions[0].name, "pre");
  ASSERT_EQ(contracts[2].postconditions.size(), 1U);
  EXPECT_TRUE(contracts[2].result_param.has_value());

  plan.methods[2].annotations[1].elements[0].second = ElementValue::of_string("missing");
  EXPECT_EQ(code_of([&] { spec::resolve_contracts(parse_class(build_class(plan)), kNs); }), ErrorCode::NoSuchPredicate);
  plan.methods[2].annotations[1].elements[0].second = ElementValue::of_string("pre");
  EXPECT_EQ(code_of([&] { spec::resolve_contracts(parse_class(build_class(plan)), kNs); }), ErrorCode::SignatureMismatch);
}

TEST(Spec, InlineChecksAndInvariants) {
  CodeBuilder cb;
  auto head = cb.new_label();
  auto out = cb.new_label();
  cb.iconst(0).istore(1).bind(head);
  cb.iload(1).iconst(0);
  op_call(cb, "gte", "(II)Z").invokestatic(kNs.owner("Contract"), "invariant", "(Z)V");
  cb.iload(1).iload(0).branch(Opcode::IF_ICMPGE, out).iinc(1, 1).go(head).bind(out);
  cb.iload(1).iload(0);
  op_call(cb, "eq", "(II)Z").invokestatic(kNs.owner("Contract"), "assertion", "(Z)V");
  cb.op(Opcode::RETURN);
  auto body = lift(compile("(I)V", cb));
  auto cfg = build_cfg(body);
  auto loops = detect_loops(cfg, body);
  ASSERT_EQ(loops.size(), 1U);
  auto inv = spec::extract_loop_invariants(body, cfg, loops, context());
  ASSERT_EQ(inv.by_loop.at(0).size(), 1U);
  EXPECT_EQ(inv.by_loop.at(0)[0].expr.intrinsic, grimp::Intrinsic::Gte);
  auto checks = spec::extract_inline_checks(inv.body, context());
  ASSERT_EQ(checks.checks.size(), 1U);
  EXPECT_FALSE(checks.checks[0].assume);
  EXPECT_EQ(checks.checks[0].expr.expr.intrinsic, grimp::Intrinsic::Eq);

  CodeBuilder outside;
  outside.iconst(1).invokestatic(kNs.owner("Contract"), "invariant", "(Z)V").op(Opcode::RETURN);
  auto flat = lift(compile("()V", outside));
  auto flat_cfg = build_cfg(flat);
  EXPECT_EQ(code_of([&] { spec::extract_loop_invariants(flat, flat_cfg, detect_loops(flat_cfg, flat), context()); }),
            ErrorCode::InvariantOutsideLoop);
}

TEST(Spec, RandomAggregatesMatchInterpreter) {
  testing::Rng rng(20241);
  testing::AggregateOracleStats stats;
  for (int k = 0; k < 200; ++k) {
    auto err = testing::check_random_aggregate(rng, k, 10, stats);
    ASSERT_FALSE(err.has_value()) << *err;
  }
  EXPECT_EQ(stats.bodies, 200);
  EXPECT_GT(stats.max_nodes, 10);
}

}  // namespace
}  // namespace bcv
