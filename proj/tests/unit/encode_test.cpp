// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <regex>

#include "bcv/boogie.hpp"
#include "bcv/encode.hpp"
#include "bcv/error.hpp"
#include "bcv/frames.hpp"

namespace bcv {
namespace {

using grimp::Ex;
using grimp::Op;
using K = JType::Kind;

grimp::Expr typed(grimp::Expr e, Ex ex) {
  e.ex = ex;
  return e;
}

grimp::Expr bool_local(const char* n) { return typed(grimp::local(n, JType::of(K::Boolean)), Ex::Boolean); }
grimp::Expr int_local(const char* n, Ex ex = Ex::Int) { return typed(grimp::local(n, JType::of(K::Int)), ex); }

struct Fixture {
  encode::Symbols sym;
  encode::Scope scope;
  Fixture() {
    for (const char* b : {"p", "q"}) scope.local_ex[b] = Ex::Boolean;
    for (const char* i : {"x", "y"}) scope.local_ex[i] = Ex::Int;
  }
  std::string tr(const grimp::Expr& e) { return boogie::print(encode::translate_expr(e, sym, scope)); }
  std::string tr(const grimp::Expr& e, Ex want) { return boogie::print(encode::translate_expr(e, want, sym, scope)); }
};

TEST(Encode, Types) {
  EXPECT_EQ(encode::translate_type(JType::of(K::Boolean)), boogie::Type::boolean());
  EXPECT_EQ(encode::translate_type(JType::of(K::Long)), boogie::Type::integer());
  EXPECT_EQ(encode::translate_type(JType::of(K::Char)), boogie::Type::integer());
  EXPECT_EQ(encode::translate_type(JType::of(K::Float)), boogie::Type::real());
  EXPECT_EQ(encode::translate_type(JType::parse("[I")), boogie::Type::named("Reference"));
}

TEST(Encode, Sanitize) {
  EXPECT_EQ(encode::sanitize("<init>"), "$init$");
  EXPECT_EQ(encode::sanitize("int"), "int$");
  EXPECT_EQ(encode::sanitize("plain_name"), "plain_name");
  EXPECT_TRUE(boogie::is_identifier(encode::sanitize("a-b c")));
}

TEST(Encode, Mangling) {
  encode::Mangler m;
  EXPECT_EQ(m.type_const("java/lang/Object"), "java.lang.Object");
  EXPECT_EQ(m.type_const("[I"), "$I");
  EXPECT_EQ(m.field({"p/C", "f", "I"}), "p.C.f");
  std::string a = m.method({"p/C", "m", "(I)I"});
  std::string b = m.method({"p/C", "m", "(J)I"});
  EXPECT_TRUE(std::regex_match(a, std::regex(R"(p\.C\.m#[0-9a-f]{8})"))) << a;
  EXPECT_NE(a, b);
  EXPECT_EQ(m.method({"p/C", "m", "(I)I"}), a);
  EXPECT_TRUE(boogie::is_identifier(m.method({"p/C", "<init>", "()V"})));
}

TEST(Encode, BooleanOperators) {
  Fixture f;
  auto p = bool_local("p"), q = bool_local("q");
  JType z = JType::of(K::Boolean);
  EXPECT_EQ(f.tr(typed(grimp::binary(Op::And, p, q, z), Ex::Boolean)), "p && q");
  EXPECT_EQ(f.tr(typed(grimp::binary(Op::Or, p, q, z), Ex::Boolean)), "p || q");
  EXPECT_EQ(f.tr(typed(grimp::binary(Op::Xor, p, q, z), Ex::Boolean)), "p != q");
  EXPECT_EQ(f.tr(typed(grimp::binary(Op::Eq, p, q, z), Ex::Boolean)), "p <==> q");
}

TEST(Encode, IntegerOperators) {
  Fixture f;
  auto x = int_local("x"), y = int_local("y");
  JType i = JType::of(K::Int);
  EXPECT_EQ(f.tr(typed(grimp::binary(Op::Div, x, y, i), Ex::Int)), "x div y");
  EXPECT_EQ(f.tr(typed(grimp::binary(Op::Rem, x, y, i), Ex::Int)), "x mod y");
  EXPECT_EQ(f.tr(typed(grimp::binary(Op::And, x, y, i), Ex::Int)), "bitand(x, y)");
  EXPECT_EQ(f.tr(typed(grimp::binary(Op::Shl, x, y, i), Ex::Int)), "shl(x, y)");
  EXPECT_EQ(f.tr(typed(grimp::binary(Op::Lt, x, y, JType::of(K::Boolean)), Ex::Boolean)), "x < y");
  EXPECT_EQ(f.tr(typed(grimp::binary(Op::Cmp, x, y, i), Ex::Int)), "cmp(x, y)");
}

TEST(Encode, BooleanIntConversions) {
  Fixture f;
  EXPECT_EQ(f.tr(bool_local("p"), Ex::Int), "(if p then 1 else 0)");
  EXPECT_EQ(f.tr(int_local("x", Ex::Boolean)), "x != 0");
  EXPECT_EQ(f.tr(typed(grimp::int_const(1), Ex::Boolean)), "true");
  EXPECT_EQ(f.tr(typed(grimp::int_const(0), Ex::Boolean)), "false");
}

TEST(Encode, OldOnlyInEnsures) {
  Fixture f;
  grimp::Expr old;
  old.kind = grimp::Expr::Kind::Intrinsic;
  old.intrinsic = grimp::Intrinsic::Old;
  old.type = JType::of(K::Int);
  old.ex = Ex::Int;
  old.args.push_back(int_local("x"));
  try {
    f.tr(old);
    FAIL() << "old() accepted outside ensures";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OldOutsideEnsures);
  }
  f.scope.in_ensures = true;
  EXPECT_EQ(f.tr(old), "old(x)");
}

TEST(Encode, StringIdsAreStableAndDistinct) {
  encode::Symbols sym;
  auto a = sym.string_id("alpha");
  auto b = sym.string_id("beta");
  EXPECT_NE(a, b);
  EXPECT_EQ(sym.string_id("alpha"), a);
  EXPECT_GE(a, 0);
}

boogie::Program program(const std::string& text) { return boogie::parse(text); }

TEST(Frames, FixpointOverCalls) {
  auto p = program(R"(
var #heap: Heap;
procedure writes() { #heap := #heap; }
procedure calls_writes() { call writes(); }
procedure pure(x: int) returns (r: int) { r := x; }
procedure calls_pure() { var r: int; call r := pure(1); }
procedure rec_a() { call rec_b(); }
procedure rec_b() { call rec_a(); }
procedure external();
procedure calls_external() { call external(); }
)");
  auto fr = frames::infer_frames(p);
  EXPECT_EQ(fr.at("writes").frame, frames::Frame::WholeHeap);
  EXPECT_EQ(fr.at("calls_writes").frame, frames::Frame::WholeHeap);
  EXPECT_EQ(fr.at("pure").frame, frames::Frame::Empty);
  EXPECT_EQ(fr.at("calls_pure").frame, frames::Frame::Empty);
  EXPECT_EQ(fr.at("rec_a").frame, frames::Frame::Empty);
  EXPECT_EQ(fr.at("rec_b").frame, frames::Frame::Empty);
  EXPECT_EQ(fr.at("external").frame, frames::Frame::WholeHeap);
  EXPECT_EQ(fr.at("calls_external").frame, frames::Frame::WholeHeap);
  EXPECT_FALSE(fr.at("calls_writes").provenance.empty());

  frames::apply_frames(p, fr);
  auto modifies = [&](const char* name) {
    for (const auto& s : p.find(boogie::Decl::Kind::Procedure, name)->specs)
      if (s.kind == boogie::Spec::Kind::Modifies) return true;
    return false;
  };
  EXPECT_TRUE(modifies("calls_writes"));
  EXPECT_FALSE(modifies("calls_pure"));
}

TEST(Frames, PurityEnforced) {
  auto p = program("var #heap: Heap;\nprocedure w() { #heap := #heap; }\nprocedure r() { }\n");
  auto fr = frames::infer_frames(p);
  EXPECT_NO_THROW(frames::enforce_purity({{"r", "p.C.r"}}, fr));
  try {
    frames::enforce_purity({{"r", "p.C.r"}, {"w", "p.C.w"}}, fr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ImpureSpec);
    EXPECT_NE(std::string(e.what()).find("p.C.w"), std::string::npos);
  }
}

}  // namespace
}  // namespace bcv
