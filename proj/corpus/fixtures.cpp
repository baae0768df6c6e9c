// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <stdexcept>

#include "bcv/corpus.hpp"

namespace bcv::corpus {

namespace {

constexpr const char* kPackage = "fixtures/";

// Calls into the contract library.
class Lib {
 public:
  explicit Lib(spec::Namespace ns) : ns_(std::move(ns)) {}

  CodeBuilder& op(CodeBuilder& c, const char* name, const std::string& desc) const {
    return c.invokestatic(ns_.owner("Operator"), name, desc);
  }
  CodeBuilder& special(CodeBuilder& c, const char* name, const std::string& desc) const {
    return c.invokestatic(ns_.owner("Special"), name, desc);
  }
  CodeBuilder& quantifier(CodeBuilder& c, const char* name, const std::string& desc) const {
    return c.invokestatic(ns_.owner("Quantifier"), name, desc);
  }
  CodeBuilder& binding(CodeBuilder& c, const char* name, const std::string& desc) const {
    return c.invokestatic(ns_.owner("Binding"), name, desc);
  }
  CodeBuilder& contract(CodeBuilder& c, const char* name) const {
    return c.invokestatic(ns_.owner("Contract"), name, "(Z)V");
  }

  AnnotationValue require(const std::string& p) const { return {ns_.annotation("Require"), {{"value", ElementValue::of_string(p)}}}; }
  AnnotationValue ensure(const std::string& p) const { return {ns_.annotation("Ensure"), {{"value", ElementValue::of_string(p)}}}; }
  AnnotationValue predicate() const { return {ns_.annotation("Predicate"), {}}; }
  AnnotationValue pure() const { return {ns_.annotation("Pure"), {}}; }

 private:
  spec::Namespace ns_;
};

MethodPlan method(std::string name, std::string desc, CodeBuilder& c, std::vector<AnnotationValue> anns = {},
                  std::uint16_t access = access::kPublic | access::kStatic) {
  MethodPlan m;
  m.access = access;
  m.name = std::move(name);
  m.descriptor = std::move(desc);
  m.annotations = std::move(anns);
  m.code = c.build();
  return m;
}

ClassPlan plan(const std::string& simple) {
  ClassPlan p;
  p.name = std::string(kPackage) + simple;
  return p;
}

std::string dotted(const ClassPlan& p) { return dotted_name(p.name); }

// contains / no_ones / nonnegative / summary.
Fixture summary(const Lib& lib) {
  ClassPlan p = plan("Summary");
  {
    // int i = Binding.integer();
    // return exists(i, lte(from, i) & lt(i, to) & eq(as[i], e));
    CodeBuilder c;
    c.local_name(0, "as", "[I").local_name(1, "e", "I").local_name(2, "from", "I").local_name(3, "to", "I");
    c.local_name(4, "i", "I");
    lib.binding(c, "integer", "()I").istore(4);
    c.iload(4).iload(2).iload(4);
    lib.op(c, "lte", "(II)Z");
    c.iload(4).iload(3);
    lib.op(c, "lt", "(II)Z");
    c.op(Opcode::IAND).aload(0).iload(4).op(Opcode::IALOAD).iload(1);
    lib.op(c, "eq", "(II)Z");
    c.op(Opcode::IAND);
    lib.quantifier(c, "exists", "(IZ)Z");
    c.op(Opcode::IRETURN);
    p.methods.push_back(method("contains", "([IIII)Z", c, {lib.pure()}));
  }
  {
    // return not(contains(values, 1, 0, values.length));
    CodeBuilder c;
    c.local_name(0, "values", "[I");
    c.aload(0).iconst(1).iconst(0).aload(0).op(Opcode::ARRAYLENGTH);
    c.invokestatic(p.name, "contains", "([IIII)Z");
    lib.op(c, "not", "(Z)Z");
    c.op(Opcode::IRETURN);
    p.methods.push_back(method("no_ones", "([I)Z", c, {lib.predicate()}));
  }
  {
    CodeBuilder c;
    c.local_name(0, "values", "[I").local_name(1, "result", "I");
    c.iload(1).iconst(0);
    lib.op(c, "gte", "(II)Z");
    c.op(Opcode::IRETURN);
    p.methods.push_back(method("nonnegative", "([II)Z", c, {lib.predicate()}));
  }
  {
    // int result = 0;
    // for (int i = 0; i < values.length; i++) {
    //   invariant(gte(result, 0));
    //   int v = values[i];
    //   if (v < 0) continue;
    //   if (v == 0) result++; else if (v == 1) result--; else result += v;
    // }
    // return result;
    CodeBuilder c;
    c.local_name(0, "values", "[I").local_name(1, "result", "I").local_name(2, "i", "I").local_name(3, "v", "I");
    auto head = c.new_label(), exit = c.new_label(), nonneg = c.new_label(), not0 = c.new_label();
    auto big = c.new_label(), next = c.new_label();
    c.iconst(0).istore(1).iconst(0).istore(2);
    c.bind(head).iload(2).aload(0).op(Opcode::ARRAYLENGTH).branch(Opcode::IF_ICMPGE, exit);
    c.iload(1).iconst(0);
    lib.op(c, "gte", "(II)Z");
    lib.contract(c, "invariant");
    c.aload(0).iload(2).op(Opcode::IALOAD).istore(3);
    c.iload(3).branch(Opcode::IFGE, nonneg).go(next);
    c.bind(nonneg).iload(3).branch(Opcode::IFNE, not0).iinc(1, 1).go(next);
    c.bind(not0).iload(3).iconst(1).branch(Opcode::IF_ICMPNE, big).iinc(1, -1).go(next);
    c.bind(big).iload(1).iload(3).op(Opcode::IADD).istore(1);
    c.bind(next).iinc(2, 1).go(head);
    c.bind(exit).iload(1).op(Opcode::IRETURN);
    p.methods.push_back(method("summary", "([I)I", c, {lib.require("no_ones"), lib.ensure("nonnegative")}));
  }
  return {"summary", "Array summary with a quantified precondition", {p}, {dotted(p)}, 0, std::nullopt};
}

// for (int k = 0; k < 3; k++) { boolean a = lte(0, k); boolean b = lte(k, 3); invariant(a & b); }
Fixture loop(const Lib& lib) {
  ClassPlan p = plan("Loop");
  CodeBuilder c;
  c.local_name(0, "k", "I").local_name(1, "a", "Z").local_name(2, "b", "Z");
  auto head = c.new_label(), exit = c.new_label();
  c.iconst(0).istore(0);
  c.bind(head).iload(0).iconst(3).branch(Opcode::IF_ICMPGE, exit);
  c.iconst(0).iload(0);
  lib.op(c, "lte", "(II)Z");
  c.istore(1).iload(0).iconst(3);
  lib.op(c, "lte", "(II)Z");
  c.istore(2).iload(1).iload(2).op(Opcode::IAND);
  lib.contract(c, "invariant");
  c.iinc(0, 1).go(head);
  c.bind(exit).op(Opcode::RETURN);
  p.methods.push_back(method("loop", "()V", c));
  return {"loop", "Counting loop with an aggregated invariant", {p}, {dotted(p)}, 0, std::nullopt};
}

// Counter with a field, a constructor and an old() postcondition.
Fixture counter(const Lib& lib) {
  ClassPlan p = plan("Counter");
  p.fields.push_back(FieldPlan{access::kPublic, "count", "I", {}});
  const std::uint16_t inst = access::kPublic;
  {
    CodeBuilder c;
    c.local_name(0, "this", "L" + p.name + ";");
    c.aload(0).invoke(Opcode::INVOKESPECIAL, "java/lang/Object", "<init>", "()V");
    c.aload(0).iconst(0).field(Opcode::PUTFIELD, p.name, "count", "I").op(Opcode::RETURN);
    p.methods.push_back(method("<init>", "()V", c, {}, inst));
  }
  {
    // return eq(count, old(count) + 1);
    CodeBuilder c;
    c.local_name(0, "this", "L" + p.name + ";");
    c.aload(0).field(Opcode::GETFIELD, p.name, "count", "I");
    c.aload(0).field(Opcode::GETFIELD, p.name, "count", "I");
    lib.special(c, "old", "(I)I");
    c.iconst(1).op(Opcode::IADD);
    lib.op(c, "eq", "(II)Z");
    c.op(Opcode::IRETURN);
    p.methods.push_back(method("incremented", "()Z", c, {lib.predicate()}, inst));
  }
  {
    CodeBuilder c;
    c.local_name(0, "this", "L" + p.name + ";");
    c.aload(0).aload(0).field(Opcode::GETFIELD, p.name, "count", "I").iconst(1).op(Opcode::IADD);
    c.field(Opcode::PUTFIELD, p.name, "count", "I").op(Opcode::RETURN);
    p.methods.push_back(method("increment", "()V", c, {lib.ensure("incremented")}, inst));
  }
  {
    CodeBuilder c;
    c.local_name(0, "this", "L" + p.name + ";");
    c.aload(0).field(Opcode::GETFIELD, p.name, "count", "I").op(Opcode::IRETURN);
    p.methods.push_back(method("get", "()I", c, {lib.pure()}, inst));
  }
  {
    // Counter c = new Counter(); c.increment(); return c.get();
    CodeBuilder c;
    c.local_name(0, "c", "L" + p.name + ";");
    c.type_op(Opcode::NEW, p.name).op(Opcode::DUP).invoke(Opcode::INVOKESPECIAL, p.name, "<init>", "()V").astore(0);
    c.aload(0).invoke(Opcode::INVOKEVIRTUAL, p.name, "increment", "()V");
    c.aload(0).invoke(Opcode::INVOKEVIRTUAL, p.name, "get", "()I").op(Opcode::IRETURN);
    p.methods.push_back(method("fresh", "()I", c));
  }
  return {"counter", "Object with a field, constructor and old() postcondition", {p}, {dotted(p)}, 0, std::nullopt};
}

Fixture gcd(const Lib& lib) {
  ClassPlan p = plan("GCD");
  {
    CodeBuilder c;
    c.local_name(0, "a", "I").local_name(1, "b", "I");
    c.iload(0).iconst(0);
    lib.op(c, "gt", "(II)Z");
    c.iload(1).iconst(0);
    lib.op(c, "gt", "(II)Z");
    c.op(Opcode::IAND).op(Opcode::IRETURN);
    p.methods.push_back(method("positive_arguments", "(II)Z", c, {lib.predicate()}));
  }
  {
    CodeBuilder c;
    c.local_name(0, "a", "I").local_name(1, "b", "I").local_name(2, "r", "I");
    c.iload(2).iconst(0);
    lib.op(c, "gt", "(II)Z");
    c.iload(2).iload(0);
    lib.op(c, "lte", "(II)Z");
    c.op(Opcode::IAND).op(Opcode::IRETURN);
    p.methods.push_back(method("result_is_positive", "(III)Z", c, {lib.predicate()}));
  }
  {
    // int x = a, y = b;
    // while (x != y) { invariant(gt(x, 0) & gt(y, 0) & lte(x, a)); if (x > y) x = x - y; else y = y - x; }
    // return x;
    CodeBuilder c;
    c.local_name(0, "a", "I").local_name(1, "b", "I").local_name(2, "x", "I").local_name(3, "y", "I");
    auto head = c.new_label(), exit = c.new_label(), other = c.new_label();
    c.iload(0).istore(2).iload(1).istore(3);
    c.bind(head).iload(2).iload(3).branch(Opcode::IF_ICMPEQ, exit);
    c.iload(2).iconst(0);
    lib.op(c, "gt", "(II)Z");
    c.iload(3).iconst(0);
    lib.op(c, "gt", "(II)Z");
    c.op(Opcode::IAND).iload(2).iload(0);
    lib.op(c, "lte", "(II)Z");
    c.op(Opcode::IAND);
    lib.contract(c, "invariant");
    c.iload(2).iload(3).branch(Opcode::IF_ICMPLE, other);
    c.iload(2).iload(3).op(Opcode::ISUB).istore(2).go(head);
    c.bind(other).iload(3).iload(2).op(Opcode::ISUB).istore(3).go(head);
    c.bind(exit).iload(2).op(Opcode::IRETURN);
    p.methods.push_back(method("gcd", "(II)I", c, {lib.require("positive_arguments"), lib.ensure("result_is_positive")}));
  }
  return {"gcd", "Subtractive greatest common divisor", {p}, {dotted(p)}, 0, std::nullopt};
}

MethodPlan not_null(const Lib& lib, const std::string& desc) {
  CodeBuilder c;
  c.local_name(0, "a", "[I");
  c.aload(0).op(Opcode::ACONST_NULL);
  lib.op(c, "neq", "(Ljava/lang/Object;Ljava/lang/Object;)Z");
  c.op(Opcode::IRETURN);
  return method("array_not_null", desc, c, {lib.predicate()});
}

Fixture linear_search(const Lib& lib) {
  ClassPlan p = plan("LinearSearch");
  p.methods.push_back(not_null(lib, "([II)Z"));
  {
    // return lte(-1, r) & lt(r, a.length);
    CodeBuilder c;
    c.local_name(0, "a", "[I").local_name(1, "e", "I").local_name(2, "r", "I");
    c.iconst(-1).iload(2);
    lib.op(c, "lte", "(II)Z");
    c.iload(2).aload(0).op(Opcode::ARRAYLENGTH);
    lib.op(c, "lt", "(II)Z");
    c.op(Opcode::IAND).op(Opcode::IRETURN);
    p.methods.push_back(method("in_bounds", "([III)Z", c, {lib.predicate()}));
  }
  {
    // for (int i = 0; i < a.length; i++) { invariant(lte(0, i) & lte(i, a.length)); if (a[i] == e) return i; }
    // return -1;
    CodeBuilder c;
    c.local_name(0, "a", "[I").local_name(1, "e", "I").local_name(2, "i", "I");
    auto head = c.new_label(), exit = c.new_label(), next = c.new_label();
    c.iconst(0).istore(2);
    c.bind(head).iload(2).aload(0).op(Opcode::ARRAYLENGTH).branch(Opcode::IF_ICMPGE, exit);
    c.iconst(0).iload(2);
    lib.op(c, "lte", "(II)Z");
    c.iload(2).aload(0).op(Opcode::ARRAYLENGTH);
    lib.op(c, "lte", "(II)Z");
    c.op(Opcode::IAND);
    lib.contract(c, "invariant");
    c.aload(0).iload(2).op(Opcode::IALOAD).iload(1).branch(Opcode::IF_ICMPNE, next);
    c.iload(2).op(Opcode::IRETURN);
    c.bind(next).iinc(2, 1).go(head);
    c.bind(exit).iconst(-1).op(Opcode::IRETURN);
    p.methods.push_back(method("search", "([II)I", c, {lib.require("array_not_null"), lib.ensure("in_bounds")}));
  }
  return {"linear_search", "Linear search with a loop that has two exits", {p}, {dotted(p)}, 0, std::nullopt};
}

Fixture insertion_sort(const Lib& lib) {
  ClassPlan p = plan("InsertionSort");
  p.methods.push_back(not_null(lib, "([I)Z"));
  {
    // for (int i = 1; i < a.length; i++) {
    //   invariant(gte(i, 1));
    //   for (int j = i; j > 0 && a[j - 1] > a[j]; j--) {
    //     invariant(gt(j, 0) & lte(j, i));
    //     int t = a[j]; a[j] = a[j - 1]; a[j - 1] = t;
    //   }
    // }
    CodeBuilder c;
    c.local_name(0, "a", "[I").local_name(1, "i", "I").local_name(2, "j", "I").local_name(3, "t", "I");
    auto outer = c.new_label(), done = c.new_label(), inner = c.new_label(), next = c.new_label();
    c.iconst(1).istore(1);
    c.bind(outer).iload(1).aload(0).op(Opcode::ARRAYLENGTH).branch(Opcode::IF_ICMPGE, done);
    c.iload(1).iconst(1);
    lib.op(c, "gte", "(II)Z");
    lib.contract(c, "invariant");
    c.iload(1).istore(2);
    c.bind(inner).iload(2).branch(Opcode::IFLE, next);
    c.aload(0).iload(2).iconst(1).op(Opcode::ISUB).op(Opcode::IALOAD);
    c.aload(0).iload(2).op(Opcode::IALOAD).branch(Opcode::IF_ICMPLE, next);
    c.iload(2).iconst(0);
    lib.op(c, "gt", "(II)Z");
    c.iload(2).iload(1);
    lib.op(c, "lte", "(II)Z");
    c.op(Opcode::IAND);
    lib.contract(c, "invariant");
    c.aload(0).iload(2).op(Opcode::IALOAD).istore(3);
    c.aload(0).iload(2).aload(0).iload(2).iconst(1).op(Opcode::ISUB).op(Opcode::IALOAD).op(Opcode::IASTORE);
    c.aload(0).iload(2).iconst(1).op(Opcode::ISUB).iload(3).op(Opcode::IASTORE);
    c.iinc(2, -1).go(inner);
    c.bind(next).iinc(1, 1).go(outer);
    c.bind(done).op(Opcode::RETURN);
    p.methods.push_back(method("sort", "([I)V", c, {lib.require("array_not_null")}));
  }
  return {"insertion_sort", "Integer insertion sort with nested loops", {p}, {dotted(p)}, 0, std::nullopt};
}

// Error fixtures.

MethodPlan trivial(const std::string& name, std::vector<AnnotationValue> anns) {
  CodeBuilder c;
  c.iconst(0).op(Opcode::IRETURN);
  return method(name, "(I)I", c, std::move(anns));
}

Fixture missing_predicate(const Lib& lib) {
  ClassPlan p = plan("MissingPredicate");
  p.methods.push_back(trivial("f", {lib.require("nowhere")}));
  return {"missing_predicate", "@Require names a method that does not exist", {p}, {dotted(p)}, 2,
          ErrorCode::NoSuchPredicate};
}

Fixture branching_predicate(const Lib& lib) {
  ClassPlan p = plan("BranchingPredicate");
  {
    // boolean r = true; for (int i = 0; i < x; i++) r = r & gte(i, 0); return r;
    CodeBuilder c;
    c.local_name(0, "x", "I").local_name(1, "r", "Z").local_name(2, "i", "I");
    auto head = c.new_label(), exit = c.new_label();
    c.iconst(1).istore(1).iconst(0).istore(2);
    c.bind(head).iload(2).iload(0).branch(Opcode::IF_ICMPGE, exit);
    c.iload(1).iload(2).iconst(0);
    lib.op(c, "gte", "(II)Z");
    c.op(Opcode::IAND).istore(1).iinc(2, 1).go(head);
    c.bind(exit).iload(1).op(Opcode::IRETURN);
    p.methods.push_back(method("looping", "(I)Z", c, {lib.predicate()}));
  }
  p.methods.push_back(trivial("f", {lib.require("looping")}));
  return {"branching_predicate", "Predicate whose body contains a loop", {p}, {dotted(p)}, 2, ErrorCode::NotAggregable};
}

Fixture impure_predicate(const Lib& lib) {
  ClassPlan p = plan("ImpurePredicate");
  p.fields.push_back(FieldPlan{access::kPublic | access::kStatic, "calls", "I", {}});
  {
    // calls = x; return gte(x, 0);
    CodeBuilder c;
    c.local_name(0, "x", "I");
    c.iload(0).field(Opcode::PUTSTATIC, p.name, "calls", "I");
    c.iload(0).iconst(0);
    lib.op(c, "gte", "(II)Z");
    c.op(Opcode::IRETURN);
    p.methods.push_back(method("counted", "(I)Z", c, {lib.predicate()}));
  }
  p.methods.push_back(trivial("f", {lib.require("counted")}));
  return {"impure_predicate", "Predicate that writes a static field", {p}, {dotted(p)}, 2, ErrorCode::ImpureSpec};
}

Fixture dynamic_call(const Lib&) {
  ClassPlan p = plan("DynamicCall");
  CodeBuilder c;
  c.invokedynamic("get", "()Ljava/lang/Object;").op(Opcode::ARETURN);
  p.methods.push_back(method("make", "()Ljava/lang/Object;", c));
  return {"invokedynamic", "Method using invokedynamic", {p}, {dotted(p)}, 1, ErrorCode::Unsupported};
}

Fixture irreducible(const Lib&) {
  ClassPlan p = plan("Irreducible");
  // A cycle between `a` and `b` entered at both.
  CodeBuilder c;
  c.local_name(0, "x", "I").local_name(1, "n", "I");
  auto a = c.new_label(), b = c.new_label();
  c.iconst(0).istore(1).iload(0).branch(Opcode::IFEQ, b);
  c.bind(a).iinc(1, 1).go(b);
  c.bind(b).iinc(1, 2).iload(1).iconst(10).branch(Opcode::IF_ICMPLT, a);
  c.iload(1).op(Opcode::IRETURN);
  p.methods.push_back(method("spin", "(I)I", c));
  return {"irreducible", "Control flow with a two-entry cycle", {p}, {dotted(p)}, 1, ErrorCode::Irreducible};
}

}  // namespace

std::vector<Fixture> fixtures(const spec::Namespace& ns) {
  Lib lib(ns);
  return {summary(lib),           loop(lib),          counter(lib),      gcd(lib),
          linear_search(lib),     insertion_sort(lib), missing_predicate(lib), branching_predicate(lib),
          impure_predicate(lib),  dynamic_call(lib),  irreducible(lib)};
}

Fixture fixture(const std::string& name, const spec::Namespace& ns) {
  for (auto& f : fixtures(ns)) {
    if (f.name == name) return f;
  }
  throw std::out_of_range("no fixture named " + name);
}

ClassPath class_path(const Fixture& f, const spec::Namespace& ns) {
  ClassPath cp;
  for (const auto& c : spec_library(ns)) cp.add_bytes(build_class(c));
  for (const auto& c : f.classes) cp.add_bytes(build_class(c));
  return cp;
}

std::vector<std::filesystem::path> write_classes(const Fixture& f, const std::filesystem::path& dir,
                                                 const spec::Namespace& ns) {
  std::vector<ClassPlan> all = spec_library(ns);
  all.insert(all.end(), f.classes.begin(), f.classes.end());
  std::vector<std::filesystem::path> out;
  for (const auto& c : all) {
    std::filesystem::path file = dir / (c.name + ".class");
    std::filesystem::create_directories(file.parent_path());
    auto bytes = build_class(c);
    std::ofstream os(file, std::ios::binary | std::ios::trunc);
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw Error(ErrorCode::Io, "cannot write", file.string());
    out.push_back(file);
  }
  return out;
}

}  // namespace bcv::corpus
