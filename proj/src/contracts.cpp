// SPDX-License-Identifier: Apache-2.0
#include <map>
#include <mutex>

#include "bcv/error.hpp"
#include "bcv/spec.hpp"

namespace bcv::spec {

using grimp::Intrinsic;

std::string Namespace::annotation(std::string_view simple) const {
  return prefix + ".Contract$" + std::string(simple);
}

std::string Namespace::owner(std::string_view simple) const { return internal_name(prefix) + "/" + std::string(simple); }

namespace {

std::vector<std::pair<MemberRef, IntrinsicRef>> build_table(const Namespace& ns) {
  std::vector<std::pair<MemberRef, IntrinsicRef>> t;
  auto add = [&](const std::string& owner, const char* name, const std::string& desc, Intrinsic k, const JType& type) {
    t.push_back({MemberRef{owner, name, desc, false}, IntrinsicRef{k, type}});
  };
  const std::string op = ns.owner("Operator");
  const std::string special = ns.owner("Special");
  const std::string quant = ns.owner("Quantifier");
  const std::string binding = ns.owner("Binding");
  const std::string contract = ns.owner("Contract");
  const JType object = JType::object("java/lang/Object");
  const std::vector<JType> numeric = {JType::of(JType::Kind::Int), JType::of(JType::Kind::Long),
                                      JType::of(JType::Kind::Float), JType::of(JType::Kind::Double)};
  std::vector<JType> all = numeric;
  all.push_back(JType::of(JType::Kind::Boolean));
  all.push_back(object);

  for (const auto& ty : all) {
    const std::string d = ty.descriptor();
    add(op, "eq", "(" + d + d + ")Z", Intrinsic::Eq, ty);
    add(op, "neq", "(" + d + d + ")Z", Intrinsic::Neq, ty);
  }
  for (const auto& ty : numeric) {
    const std::string d = ty.descriptor();
    add(op, "lt", "(" + d + d + ")Z", Intrinsic::Lt, ty);
    add(op, "lte", "(" + d + d + ")Z", Intrinsic::Lte, ty);
    add(op, "gt", "(" + d + d + ")Z", Intrinsic::Gt, ty);
    add(op, "gte", "(" + d + d + ")Z", Intrinsic::Gte, ty);
  }
  const JType z = JType::of(JType::Kind::Boolean);
  add(op, "not", "(Z)Z", Intrinsic::Not, z);
  add(op, "implies", "(ZZ)Z", Intrinsic::Implies, z);
  for (const auto& ty : all) {
    const std::string d = ty.descriptor();
    add(special, "conditional", "(Z" + d + d + ")" + d, Intrinsic::Conditional, ty);
    add(special, "old", "(" + d + ")" + d, Intrinsic::Old, ty);
    add(quant, "forall", "(" + d + "Z)Z", Intrinsic::Forall, ty);
    add(quant, "exists", "(" + d + "Z)Z", Intrinsic::Exists, ty);
  }
  add(binding, "integer", "()I", Intrinsic::Binding, JType::of(JType::Kind::Int));
  add(binding, "longInteger", "()J", Intrinsic::Binding, JType::of(JType::Kind::Long));
  add(binding, "floatingPoint", "()F", Intrinsic::Binding, JType::of(JType::Kind::Float));
  add(binding, "real", "()D", Intrinsic::Binding, JType::of(JType::Kind::Double));
  add(binding, "bool", "()Z", Intrinsic::Binding, z);
  add(binding, "reference", "()Ljava/lang/Object;", Intrinsic::Binding, object);
  add(contract, "invariant", "(Z)V", Intrinsic::Invariant, z);
  add(contract, "assertion", "(Z)V", Intrinsic::Assertion, z);
  add(contract, "assumption", "(Z)V", Intrinsic::Assumption, z);
  return t;
}

struct TableCache {
  std::mutex mu;
  std::map<std::string, std::vector<std::pair<MemberRef, IntrinsicRef>>> tables;
  std::map<std::string, std::map<std::string, IntrinsicRef>> index;  // prefix -> key -> ref
};

TableCache& cache() {
  static TableCache c;
  return c;
}

std::string key_of(const MemberRef& m) { return m.owner + "." + m.name + m.descriptor; }

void ensure_table(const Namespace& ns) {
  auto& c = cache();
  if (c.tables.count(ns.prefix)) return;
  auto t = build_table(ns);
  auto& idx = c.index[ns.prefix];
  for (const auto& [m, r] : t) idx.emplace(key_of(m), r);
  c.tables.emplace(ns.prefix, std::move(t));
}

}  // namespace

const std::vector<std::pair<MemberRef, IntrinsicRef>>& intrinsic_table(const Namespace& ns) {
  auto& c = cache();
  std::lock_guard lock(c.mu);
  ensure_table(ns);
  return c.tables.at(ns.prefix);
}

std::optional<IntrinsicRef> recognize_intrinsic(const MemberRef& m, const Namespace& ns) {
  auto& c = cache();
  std::lock_guard lock(c.mu);
  ensure_table(ns);
  const auto& idx = c.index.at(ns.prefix);
  auto it = idx.find(key_of(m));
  if (it == idx.end()) return std::nullopt;
  return it->second;
}

namespace {

bool has_annotation(const MethodInfo& m, const std::string& type) {
  for (const auto& a : read_annotations(m)) {
    if (a.type == type) return true;
  }
  return false;
}

std::string where_of(const ClassFile& cf, const MethodInfo& m) { return dotted_name(cf.this_class) + "." + m.name; }

MemberRef resolve_predicate(const ClassFile& cf, const MethodInfo& m, const std::string& name, bool ensures,
                            const Namespace& ns) {
  const char* what = ensures ? "@Ensure" : "@Require";
  std::vector<JType> want = m.descriptor.params;
  if (ensures && !m.descriptor.ret.is_void()) want.push_back(m.descriptor.ret);

  std::vector<const MethodInfo*> named;
  for (const auto& c : cf.methods) {
    if (c.name == name) named.push_back(&c);
  }
  if (named.empty()) {
    throw Error(ErrorCode::NoSuchPredicate, std::string(what) + "(\"" + name + "\"): no method named " + name, where_of(cf, m));
  }
  const MethodInfo* match = nullptr;
  for (const auto* c : named) {
    if (c->descriptor.params == want && c->is_static() == m.is_static()) match = c;
  }
  if (!match) {
    std::string detail = std::string(what) + "(\"" + name + "\"): expected " + (m.is_static() ? "static " : "instance ") +
                         "predicate " + MethodDescriptor{want, JType::of(JType::Kind::Boolean)}.text() + ", found ";
    for (std::size_t i = 0; i < named.size(); ++i) {
      detail += (i ? ", " : "") + std::string(named[i]->is_static() ? "static " : "") + named[i]->descriptor.text();
    }
    throw Error(ErrorCode::SignatureMismatch, detail, where_of(cf, m));
  }
  if (!has_annotation(*match, ns.annotation("Predicate"))) {
    throw Error(ErrorCode::NotAPredicate, std::string(what) + "(\"" + name + "\"): " + name + " is not marked @Predicate",
                where_of(cf, m));
  }
  if (match->descriptor.ret.kind() != JType::Kind::Boolean) {
    throw Error(ErrorCode::PredicateNotBoolean, name + " returns " + match->descriptor.ret.java_name(), where_of(cf, *match));
  }
  return MemberRef{cf.this_class, match->name, match->descriptor.text(), false};
}

}  // namespace

std::vector<MethodContracts> resolve_contracts(const ClassFile& cf, const Namespace& ns) {
  const std::string require = ns.annotation("Require");
  const std::string ensure = ns.annotation("Ensure");
  std::vector<MethodContracts> out;
  for (const auto& m : cf.methods) {
    MethodContracts c;
    c.method = MemberRef{cf.this_class, m.name, m.descriptor.text(), false};
    c.is_static = m.is_static();
    for (const auto& a : read_annotations(m)) {
      if (a.type == ns.annotation("Pure")) c.is_pure = true;
      if (a.type == ns.annotation("Predicate")) c.is_predicate = true;
      if (a.type != require && a.type != ensure) continue;
      auto name = a.string_value();
      if (!name) throw Error(ErrorCode::NoSuchPredicate, "contract annotation without a predicate name", where_of(cf, m));
      bool is_ensure = a.type == ensure;
      (is_ensure ? c.postconditions : c.preconditions).push_back(resolve_predicate(cf, m, *name, is_ensure, ns));
    }
    if (!c.postconditions.empty() && !m.descriptor.ret.is_void()) c.result_param = m.descriptor.ret;
    if (c.is_predicate && m.descriptor.ret.kind() != JType::Kind::Boolean) {
      throw Error(ErrorCode::PredicateNotBoolean, m.name + " returns " + m.descriptor.ret.java_name(), where_of(cf, m));
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace bcv::spec
