// SPDX-License-Identifier: Apache-2.0
#include "bcv/boogie.hpp"

namespace bcv::boogie {

Expr lit(bool b) {
  Expr e;
  e.kind = Expr::Kind::BoolLit;
  e.boolean = b;
  return e;
}

Expr lit(std::int64_t v) {
  Expr e;
  e.kind = Expr::Kind::IntLit;
  e.integer = v;
  return e;
}

Expr real_lit(std::string digits) {
  Expr e;
  e.kind = Expr::Kind::RealLit;
  e.text = std::move(digits);
  return e;
}

Expr var(std::string name) {
  Expr e;
  e.kind = Expr::Kind::Var;
  e.text = std::move(name);
  return e;
}

namespace {
Expr unary(Expr::Kind k, Expr a) {
  Expr e;
  e.kind = k;
  e.args.push_back(std::move(a));
  return e;
}
}  // namespace

Expr old(Expr e) { return unary(Expr::Kind::Old, std::move(e)); }
Expr negate(Expr e) { return unary(Expr::Kind::Not, std::move(e)); }
Expr minus(Expr e) { return unary(Expr::Kind::Neg, std::move(e)); }

Expr binary(BinOp op, Expr a, Expr b) {
  Expr e;
  e.kind = Expr::Kind::Binary;
  e.op = op;
  e.args.push_back(std::move(a));
  e.args.push_back(std::move(b));
  return e;
}

Expr call(std::string fn, std::vector<Expr> args) {
  Expr e;
  e.kind = Expr::Kind::Call;
  e.text = std::move(fn);
  e.args = std::move(args);
  return e;
}

Expr select(Expr map, std::vector<Expr> index) {
  Expr e;
  e.kind = Expr::Kind::Select;
  e.args.push_back(std::move(map));
  for (auto& i : index) e.args.push_back(std::move(i));
  return e;
}

Expr store(Expr map, std::vector<Expr> index, Expr value) {
  Expr e = select(std::move(map), std::move(index));
  e.kind = Expr::Kind::Store;
  e.args.push_back(std::move(value));
  return e;
}

Expr coerce(Expr a, Type t) {
  Expr e = unary(Expr::Kind::Coerce, std::move(a));
  e.type = std::move(t);
  return e;
}

Expr quantifier(bool forall, std::vector<TypedName> bound, Expr body, std::vector<std::string> type_params) {
  Expr e = unary(forall ? Expr::Kind::Forall : Expr::Kind::Exists, std::move(body));
  e.bound = std::move(bound);
  e.type_params = std::move(type_params);
  return e;
}

Expr ite(Expr c, Expr a, Expr b) {
  Expr e;
  e.kind = Expr::Kind::Ite;
  e.args = {std::move(c), std::move(a), std::move(b)};
  return e;
}

Expr conjunction(std::vector<Expr> parts) {
  if (parts.empty()) return lit(true);
  Expr out = std::move(parts.front());
  for (std::size_t i = 1; i < parts.size(); ++i) out = binary(BinOp::And, std::move(out), std::move(parts[i]));
  return out;
}

Stmt label(std::string name) {
  Stmt s;
  s.kind = Stmt::Kind::Label;
  s.names.push_back(std::move(name));
  return s;
}

Stmt assign(std::string target, Expr rhs) {
  Stmt s;
  s.kind = Stmt::Kind::Assign;
  s.names.push_back(std::move(target));
  s.exprs.push_back(std::move(rhs));
  return s;
}

Stmt call_stmt(std::vector<std::string> outs, std::string proc, std::vector<Expr> args) {
  Stmt s;
  s.kind = Stmt::Kind::Call;
  s.names = std::move(outs);
  s.callee = std::move(proc);
  s.exprs = std::move(args);
  return s;
}

Stmt if_stmt(Expr cond, std::vector<Stmt> then_branch, std::optional<std::vector<Stmt>> else_branch) {
  Stmt s;
  s.kind = Stmt::Kind::If;
  s.exprs.push_back(std::move(cond));
  s.then_branch = std::move(then_branch);
  s.else_branch = std::move(else_branch);
  return s;
}

Stmt goto_stmt(std::vector<std::string> targets) {
  Stmt s;
  s.kind = Stmt::Kind::Goto;
  s.names = std::move(targets);
  return s;
}

Stmt assert_stmt(Expr e) {
  Stmt s;
  s.kind = Stmt::Kind::Assert;
  s.exprs.push_back(std::move(e));
  return s;
}

Stmt assume_stmt(Expr e) {
  Stmt s = assert_stmt(std::move(e));
  s.kind = Stmt::Kind::Assume;
  return s;
}

Stmt return_stmt() {
  Stmt s;
  s.kind = Stmt::Kind::Return;
  return s;
}

Stmt havoc(std::string target) {
  Stmt s;
  s.kind = Stmt::Kind::Havoc;
  s.names.push_back(std::move(target));
  return s;
}

const Decl* Program::find(Decl::Kind kind, std::string_view name) const {
  for (const auto& d : decls) {
    if (d.kind == kind && d.name == name) return &d;
  }
  return nullptr;
}

namespace {

void collect(const std::vector<Stmt>& stmts, std::vector<HeapEvent>& out, bool first_only) {
  for (const auto& s : stmts) {
    if (first_only && !out.empty()) return;
    switch (s.kind) {
      case Stmt::Kind::Assign:
      case Stmt::Kind::Havoc:
        if (s.names.front() == kHeap) out.push_back({HeapEvent::Kind::Assign, {}, print(s)});
        break;
      case Stmt::Kind::Call:
        out.push_back({HeapEvent::Kind::Call, s.callee, print(s)});
        break;
      case Stmt::Kind::If:
        collect(s.then_branch, out, first_only);
        if (s.else_branch) collect(*s.else_branch, out, first_only);
        break;
      default:
        break;
    }
  }
}

}  // namespace

std::vector<HeapEvent> heap_events(const Body& body) {
  std::vector<HeapEvent> out;
  collect(body.stmts, out, false);
  return out;
}

std::optional<HeapEvent> scan_heap_writes(const Program& p, std::string_view proc) {
  const Decl* d = p.find(Decl::Kind::Procedure, proc);
  if (!d || !d->body) return std::nullopt;
  std::vector<HeapEvent> out;
  collect(d->body->stmts, out, true);
  if (out.empty()) return std::nullopt;
  return out.front();
}

}  // namespace bcv::boogie
