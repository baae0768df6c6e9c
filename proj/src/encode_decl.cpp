// SPDX-License-Identifier: Apache-2.0
#include <set>

#include "bcv/encode.hpp"
#include "bcv/error.hpp"

namespace bcv::encode {

namespace b = boogie;
using grimp::Ex;
using grimp::Expr;
using grimp::Intrinsic;
using grimp::LValue;
using grimp::Stmt;

std::vector<b::Decl> declare_class(const ClassFile& cf, Symbols& sym) {
  std::vector<b::Decl> out;
  b::Decl t;
  t.kind = b::Decl::Kind::Const;
  t.name = sym.type_ref(cf.this_class);
  t.type = b::Type::named("Type");
  t.unique = true;
  out.push_back(std::move(t));
  for (const auto& f : cf.fields) {
    MemberRef ref{cf.this_class, f.name, f.type.descriptor(), false};
    b::Decl d;
    d.kind = b::Decl::Kind::Const;
    d.name = sym.field_ref(ref);
    d.type = b::Type::named("Field", {translate_type(f.type)});
    out.push_back(std::move(d));
  }
  return out;
}

namespace {

std::vector<b::TypedName> formals(const MemberRef& m, bool is_static, const std::vector<std::string>& names) {
  auto desc = MethodDescriptor::parse(m.descriptor);
  std::vector<b::TypedName> out;
  std::size_t k = 0;
  if (!is_static) out.push_back({sanitize(names.at(k++)), b::Type::named("Reference")});
  for (const auto& p : desc.params) out.push_back({sanitize(names.at(k++)), translate_type(p)});
  return out;
}

}  // namespace

b::Decl translate_pure(const MemberRef& m, bool is_static, const spec::Aggregate& agg, Symbols& sym) {
  auto desc = MethodDescriptor::parse(m.descriptor);
  Scope scope;
  scope.local_ex = agg.locals;
  std::vector<b::TypedName> params = formals(m, is_static, agg.params);
  std::string heap = "h";
  for (bool clash = true; clash;) {
    clash = false;
    for (const auto& p : params) clash = clash || p.name == heap;
    if (clash) heap += '$';
  }
  scope.heap = heap;
  params.insert(params.begin(), {heap, b::Type::named("Heap")});

  b::Decl d;
  d.kind = b::Decl::Kind::Function;
  d.name = sym.mangler.method(m);
  d.params = std::move(params);
  d.type = translate_type(desc.ret);
  d.expr = translate_expr(agg.expr, grimp::ex_of(desc.ret), sym, scope);
  return d;
}

namespace {

enum class Hook { Assert, Assume };

struct Injection {
  Hook hook;
  std::size_t loop;
};

// Where loop invariants go, by Grimp statement index.
struct Plan {
  std::map<std::size_t, std::vector<Injection>> before, after, inside;
};

Plan plan_injections(const ProcedureInput& in) {
  Plan plan;
  if (!in.body) return plan;
  const auto& stmts = in.body->stmts;
  for (const auto& [li, invs] : in.invariants) {
    if (invs.empty()) continue;
    const LoopInfo& loop = in.loops.at(li);
    std::size_t h = in.cfg.blocks[loop.head].first;
    if (!loop.head_label.empty()) h = in.body->label_index(loop.head_label).value_or(h);
    bool head_is_label = stmts[h].kind == Stmt::Kind::Label;

    plan.before[h].push_back({Hook::Assert, li});

    std::size_t t = in.cfg.blocks[loop.head].last - 1;
    bool exit_test = false;
    if (stmts[t].kind == Stmt::Kind::If) {
      auto target = in.body->label_index(stmts[t].label);
      exit_test = target && !loop.contains_stmt(in.cfg, *target);
    }
    if (exit_test) {
      plan.after[t].push_back({Hook::Assume, li});
    } else {
      (head_is_label ? plan.after[h] : plan.before[h]).push_back({Hook::Assume, li});
    }

    for (std::size_t j : loop.backjumps) {
      if (j >= stmts.size()) continue;
      if (stmts[j].kind == Stmt::Kind::Goto) plan.before[j].push_back({Hook::Assert, li});
      if (stmts[j].kind == Stmt::Kind::If) plan.inside[j].push_back({Hook::Assert, li});
    }

    for (std::size_t blk : loop.exit_blocks) {
      std::size_t f = in.cfg.blocks[blk].first;
      (stmts[f].kind == Stmt::Kind::Label ? plan.after[f] : plan.before[f]).push_back({Hook::Assume, li});
    }
  }
  return plan;
}

class BodyEncoder {
 public:
  BodyEncoder(const ProcedureInput& in, Symbols& sym) : in_(in), sym_(sym), body_(*in.body) {}

  b::Body run() {
    std::set<std::string> params(body_.params.begin(), body_.params.end());
    std::set<std::string> assigned;
    for (const auto& s : body_.stmts) {
      if (s.lhs && s.lhs->kind == LValue::Kind::Local) assigned.insert(s.lhs->name);
    }
    scope_.in_ensures = in_.shadow;
    std::set<std::string> taken;
    for (const auto& l : body_.locals) taken.insert(sanitize(l.name));
    for (const auto& l : body_.locals) {
      scope_.local_ex[l.name] = l.ex;
      std::string name = sanitize(l.name);
      if (l.param && assigned.count(l.name)) {
        std::string copy = name + "$";
        while (taken.count(copy)) copy += '$';
        taken.insert(copy);
        locals_.push_back({copy, sort_of(l.ex)});
        entry_.push_back(b::assign(copy, b::var(name)));
        name = copy;
      } else if (!l.param) {
        locals_.push_back({name, sort_of(l.ex)});
      }
      scope_.renames[l.name] = b::var(name);
    }

    plan_ = plan_injections(in_);
    for (std::size_t li = 0; li < in_.loops.size(); ++li) {
      auto it = in_.invariants.find(li);
      if (it == in_.invariants.end()) continue;
      std::vector<b::Expr> parts;
      for (const auto& a : it->second) parts.push_back(contract(a));
      invariant_[li] = b::conjunction(std::move(parts));
    }

    out_ = entry_;
    for (std::size_t i = 0; i < body_.stmts.size(); ++i) {
      inject(plan_.before, i, out_);
      statement(i);
      inject(plan_.after, i, out_);
    }
    return b::Body{locals_, std::move(out_)};
  }

 private:
  b::Expr contract(const spec::Aggregate& a) {
    Scope s = scope_;
    for (const auto& [k, v] : a.locals) s.local_ex.emplace(k, v);
    return translate_expr(a.expr, Ex::Boolean, sym_, s);
  }

  void inject(const std::map<std::size_t, std::vector<Injection>>& where, std::size_t i, std::vector<b::Stmt>& out) {
    auto it = where.find(i);
    if (it == where.end()) return;
    for (const auto& inj : it->second) {
      const b::Expr& j = invariant_.at(inj.loop);
      out.push_back(inj.hook == Hook::Assert ? b::assert_stmt(j) : b::assume_stmt(j));
    }
  }

  b::Expr tr(const Expr& e) { return translate_expr(e, sym_, scope_); }
  b::Expr tr(const Expr& e, Ex want) { return translate_expr(e, want, sym_, scope_); }

  std::string fresh(Ex ex) {
    std::string name = "#r" + std::to_string(temps_++);
    locals_.push_back({name, sort_of(ex)});
    scope_.local_ex[name] = ex;
    return name;
  }

  bool is_function(const MemberRef& m) const { return sym_.is_function && sym_.is_function(m); }

  // Call statement for a procedure call; `outs` empty for void results.
  b::Stmt call(const Expr& c, std::vector<std::string> outs) {
    std::vector<b::Expr> args;
    for (const auto& a : c.args) args.push_back(tr(a));
    return b::call_stmt(std::move(outs), sym_.procedure_ref(*c.member, c.call == grimp::CallKind::Static),
                        std::move(args));
  }

  // Hoists procedure calls out of `e` into call statements, innermost and
  // leftmost first, and rewrites specification operators.
  Expr extract(const Expr& e) {
    Expr out = e;
    for (auto& a : out.args) a = extract(a);
    if (e.kind != Expr::Kind::Call) return out;
    if (auto in = spec::recognize_intrinsic(*e.member, sym_.ns)) {
      if (in->kind == Intrinsic::Binding || in->kind == Intrinsic::Invariant || in->kind == Intrinsic::Assertion ||
          in->kind == Intrinsic::Assumption) {
        throw Error(ErrorCode::Unsupported,
                    std::string(grimp::intrinsic_name(in->kind)) + " used inside an expression");
      }
      out.kind = Expr::Kind::Intrinsic;
      out.intrinsic = in->kind;
      return out;
    }
    if (is_function(*e.member)) return out;
    Ex ex = grimp::ex_of(e.type);
    std::string t = fresh(ex);
    out_.push_back(call(out, {t}));
    Expr ref = grimp::local(t, e.type);
    ref.ex = e.ex;
    return ref;
  }

  Ex local_ex(const std::string& name) const {
    auto it = scope_.local_ex.find(name);
    return it == scope_.local_ex.end() ? Ex::Int : it->second;
  }

  std::string local_name(const std::string& name) const {
    auto it = scope_.renames.find(name);
    return it == scope_.renames.end() ? sanitize(name) : it->second.text;
  }

  void assign(const Stmt& s) {
    const LValue& lhs = *s.lhs;
    const Expr& rhs = *s.expr;
    if (lhs.kind == LValue::Kind::Local) {
      std::string v = local_name(lhs.name);
      if (rhs.kind == Expr::Kind::Call) {
        auto in = spec::recognize_intrinsic(*rhs.member, sym_.ns);
        if (in && in->kind == Intrinsic::Binding) {
          out_.push_back(b::havoc(v));
          return;
        }
        if (!in && !is_function(*rhs.member)) {
          Expr c = rhs;
          for (auto& a : c.args) a = extract(a);
          Ex want = local_ex(lhs.name);
          Ex got = grimp::ex_of(rhs.type);
          if (want == got || (got == Ex::Int && want == Ex::Long)) {
            out_.push_back(call(c, {v}));
          } else {
            std::string t = fresh(got);
            out_.push_back(call(c, {t}));
            Expr ref = grimp::local(t, rhs.type);
            out_.push_back(b::assign(v, tr(ref, want)));
          }
          return;
        }
      }
      Expr e = extract(rhs);
      out_.push_back(b::assign(v, tr(e, local_ex(lhs.name))));
      return;
    }
    std::vector<Expr> args;
    for (const auto& a : lhs.args) args.push_back(extract(a));
    Expr value = extract(rhs);
    Ex want = grimp::ex_of(lhs.type);
    if (want == Ex::Unknown) want = Ex::Int;
    b::Expr heap = b::var(std::string(b::kHeap));
    b::Expr update;
    switch (lhs.kind) {
      case LValue::Kind::Field:
        update = b::call("update", {heap, tr(args[0], Ex::Ref), b::var(sym_.field_ref(*lhs.member)), tr(value, want)});
        break;
      case LValue::Kind::Static:
        update = b::call("update", {heap, b::call("type2ref", {b::var(sym_.type_ref(sym_.canonical(*lhs.member).owner))}),
                                    b::var(sym_.field_ref(*lhs.member)), tr(value, want)});
        break;
      case LValue::Kind::Array:
        update = b::call("array.update", {heap, tr(args[0], Ex::Ref), tr(args[1], Ex::Int), tr(value, want)});
        break;
      case LValue::Kind::Local: break;
    }
    out_.push_back(b::assign(std::string(b::kHeap), std::move(update)));
  }

  void statement(std::size_t i) {
    const Stmt& s = body_.stmts[i];
    switch (s.kind) {
      case Stmt::Kind::Assign: assign(s); return;
      case Stmt::Kind::New:
        out_.push_back(b::call_stmt({local_name(s.lhs->name)}, "new", {b::var(sym_.type_ref(s.label))}));
        return;
      case Stmt::Kind::NewArray: {
        Expr len = extract(*s.expr);
        out_.push_back(b::call_stmt({local_name(s.lhs->name)}, "array.new", {tr(len, Ex::Int)}));
        return;
      }
      case Stmt::Kind::If: {
        Expr c = extract(*s.expr);
        std::vector<b::Stmt> then;
        inject(plan_.inside, i, then);
        then.push_back(b::goto_stmt({s.label}));
        out_.push_back(b::if_stmt(tr(c, Ex::Boolean), std::move(then)));
        return;
      }
      case Stmt::Kind::Goto: out_.push_back(b::goto_stmt({s.label})); return;
      case Stmt::Kind::Return:
        if (s.expr) {
          Expr e = extract(*s.expr);
          out_.push_back(b::assign("@ret", tr(e, grimp::ex_of(body_.return_type()))));
        }
        out_.push_back(b::return_stmt());
        return;
      case Stmt::Kind::Invoke: invoke(*s.expr); return;
      case Stmt::Kind::Label: out_.push_back(b::label(s.label)); return;
      case Stmt::Kind::Check: {
        const auto& check = in_.checks.at(static_cast<std::size_t>(s.check));
        b::Expr e = contract(check.expr);
        out_.push_back(check.assume ? b::assume_stmt(std::move(e)) : b::assert_stmt(std::move(e)));
        return;
      }
      case Stmt::Kind::Nop: return;
    }
  }

  void invoke(const Expr& e) {
    Expr c = e;
    for (auto& a : c.args) a = extract(a);
    if (spec::recognize_intrinsic(*e.member, sym_.ns) || is_function(*e.member)) return;
    auto ret = MethodDescriptor::parse(e.member->descriptor).ret;
    std::vector<std::string> outs;
    if (!ret.is_void()) outs.push_back(fresh(grimp::ex_of(ret)));
    out_.push_back(call(c, std::move(outs)));
  }

  const ProcedureInput& in_;
  Symbols& sym_;
  const grimp::Body& body_;
  Scope scope_;
  Plan plan_;
  std::map<std::size_t, b::Expr> invariant_;
  std::vector<b::TypedName> locals_;
  std::vector<b::Stmt> entry_;
  std::vector<b::Stmt> out_;
  int temps_ = 0;
};

}  // namespace

b::Decl translate_procedure(const ProcedureInput& in, Symbols& sym) {
  auto desc = MethodDescriptor::parse(in.method.descriptor);
  std::vector<std::string> names;
  if (in.body) {
    names = in.body->params;
  } else {
    if (!in.is_static) names.push_back("this");
    names.insert(names.end(), in.params.begin(), in.params.end());
  }

  b::Decl d;
  d.kind = b::Decl::Kind::Procedure;
  d.name = sym.mangler.method(in.method);
  d.params = formals(in.method, in.is_static, names);
  if (!desc.ret.is_void()) d.outs.push_back({"@ret", translate_type(desc.ret)});

  std::vector<b::Expr> actuals;
  for (const auto& p : d.params) actuals.push_back(b::var(p.name));
  auto inline_contract = [&](const spec::Aggregate& a, bool ensures) {
    Scope scope;
    scope.in_ensures = ensures;
    scope.local_ex = a.locals;
    std::vector<b::Expr> args = actuals;
    if (ensures && !desc.ret.is_void()) args.push_back(b::var("@ret"));
    if (a.params.size() != args.size()) {
      throw Error(ErrorCode::SignatureMismatch, "contract arity does not match " + in.method.name);
    }
    for (std::size_t i = 0; i < args.size(); ++i) scope.renames[a.params[i]] = args[i];
    return translate_expr(a.expr, Ex::Boolean, sym, scope);
  };
  for (const auto& a : in.preconditions) {
    d.specs.push_back({b::Spec::Kind::Requires, inline_contract(a, false), {}});
  }
  for (const auto& a : in.postconditions) {
    d.specs.push_back({b::Spec::Kind::Ensures, inline_contract(a, true), {}});
  }
  if (in.body) d.body = BodyEncoder(in, sym).run();
  return d;
}

InjectionCounts count_injections(const ProcedureInput& in) {
  Plan plan = plan_injections(in);
  InjectionCounts c;
  for (const auto* where : {&plan.before, &plan.after, &plan.inside}) {
    for (const auto& [i, injs] : *where) {
      for (const auto& inj : injs) (inj.hook == Hook::Assert ? c.asserts : c.assumes)++;
    }
  }
  return c;
}

}  // namespace bcv::encode
