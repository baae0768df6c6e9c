// SPDX-License-Identifier: Apache-2.0
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "bcv/error.hpp"
#include "bcv/spec.hpp"

namespace bcv::spec {

using grimp::Expr;
using grimp::Intrinsic;
using grimp::LValue;
using grimp::Stmt;

const char* reason_name(Violation::Reason r) {
  switch (r) {
    case Violation::Reason::ImpureWrite: return "IMPURE_WRITE";
    case Violation::Reason::Branching: return "BRANCHING";
    case Violation::Reason::ImpureCall: return "IMPURE_CALL";
    case Violation::Reason::NoReturn: return "NO_RETURN";
  }
  return "?";
}

std::string to_string(const Violation& v) {
  std::string s = reason_name(v.reason);
  if (v.offset >= 0) s += " at offset " + std::to_string(v.offset);
  if (!v.detail.empty()) s += ": " + v.detail;
  return s;
}

namespace {

std::string body_name(const grimp::Body& b) { return dotted_name(b.method.owner) + "." + b.method.name; }

bool is_statement_intrinsic(Intrinsic k) {
  return k == Intrinsic::Invariant || k == Intrinsic::Assertion || k == Intrinsic::Assumption;
}

// First call in `e` that may not appear in an aggregate.
const Expr* impure_call(const Expr& e, const Context& ctx) {
  const Expr* found = nullptr;
  grimp::for_each_expr(e, [&](const Expr& x) {
    if (found || x.kind != Expr::Kind::Call) return;
    auto in = recognize_intrinsic(*x.member, ctx.ns);
    if (in ? is_statement_intrinsic(in->kind) : !(ctx.is_pure && ctx.is_pure(*x.member))) found = &x;
  });
  return found;
}

std::string call_name(const Expr& call) { return dotted_name(call.member->owner) + "." + call.member->name; }

}  // namespace

std::vector<Violation> check_aggregable(const grimp::Body& body, const Context& ctx) {
  std::vector<Violation> out;
  auto report = [&](Violation::Reason r, std::size_t i, std::string detail) {
    out.push_back({r, i, body.stmts[i].offset, std::move(detail)});
  };
  auto check_expr = [&](std::size_t i, const Expr& e) {
    if (const Expr* c = impure_call(e, ctx)) report(Violation::Reason::ImpureCall, i, "call to " + call_name(*c));
  };
  std::optional<std::size_t> ret;
  for (std::size_t i = 0; i < body.stmts.size(); ++i) {
    const Stmt& s = body.stmts[i];
    if (ret && s.kind != Stmt::Kind::Nop && s.kind != Stmt::Kind::Label) {
      report(Violation::Reason::Branching, i, "statement after return");
      break;
    }
    switch (s.kind) {
      case Stmt::Kind::Assign:
        if (s.lhs->kind != LValue::Kind::Local) {
          report(Violation::Reason::ImpureWrite, i, grimp::to_string(s));
        }
        for (const auto& a : s.lhs->args) check_expr(i, a);
        check_expr(i, *s.expr);
        break;
      case Stmt::Kind::New:
      case Stmt::Kind::NewArray:
        report(Violation::Reason::ImpureWrite, i, "allocation " + grimp::to_string(s));
        break;
      case Stmt::Kind::If:
      case Stmt::Kind::Goto:
        report(Violation::Reason::Branching, i, grimp::to_string(s));
        break;
      case Stmt::Kind::Invoke: {
        auto in = recognize_intrinsic(*s.expr->member, ctx.ns);
        if (in || !(ctx.is_pure && ctx.is_pure(*s.expr->member))) {
          report(Violation::Reason::ImpureCall, i, "call statement " + call_name(*s.expr));
        } else {
          check_expr(i, *s.expr);
        }
        break;
      }
      case Stmt::Kind::Return:
        if (!s.expr) {
          report(Violation::Reason::NoReturn, i, "return without a value");
        } else {
          check_expr(i, *s.expr);
        }
        ret = i;
        break;
      case Stmt::Kind::Check:
        report(Violation::Reason::ImpureCall, i, "inline check");
        break;
      case Stmt::Kind::Label:
      case Stmt::Kind::Nop:
        break;
    }
  }
  if (!ret && out.empty()) {
    out.push_back({Violation::Reason::NoReturn, body.stmts.size(), -1, "body has no return"});
  }
  return out;
}

grimp::Body to_ssa(const grimp::Body& body) {
  grimp::Body out = body;
  std::set<std::string> taken;
  for (const auto& l : body.locals) taken.insert(l.name);
  std::set<std::string> defined(body.params.begin(), body.params.end());
  std::map<std::string, std::string> current;
  std::map<std::string, int> versions;

  std::function<void(Expr&)> rename = [&](Expr& x) {
    if (x.kind == Expr::Kind::Local) {
      auto it = current.find(x.text);
      if (it != current.end()) x.text = it->second;
    }
    for (auto& a : x.args) rename(a);
  };

  for (auto& s : out.stmts) {
    if (s.lhs) {
      for (auto& a : s.lhs->args) rename(a);
    }
    if (s.expr) rename(*s.expr);
    if (!s.lhs || s.lhs->kind != LValue::Kind::Local) continue;
    const std::string original = s.lhs->name;
    if (!defined.insert(original).second) {
      std::string fresh;
      do {
        fresh = original + "$" + std::to_string(++versions[original]);
      } while (taken.count(fresh));
      taken.insert(fresh);
      grimp::LocalVar v = *body.find_local(original);
      v.name = fresh;
      v.slot = -1;
      v.param = false;
      out.locals.push_back(v);
      current[original] = fresh;
      s.lhs->name = fresh;
    } else {
      current.erase(original);
    }
  }
  return out;
}

namespace {

std::size_t size_of(const Expr& e) {
  std::size_t n = 1;
  for (const auto& a : e.args) n += size_of(a);
  return n;
}

// Inlines local definitions into expressions and rewrites intrinsic calls.
class Inliner {
 public:
  Inliner(const Context& ctx, ErrorCode failure) : ctx_(ctx), failure_(failure) {}

  // Records `name = rhs`. With `strict`, a second definition is E_NON_SSA.
  void define(const std::string& name, const Expr& rhs, bool strict, std::int32_t offset) {
    offset_ = offset;
    nodes_ = 0;
    if (rhs.kind == Expr::Kind::Call) {
      auto in = recognize_intrinsic(*rhs.member, ctx_.ns);
      if (in && in->kind == Intrinsic::Binding) {
        if (strict && (env_.count(name) || bindings_.count(name))) non_ssa(name);
        env_.erase(name);
        bindings_.insert(name);
        return;
      }
    }
    if (strict && (env_.count(name) || bindings_.count(name))) non_ssa(name);
    Expr e = inline_expr(rhs);
    bindings_.erase(name);
    sizes_[name] = size_of(e);
    env_[name] = std::move(e);
  }

  Expr finish(const Expr& result) {
    nodes_ = 0;
    Expr e = inline_expr(result);
    check_scopes(e, {});
    return e;
  }

 private:
  [[noreturn]] void fail(ErrorCode code, const std::string& msg) const {
    throw Error(code, msg, offset_ >= 0 ? "offset " + std::to_string(offset_) : std::string());
  }

  [[noreturn]] void non_ssa(const std::string& name) const { fail(ErrorCode::NonSsa, name + " is assigned more than once"); }

  void count(std::size_t n) {
    nodes_ += n;
    if (nodes_ > ctx_.max_nodes) {
      fail(ErrorCode::AggregateTooLarge, "aggregate exceeds " + std::to_string(ctx_.max_nodes) + " nodes");
    }
  }

  Expr inline_expr(const Expr& e) {
    if (e.kind == Expr::Kind::Local) {
      auto it = env_.find(e.text);
      if (it == env_.end()) {
        count(1);
        return e;
      }
      count(sizes_.at(e.text));
      return it->second;
    }
    count(1);
    Expr out = e;
    for (auto& a : out.args) a = inline_expr(a);
    if (e.kind != Expr::Kind::Call) return out;
    auto in = recognize_intrinsic(*e.member, ctx_.ns);
    if (!in) {
      if (!(ctx_.is_pure && ctx_.is_pure(*e.member))) fail(failure_, "call to non-pure method " + call_name(e));
      return out;
    }
    if (in->kind == Intrinsic::Binding) fail(failure_, "binding must be assigned to a local variable");
    if (is_statement_intrinsic(in->kind)) fail(failure_, std::string(grimp::intrinsic_name(in->kind)) + " used as a value");
    out.kind = Expr::Kind::Intrinsic;
    out.intrinsic = in->kind;
    if (in->kind == Intrinsic::Forall || in->kind == Intrinsic::Exists) {
      const Expr& var = out.args[0];
      if (var.kind != Expr::Kind::Local || !bindings_.count(var.text)) {
        fail(failure_, std::string(grimp::intrinsic_name(in->kind)) + " over " + grimp::to_string(var) +
                           ", which is not a binding");
      }
    }
    return out;
  }

  void check_scopes(const Expr& e, std::set<std::string> scope) const {
    if (e.kind == Expr::Kind::Local && bindings_.count(e.text) && !scope.count(e.text)) {
      fail(ErrorCode::BindingEscape, "binding " + e.text + " used outside its quantifier");
    }
    if (e.kind == Expr::Kind::Intrinsic && (e.intrinsic == Intrinsic::Forall || e.intrinsic == Intrinsic::Exists)) {
      scope.insert(e.args[0].text);
      check_scopes(e.args[1], std::move(scope));
      return;
    }
    for (const auto& a : e.args) check_scopes(a, scope);
  }

  const Context& ctx_;
  ErrorCode failure_;
  std::map<std::string, Expr> env_;
  std::map<std::string, std::size_t> sizes_;
  std::set<std::string> bindings_;
  std::size_t nodes_ = 0;
  std::int32_t offset_ = -1;
};

Aggregate make_aggregate(Expr e, const grimp::Body& body) {
  Aggregate a{std::move(e), body.params, {}};
  grimp::for_each_expr(a.expr, [&](const Expr& x) {
    if (x.kind != Expr::Kind::Local) return;
    if (const auto* l = body.find_local(x.text)) a.locals[x.text] = l->ex;
  });
  for (const auto& p : body.params) {
    if (const auto* l = body.find_local(p)) a.locals[p] = l->ex;
  }
  return a;
}

Aggregate aggregate_checked(const grimp::Body& body, const Context& ctx) {
  auto violations = check_aggregable(body, ctx);
  if (!violations.empty()) throw Error(ErrorCode::NotAggregable, to_string(violations.front()));
  Inliner in(ctx, ErrorCode::NotAggregable);
  std::set<std::string> params(body.params.begin(), body.params.end());
  for (const auto& s : body.stmts) {
    if (s.kind == Stmt::Kind::Assign) {
      if (params.count(s.lhs->name)) {
        throw Error(ErrorCode::NonSsa, "parameter " + s.lhs->name + " is reassigned",
                    s.offset >= 0 ? "offset " + std::to_string(s.offset) : "");
      }
      in.define(s.lhs->name, *s.expr, true, s.offset);
    }
    if (s.kind == Stmt::Kind::Return) return make_aggregate(in.finish(*s.expr), body);
  }
  throw Error(ErrorCode::NotAggregable, "body has no return");
}

}  // namespace

Aggregate aggregate_ssa(const grimp::Body& body, const Context& ctx) {
  try {
    return aggregate_checked(body, ctx);
  } catch (const Error& e) {
    throw e.located(body_name(body));
  }
}

Aggregate aggregate(const grimp::Body& body, const Context& ctx) { return aggregate_ssa(to_ssa(body), ctx); }

namespace {

std::set<std::string> locals_read(const Expr& e) {
  std::set<std::string> out;
  grimp::for_each_expr(e, [&](const Expr& x) {
    if (x.kind == Expr::Kind::Local) out.insert(x.text);
  });
  return out;
}

bool stmt_reads(const Stmt& s, const std::string& name) {
  bool found = false;
  grimp::for_each_expr(s, [&](const Expr& x) { found = found || (x.kind == Expr::Kind::Local && x.text == name); });
  return found;
}

struct SpecCall {
  std::size_t stmt;
  std::vector<std::size_t> chain;  // defining statements, ascending
  Aggregate expr;
};

// Aggregates the argument of the specification call at `c` together with
// the contiguous private assignments that only feed it.
SpecCall extract_call(const grimp::Body& body, std::size_t c, const Context& ctx, ErrorCode failure) {
  const Stmt& call = body.stmts[c];
  std::set<std::string> params(body.params.begin(), body.params.end());
  std::set<std::string> needed = locals_read(call.expr->args.at(0));
  std::vector<std::size_t> chain;
  for (std::size_t j = c; j-- > 0;) {
    const Stmt& s = body.stmts[j];
    if (s.kind == Stmt::Kind::Nop) continue;
    if (s.kind != Stmt::Kind::Assign || s.lhs->kind != LValue::Kind::Local) break;
    const std::string& v = s.lhs->name;
    if (!needed.count(v) || params.count(v)) break;
    bool shared = false;
    for (std::size_t k = 0; k < body.stmts.size() && !shared; ++k) {
      if (k > j && k <= c) continue;
      shared = stmt_reads(body.stmts[k], v);
    }
    if (shared) break;
    chain.insert(chain.begin(), j);
    for (const auto& r : locals_read(*s.expr)) needed.insert(r);
  }
  try {
    Inliner in(ctx, failure);
    for (auto j : chain) in.define(body.stmts[j].lhs->name, *body.stmts[j].expr, false, body.stmts[j].offset);
    return SpecCall{c, chain, make_aggregate(in.finish(call.expr->args[0]), body)};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::AggregateTooLarge) throw;
    std::string where = call.offset >= 0 ? "offset " + std::to_string(call.offset) : e.where();
    throw Error(failure, e.message(), where);
  }
}

void blank(Stmt& s) {
  Stmt nop;
  nop.kind = Stmt::Kind::Nop;
  nop.offset = s.offset;
  s = nop;
}

std::optional<Intrinsic> spec_call_kind(const Stmt& s, const Context& ctx) {
  if (s.kind != Stmt::Kind::Invoke || !s.expr || s.expr->kind != Expr::Kind::Call) return std::nullopt;
  auto in = recognize_intrinsic(*s.expr->member, ctx.ns);
  if (!in || !is_statement_intrinsic(in->kind)) return std::nullopt;
  return in->kind;
}

}  // namespace

LoopInvariants extract_loop_invariants(const grimp::Body& body, const Cfg& cfg, const std::vector<LoopInfo>& loops,
                                       const Context& ctx) {
  LoopInvariants out;
  out.body = body;
  try {
    for (std::size_t c = 0; c < body.stmts.size(); ++c) {
      if (spec_call_kind(body.stmts[c], ctx) != Intrinsic::Invariant) continue;
      std::optional<std::size_t> owner;
      for (std::size_t l = 0; l < loops.size() && !owner; ++l) {
        if (loops[l].contains_stmt(cfg, c)) owner = l;
      }
      const std::int32_t off = body.stmts[c].offset;
      if (!owner) {
        throw Error(ErrorCode::InvariantOutsideLoop, "invariant is not inside a loop",
                    off >= 0 ? "offset " + std::to_string(off) : "");
      }
      SpecCall sc = extract_call(out.body, c, ctx, ErrorCode::InvariantNotAggregable);
      for (auto j : sc.chain) blank(out.body.stmts[j]);
      blank(out.body.stmts[c]);
      out.by_loop[*owner].push_back(std::move(sc.expr));
    }
  } catch (const Error& e) {
    throw e.located(body_name(body));
  }
  return out;
}

InlineChecks extract_inline_checks(const grimp::Body& body, const Context& ctx) {
  InlineChecks out;
  out.body = body;
  try {
    for (std::size_t c = 0; c < body.stmts.size(); ++c) {
      auto kind = spec_call_kind(body.stmts[c], ctx);
      if (kind != Intrinsic::Assertion && kind != Intrinsic::Assumption) continue;
      SpecCall sc = extract_call(out.body, c, ctx, ErrorCode::CheckNotAggregable);
      for (auto j : sc.chain) blank(out.body.stmts[j]);
      Stmt& s = out.body.stmts[c];
      s.kind = Stmt::Kind::Check;
      s.expr.reset();
      s.check = static_cast<int>(out.checks.size());
      out.checks.push_back({c, kind == Intrinsic::Assumption, std::move(sc.expr)});
    }
  } catch (const Error& e) {
    throw e.located(body_name(body));
  }
  return out;
}

namespace {

using interp::Value;

class Evaluator {
 public:
  Evaluator(const Aggregate& a, const std::vector<Value>& args, interp::TestHeap& heap) : heap_(heap) {
    if (args.size() != a.params.size()) throw Error(ErrorCode::Unsupported, "argument count mismatch");
    for (std::size_t i = 0; i < args.size(); ++i) env_[a.params[i]] = args[i];
  }

  Value eval(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Local: {
        auto it = env_.find(e.text);
        if (it == env_.end()) throw Error(ErrorCode::Unsupported, "free variable " + e.text);
        return it->second;
      }
      case Expr::Kind::IntConst: return Value::of_int(static_cast<std::int32_t>(e.integer));
      case Expr::Kind::LongConst: return Value::of_long(e.integer);
      case Expr::Kind::FloatConst: return Value::of_float(static_cast<float>(e.real));
      case Expr::Kind::DoubleConst: return Value::of_double(e.real);
      case Expr::Kind::Null: return Value::null();
      case Expr::Kind::StringConst: return heap_.intern(e.text);
      case Expr::Kind::ClassConst: return heap_.intern("class " + e.text);
      case Expr::Kind::Neg: {
        Value v = eval(e.args[0]);
        if (v.kind == Value::Kind::Int || v.kind == Value::Kind::Long) {
          return interp::jvm::arith(grimp::Op::Sub, v.kind == Value::Kind::Int ? Value::of_int(0) : Value::of_long(0), v);
        }
        return v.kind == Value::Kind::Float ? Value::of_float(-static_cast<float>(v.d)) : Value::of_double(-v.d);
      }
      case Expr::Kind::Binary: {
        Value a = eval(e.args[0]);
        Value b = eval(e.args[1]);
        if (grimp::is_comparison(e.op)) return truth(interp::jvm::compare(e.op, a, b));
        return interp::jvm::arith(e.op, a, b);
      }
      case Expr::Kind::Cast: {
        Value v = eval(e.args[0]);
        return e.type.is_reference() ? v : interp::jvm::convert(v, e.type);
      }
      case Expr::Kind::InstanceOf: return truth(heap_.is_instance(eval(e.args[0]), e.text));
      case Expr::Kind::ArrayLength:
        return Value::of_int(static_cast<std::int32_t>(heap_.deref(eval(e.args[0])).elements.size()));
      case Expr::Kind::ArrayRead: {
        Value arr = eval(e.args[0]);
        Value idx = eval(e.args[1]);
        auto& o = heap_.deref(arr);
        if (idx.as_int() < 0 || static_cast<std::size_t>(idx.as_int()) >= o.elements.size()) {
          throw Error(ErrorCode::Trap, "array index out of bounds");
        }
        return o.elements[static_cast<std::size_t>(idx.as_int())];
      }
      case Expr::Kind::FieldRead: {
        auto& o = heap_.deref(eval(e.args[0]));
        auto it = o.fields.find(e.member->owner + "." + e.member->name);
        return it != o.fields.end() ? it->second : interp::default_value(e.type);
      }
      case Expr::Kind::StaticRead: {
        auto it = heap_.statics.find(e.member->owner + "." + e.member->name);
        return it != heap_.statics.end() ? it->second : interp::default_value(e.type);
      }
      case Expr::Kind::Call: {
        std::vector<Value> args;
        for (const auto& a : e.args) args.push_back(eval(a));
        std::string cls;
        if (e.call != grimp::CallKind::Static) cls = heap_.deref(args[0]).cls;
        const grimp::Body* callee = heap_.resolve ? heap_.resolve(*e.member, cls) : nullptr;
        if (!callee) throw Error(ErrorCode::Unsupported, "unresolved callee " + call_name(e));
        return interp::eval_grimp(*callee, args, heap_);
      }
      case Expr::Kind::Intrinsic: return intrinsic(e);
    }
    return Value::none();
  }

 private:
  static Value truth(bool b) { return Value::of_int(b ? 1 : 0); }

  Value intrinsic(const Expr& e) {
    using grimp::Op;
    switch (e.intrinsic) {
      case Intrinsic::Forall:
      case Intrinsic::Exists:
        throw Error(ErrorCode::Unsupported, "quantifiers cannot be evaluated");
      case Intrinsic::Old: return eval(e.args[0]);
      default: break;
    }
    std::vector<Value> v;
    for (const auto& a : e.args) v.push_back(eval(a));
    switch (e.intrinsic) {
      case Intrinsic::Eq: return truth(equal(v[0], v[1]));
      case Intrinsic::Neq: return truth(!equal(v[0], v[1]));
      case Intrinsic::Lt: return truth(interp::jvm::compare(Op::Lt, v[0], v[1]));
      case Intrinsic::Lte: return truth(interp::jvm::compare(Op::Le, v[0], v[1]));
      case Intrinsic::Gt: return truth(interp::jvm::compare(Op::Gt, v[0], v[1]));
      case Intrinsic::Gte: return truth(interp::jvm::compare(Op::Ge, v[0], v[1]));
      case Intrinsic::Not: return truth(v[0].i == 0);
      case Intrinsic::Implies: return truth(v[0].i == 0 || v[1].i != 0);
      case Intrinsic::Conditional: return v[0].i != 0 ? v[1] : v[2];
      default: throw Error(ErrorCode::Unsupported, std::string("cannot evaluate ") + grimp::intrinsic_name(e.intrinsic));
    }
  }

  static bool equal(const Value& a, const Value& b) {
    if (a.kind == Value::Kind::Ref || a.kind == Value::Kind::Int || a.kind == Value::Kind::Long) return a.i == b.i;
    return interp::jvm::compare(grimp::Op::Eq, a, b);
  }

  interp::TestHeap& heap_;
  std::map<std::string, Value> env_;
};

}  // namespace

interp::Value evaluate(const Aggregate& a, const std::vector<interp::Value>& args, interp::TestHeap& heap) {
  return Evaluator(a, args, heap).eval(a.expr);
}

}  // namespace bcv::spec
