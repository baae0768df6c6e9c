// SPDX-License-Identifier: Apache-2.0
#include <functional>
#include <map>

#include "bcv/error.hpp"
#include "bcv/lift.hpp"

namespace bcv {

using grimp::Ex;
using grimp::Expr;
using grimp::LValue;
using grimp::Op;
using grimp::Stmt;

namespace {

bool boolean_ish(Ex t) { return t == Ex::Unknown || t == Ex::Boolean; }

bool is_bitwise(Op op) { return op == Op::And || op == Op::Or || op == Op::Xor; }

// Natural type given the current type of each local.
Ex natural(const Expr& e, const std::function<Ex(const std::string&)>& local_ex) {
  switch (e.kind) {
    case Expr::Kind::Local: return local_ex(e.text);
    case Expr::Kind::IntConst: return e.integer == 0 || e.integer == 1 ? Ex::Unknown : Ex::Int;
    case Expr::Kind::Binary:
      if (grimp::is_comparison(e.op)) return Ex::Boolean;
      if (e.op == Op::Cmp || e.op == Op::Cmpl || e.op == Op::Cmpg) return Ex::Int;
      if (is_bitwise(e.op) && grimp::ex_of(e.type) == Ex::Int) {
        Ex a = natural(e.args[0], local_ex);
        Ex b = natural(e.args[1], local_ex);
        if (boolean_ish(a) && boolean_ish(b)) return a == Ex::Unknown && b == Ex::Unknown ? Ex::Unknown : Ex::Boolean;
        return Ex::Int;
      }
      return grimp::ex_of(e.type);
    case Expr::Kind::InstanceOf: return Ex::Boolean;
    case Expr::Kind::ArrayLength: return Ex::Int;
    default: return grimp::ex_of(e.type);
  }
}

// Operand type of arithmetic: booleans take part as ints.
Ex numeric(const Expr& e) {
  Ex t = grimp::ex_of(e.type);
  return t == Ex::Boolean ? Ex::Int : t;
}

bool compatible(Ex expected, Ex actual) {
  if (expected == actual || expected == Ex::Unknown) return true;
  if (actual == Ex::Unknown) return expected == Ex::Boolean || expected == Ex::Int;
  return expected == Ex::Int && actual == Ex::Boolean;
}

class Typer {
 public:
  explicit Typer(grimp::Body body) : body_(std::move(body)) {}

  grimp::Body run() {
    for (auto& l : body_.locals) {
      if (l.ex != Ex::Unknown) continue;
      if (l.type.kind() == JType::Kind::Int) {
        state_[l.name] = Ex::Unknown;
      } else {
        l.ex = grimp::ex_of(l.type);
      }
    }
    resolve_variables();
    for (auto& l : body_.locals) {
      auto it = state_.find(l.name);
      if (it != state_.end()) l.ex = it->second;
    }
    collecting_ = false;
    for (auto& s : body_.stmts) {
      current_ = &s;
      visit(s);
    }
    return std::move(body_);
  }

 private:
  Ex local_ex(const std::string& name) const {
    auto it = state_.find(name);
    if (it != state_.end()) return it->second;
    const auto* l = body_.find_local(name);
    return l ? l->ex : Ex::Unknown;
  }

  Ex nat(const Expr& e) const {
    return natural(e, [this](const std::string& n) { return local_ex(n); });
  }

  // Fixpoint over the integer-typed variables whose type is not declared.
  void resolve_variables() {
    if (state_.empty()) return;
    for (;;) {
      bool changed = true;
      while (changed) {
        changed = false;
        for (const auto& s : body_.stmts) {
          if (s.kind != Stmt::Kind::Assign || s.lhs->kind != LValue::Kind::Local) continue;
          auto it = state_.find(s.lhs->name);
          if (it == state_.end()) continue;
          Ex j = grimp::join(it->second, nat(*s.expr));
          if (j != it->second) {
            it->second = j;
            changed = true;
          }
        }
      }
      contexts_.clear();
      collecting_ = true;
      for (auto& s : body_.stmts) {
        current_ = &s;
        visit(s);
      }
      bool promoted = false;
      for (auto& [name, t] : state_) {
        if (t == Ex::Unknown && contexts_[name].count(Ex::Int)) {
          t = Ex::Int;
          promoted = true;
        }
      }
      if (promoted) continue;
      for (auto& [name, t] : state_) {
        if (t == Ex::Unknown && contexts_[name].count(Ex::Boolean)) {
          t = Ex::Boolean;
          promoted = true;
        }
      }
      if (promoted) continue;
      for (auto& [name, t] : state_) {
        if (t == Ex::Unknown) {
          t = Ex::Int;
          promoted = true;
        }
      }
      if (!promoted) return;
    }
  }

  [[noreturn]] void conflict(Ex expected, Ex actual, const Expr& e) const {
    std::string where = current_ && current_->offset >= 0 ? "offset " + std::to_string(current_->offset) : std::string();
    throw Error(ErrorCode::TypeConflict,
                std::string(grimp::ex_name(actual)) + " value " + grimp::to_string(e) + " used as " + grimp::ex_name(expected),
                where);
  }

  void expect(Expr& e, Ex expected) {
    Ex actual = nat(e);
    if (collecting_) {
      if (e.kind == Expr::Kind::Local && state_.count(e.text) && expected != Ex::Unknown) contexts_[e.text].insert(expected);
    } else {
      if (!compatible(expected, actual)) conflict(expected, actual, e);
      Ex ex = expected == Ex::Unknown ? actual : expected;
      e.ex = ex == Ex::Unknown ? Ex::Int : ex;
    }
    children(e, expected);
  }

  void children(Expr& e, Ex expected) {
    switch (e.kind) {
      case Expr::Kind::Neg:
      case Expr::Kind::Cast:
        expect(e.args[0], numeric(e.args[0]));
        break;
      case Expr::Kind::Binary: {
        Expr& a = e.args[0];
        Expr& b = e.args[1];
        if (e.op == Op::Eq || e.op == Op::Ne) {
          Ex na = nat(a);
          Ex nb = nat(b);
          if (boolean_ish(na) && boolean_ish(nb)) {
            // Neither side decides; only a boolean side makes the comparison boolean.
            Ex t = na == Ex::Boolean || nb == Ex::Boolean ? Ex::Boolean : (collecting_ ? Ex::Unknown : Ex::Int);
            expect(a, t);
            expect(b, t);
            break;
          }
          Ex t = numeric(a);
          expect(a, t);
          expect(b, t);
          break;
        }
        if (is_bitwise(e.op) && grimp::ex_of(e.type) == Ex::Int && expected == Ex::Boolean && boolean_ish(nat(a)) &&
            boolean_ish(nat(b))) {
          expect(a, Ex::Boolean);
          expect(b, Ex::Boolean);
          break;
        }
        if (is_bitwise(e.op) && grimp::ex_of(e.type) == Ex::Int && !collecting_ && nat(e) == Ex::Boolean &&
            expected == Ex::Unknown) {
          expect(a, Ex::Boolean);
          expect(b, Ex::Boolean);
          break;
        }
        expect(a, numeric(a));
        expect(b, numeric(b));
        break;
      }
      case Expr::Kind::InstanceOf:
      case Expr::Kind::ArrayLength:
      case Expr::Kind::FieldRead:
        expect(e.args[0], Ex::Ref);
        break;
      case Expr::Kind::ArrayRead:
        expect(e.args[0], Ex::Ref);
        expect(e.args[1], Ex::Int);
        break;
      case Expr::Kind::Call: {
        auto md = MethodDescriptor::parse(e.member->descriptor);
        std::size_t first = e.args.size() - md.params.size();
        for (std::size_t i = 0; i < first; ++i) expect(e.args[i], Ex::Ref);
        for (std::size_t i = 0; i < md.params.size(); ++i) expect(e.args[first + i], grimp::ex_of(md.params[i]));
        break;
      }
      default:
        break;
    }
  }

  void visit(Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Assign: {
        LValue& l = *s.lhs;
        Ex target = l.kind == LValue::Kind::Local ? local_ex(l.name) : grimp::ex_of(l.type);
        if (l.kind == LValue::Kind::Field) expect(l.args[0], Ex::Ref);
        if (l.kind == LValue::Kind::Array) {
          expect(l.args[0], Ex::Ref);
          expect(l.args[1], Ex::Int);
        }
        if (!collecting_) l.ex = target == Ex::Unknown ? Ex::Int : target;
        expect(*s.expr, target);
        break;
      }
      case Stmt::Kind::New:
        if (!collecting_) s.lhs->ex = Ex::Ref;
        break;
      case Stmt::Kind::NewArray:
        if (!collecting_) s.lhs->ex = Ex::Ref;
        expect(*s.expr, Ex::Int);
        break;
      case Stmt::Kind::If:
        expect(*s.expr, Ex::Boolean);
        break;
      case Stmt::Kind::Return:
        if (s.expr) expect(*s.expr, grimp::ex_of(body_.return_type()));
        break;
      case Stmt::Kind::Invoke:
        expect(*s.expr, Ex::Unknown);
        break;
      default:
        break;
    }
  }

  grimp::Body body_;
  std::map<std::string, Ex> state_;
  std::map<std::string, std::set<Ex>> contexts_;
  bool collecting_ = true;
  const Stmt* current_ = nullptr;
};

}  // namespace

grimp::Body infer_expected_types(const grimp::Body& body) {
  try {
    return Typer(body).run();
  } catch (const Error& e) {
    throw e.located(dotted_name(body.method.owner) + "." + body.method.name);
  }
}

Ex natural_type(const Expr& e, const grimp::Body& body) {
  return natural(e, [&](const std::string& n) {
    const auto* l = body.find_local(n);
    return l ? l->ex : Ex::Unknown;
  });
}

}  // namespace bcv
