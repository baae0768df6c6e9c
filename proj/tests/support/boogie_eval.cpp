// SPDX-License-Identifier: Apache-2.0
#include "boogie_eval.hpp"

#include <set>

namespace bcv::testing {

using boogie::BinOp;
using boogie::Expr;

std::optional<GroundValue> eval_ground(const Expr& e, const GroundEnv& env) {
  auto sub = [&](std::size_t i) { return eval_ground(e.args[i], env); };
  switch (e.kind) {
    case Expr::Kind::BoolLit: return GroundValue(e.boolean);
    case Expr::Kind::IntLit: return GroundValue(static_cast<long long>(e.integer));
    case Expr::Kind::RealLit: return GroundValue(std::stod(e.text));
    case Expr::Kind::Var: {
      auto it = env.vars.find(e.text);
      if (it == env.vars.end()) return std::nullopt;
      return it->second;
    }
    case Expr::Kind::Not: {
      auto a = sub(0);
      if (!a || !std::holds_alternative<bool>(*a)) return std::nullopt;
      return GroundValue(!std::get<bool>(*a));
    }
    case Expr::Kind::Neg: {
      auto a = sub(0);
      if (!a) return std::nullopt;
      if (auto* i = std::get_if<long long>(&*a)) return GroundValue(-*i);
      if (auto* d = std::get_if<double>(&*a)) return GroundValue(-*d);
      return std::nullopt;
    }
    case Expr::Kind::Ite: {
      auto c = sub(0);
      if (!c || !std::holds_alternative<bool>(*c)) return std::nullopt;
      return std::get<bool>(*c) ? sub(1) : sub(2);
    }
    case Expr::Kind::Call: {
      auto it = env.functions.find(e.text);
      if (it == env.functions.end()) return std::nullopt;
      std::vector<GroundValue> args;
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        auto v = sub(i);
        if (!v) return std::nullopt;
        args.push_back(*v);
      }
      return it->second(args);
    }
    case Expr::Kind::Binary: {
      auto a = sub(0);
      if (!a) return std::nullopt;
      if (e.op == BinOp::And || e.op == BinOp::Or || e.op == BinOp::Implies) {
        if (!std::holds_alternative<bool>(*a)) return std::nullopt;
        bool av = std::get<bool>(*a);
        if (e.op == BinOp::And && !av) return GroundValue(false);
        if (e.op == BinOp::Or && av) return GroundValue(true);
        if (e.op == BinOp::Implies && !av) return GroundValue(true);
        auto b = sub(1);
        if (!b || !std::holds_alternative<bool>(*b)) return std::nullopt;
        return b;
      }
      auto b = sub(1);
      if (!b || a->index() != b->index()) return std::nullopt;
      if (e.op == BinOp::Eq) return GroundValue(*a == *b);
      if (e.op == BinOp::Neq) return GroundValue(*a != *b);
      if (e.op == BinOp::Equiv) return GroundValue(*a == *b);
      if (std::holds_alternative<bool>(*a)) return std::nullopt;
      if (auto* x = std::get_if<long long>(&*a)) {
        long long y = std::get<long long>(*b);
        switch (e.op) {
          case BinOp::Lt: return GroundValue(*x < y);
          case BinOp::Le: return GroundValue(*x <= y);
          case BinOp::Gt: return GroundValue(*x > y);
          case BinOp::Ge: return GroundValue(*x >= y);
          case BinOp::Add: return GroundValue(*x + y);
          case BinOp::Sub: return GroundValue(*x - y);
          case BinOp::Mul: return GroundValue(*x * y);
          case BinOp::Div:
          case BinOp::Mod: {
            // Euclidean division, as in SMT-LIB.
            if (y == 0) return std::nullopt;
            long long q = *x / y, r = *x % y;
            if (r < 0) {
              r += (y > 0 ? y : -y);
              q = (*x - r) / y;
            }
            return GroundValue(e.op == BinOp::Div ? q : r);
          }
          default: return std::nullopt;
        }
      }
      double x = std::get<double>(*a), y = std::get<double>(*b);
      switch (e.op) {
        case BinOp::Lt: return GroundValue(x < y);
        case BinOp::Le: return GroundValue(x <= y);
        case BinOp::Gt: return GroundValue(x > y);
        case BinOp::Ge: return GroundValue(x >= y);
        case BinOp::Add: return GroundValue(x + y);
        case BinOp::Sub: return GroundValue(x - y);
        case BinOp::Mul: return GroundValue(x * y);
        case BinOp::RealDiv: return GroundValue(x / y);
        default: return std::nullopt;
      }
    }
    default:
      return std::nullopt;
  }
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& sub) {
  if (e.kind == Expr::Kind::Var) {
    auto it = sub.find(e.text);
    return it == sub.end() ? e : it->second;
  }
  Expr out = e;
  if (e.kind == Expr::Kind::Forall || e.kind == Expr::Kind::Exists) {
    auto inner = sub;
    for (const auto& b : e.bound) inner.erase(b.name);
    out.args[0] = substitute(e.args[0], inner);
    return out;
  }
  for (auto& a : out.args) a = substitute(a, sub);
  return out;
}

}  // namespace bcv::testing
