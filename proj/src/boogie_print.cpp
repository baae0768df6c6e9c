// SPDX-License-Identifier: Apache-2.0
#include <cctype>
#include <sstream>

#include "bcv/boogie.hpp"

namespace bcv::boogie {
namespace {

// Binding strength, loosest first.
enum Level { kEquiv = 1, kImplies, kLogic, kRel, kAdd, kMul, kUnary, kAtom };

Level level_of(BinOp op) {
  switch (op) {
    case BinOp::Equiv: return kEquiv;
    case BinOp::Implies: return kImplies;
    case BinOp::And: case BinOp::Or: return kLogic;
    case BinOp::Eq: case BinOp::Neq: case BinOp::Lt: case BinOp::Le: case BinOp::Gt: case BinOp::Ge: return kRel;
    case BinOp::Add: case BinOp::Sub: return kAdd;
    default: return kMul;
  }
}

const char* symbol(BinOp op) {
  switch (op) {
    case BinOp::Equiv: return "<==>";
    case BinOp::Implies: return "==>";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
    case BinOp::Eq: return "==";
    case BinOp::Neq: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "div";
    case BinOp::Mod: return "mod";
    case BinOp::RealDiv: return "/";
  }
  return "?";
}

Level level_of(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Binary: return level_of(e.op);
    case Expr::Kind::Not:
    case Expr::Kind::Neg: return kUnary;
    case Expr::Kind::IntLit: return e.integer < 0 ? kUnary : kAtom;
    case Expr::Kind::RealLit: return (!e.text.empty() && e.text[0] == '-') ? kUnary : kAtom;
    default: return kAtom;
  }
}

void type_to(std::ostream& os, const Type& t, bool as_arg);

void type_list(std::ostream& os, const std::vector<Type>& ts, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (i) os << ", ";
    type_to(os, ts[i], false);
  }
}

void type_to(std::ostream& os, const Type& t, bool as_arg) {
  switch (t.kind) {
    case Type::Kind::Bool: os << "bool"; return;
    case Type::Kind::Int: os << "int"; return;
    case Type::Kind::Real: os << "real"; return;
    case Type::Kind::Named:
      if (t.args.empty()) {
        os << t.name;
        return;
      }
      if (as_arg) os << "(";
      os << t.name;
      for (const auto& a : t.args) {
        os << " ";
        type_to(os, a, true);
      }
      if (as_arg) os << ")";
      return;
    case Type::Kind::Map:
      if (as_arg) os << "(";
      if (!t.type_params.empty()) {
        os << "<";
        for (std::size_t i = 0; i < t.type_params.size(); ++i) os << (i ? ", " : "") << t.type_params[i];
        os << ">";
      }
      os << "[";
      type_list(os, t.args, t.args.size() - 1);
      os << "]";
      type_to(os, t.args.back(), false);
      if (as_arg) os << ")";
      return;
  }
}

void expr_to(std::ostream& os, const Expr& e);

void expr_at(std::ostream& os, const Expr& e, int min_level) {
  if (level_of(e) < min_level) {
    os << "(";
    expr_to(os, e);
    os << ")";
  } else {
    expr_to(os, e);
  }
}

void args_to(std::ostream& os, const std::vector<Expr>& args, std::size_t from, std::size_t to) {
  for (std::size_t i = from; i < to; ++i) {
    if (i > from) os << ", ";
    expr_to(os, args[i]);
  }
}

void bound_to(std::ostream& os, const std::vector<TypedName>& vars) {
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i) os << ", ";
    os << vars[i].name << ": ";
    type_to(os, vars[i].type, false);
  }
}

void binary_to(std::ostream& os, const Expr& e) {
  const Expr& a = e.args[0];
  const Expr& b = e.args[1];
  int lhs = kAtom, rhs = kAtom;
  switch (level_of(e.op)) {
    case kEquiv: lhs = kEquiv; rhs = kImplies; break;
    case kImplies: lhs = kLogic; rhs = kImplies; break;
    case kLogic:
      lhs = (a.kind == Expr::Kind::Binary && a.op == e.op) ? kLogic : kRel;
      rhs = kRel;
      break;
    case kRel: lhs = kAdd; rhs = kAdd; break;
    case kAdd: lhs = kAdd; rhs = kMul; break;
    default: lhs = kMul; rhs = kUnary; break;
  }
  expr_at(os, a, lhs);
  os << " " << symbol(e.op) << " ";
  expr_at(os, b, rhs);
}

void expr_to(std::ostream& os, const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::BoolLit: os << (e.boolean ? "true" : "false"); return;
    case Expr::Kind::IntLit: os << e.integer; return;
    case Expr::Kind::RealLit: os << e.text; return;
    case Expr::Kind::Var: os << e.text; return;
    case Expr::Kind::Old:
      os << "old(";
      expr_to(os, e.args[0]);
      os << ")";
      return;
    case Expr::Kind::Not:
    case Expr::Kind::Neg: {
      os << (e.kind == Expr::Kind::Not ? "!" : "-");
      const Expr& a = e.args[0];
      bool nested_minus = e.kind == Expr::Kind::Neg && level_of(a) == kUnary &&
                          (a.kind == Expr::Kind::Neg || a.kind == Expr::Kind::IntLit || a.kind == Expr::Kind::RealLit);
      std::ostringstream operand;
      expr_at(operand, a, kUnary);
      std::string text = operand.str();
      // A minus sign directly before a number would be read back as a literal.
      bool literal_follows = e.kind == Expr::Kind::Neg && !text.empty() && std::isdigit(static_cast<unsigned char>(text[0]));
      if (nested_minus || literal_follows) {
        os << "(";
        expr_to(os, a);
        os << ")";
      } else {
        os << text;
      }
      return;
    }
    case Expr::Kind::Binary: binary_to(os, e); return;
    case Expr::Kind::Call:
      os << e.text << "(";
      args_to(os, e.args, 0, e.args.size());
      os << ")";
      return;
    case Expr::Kind::Select:
    case Expr::Kind::Store:
      expr_at(os, e.args[0], kAtom);
      os << "[";
      if (e.kind == Expr::Kind::Select) {
        args_to(os, e.args, 1, e.args.size());
      } else {
        args_to(os, e.args, 1, e.args.size() - 1);
        os << " := ";
        expr_to(os, e.args.back());
      }
      os << "]";
      return;
    case Expr::Kind::Coerce:
      os << "(";
      expr_at(os, e.args[0], kUnary);
      os << ": ";
      type_to(os, *e.type, false);
      os << ")";
      return;
    case Expr::Kind::Forall:
    case Expr::Kind::Exists:
      os << "(" << (e.kind == Expr::Kind::Forall ? "forall" : "exists");
      if (!e.type_params.empty()) {
        os << "<";
        for (std::size_t i = 0; i < e.type_params.size(); ++i) os << (i ? ", " : "") << e.type_params[i];
        os << ">";
      }
      os << " ";
      bound_to(os, e.bound);
      os << " :: ";
      expr_to(os, e.args[0]);
      os << ")";
      return;
    case Expr::Kind::Ite:
      os << "(if ";
      expr_to(os, e.args[0]);
      os << " then ";
      expr_to(os, e.args[1]);
      os << " else ";
      expr_to(os, e.args[2]);
      os << ")";
      return;
  }
}

void indent(std::ostream& os, int n) {
  for (int i = 0; i < n; ++i) os << "  ";
}

void stmts_to(std::ostream& os, const std::vector<Stmt>& stmts, int depth);

void stmt_to(std::ostream& os, const Stmt& s, int depth) {
  if (s.kind == Stmt::Kind::Label) {
    indent(os, depth > 0 ? depth - 1 : 0);
    os << s.names[0] << ":\n";
    return;
  }
  indent(os, depth);
  switch (s.kind) {
    case Stmt::Kind::Assign:
      os << s.names[0] << " := ";
      expr_to(os, s.exprs[0]);
      os << ";\n";
      break;
    case Stmt::Kind::Havoc:
      os << "havoc " << s.names[0] << ";\n";
      break;
    case Stmt::Kind::Call:
      os << "call ";
      for (std::size_t i = 0; i < s.names.size(); ++i) os << (i ? ", " : "") << s.names[i];
      if (!s.names.empty()) os << " := ";
      os << s.callee << "(";
      args_to(os, s.exprs, 0, s.exprs.size());
      os << ");\n";
      break;
    case Stmt::Kind::If:
      os << "if (";
      expr_to(os, s.exprs[0]);
      os << ") {\n";
      stmts_to(os, s.then_branch, depth + 1);
      indent(os, depth);
      os << "}";
      if (s.else_branch) {
        os << " else {\n";
        stmts_to(os, *s.else_branch, depth + 1);
        indent(os, depth);
        os << "}";
      }
      os << "\n";
      break;
    case Stmt::Kind::Goto:
      os << "goto ";
      for (std::size_t i = 0; i < s.names.size(); ++i) os << (i ? ", " : "") << s.names[i];
      os << ";\n";
      break;
    case Stmt::Kind::Assert:
    case Stmt::Kind::Assume:
      os << (s.kind == Stmt::Kind::Assert ? "assert " : "assume ");
      expr_to(os, s.exprs[0]);
      os << ";\n";
      break;
    case Stmt::Kind::Return:
      os << "return;\n";
      break;
    case Stmt::Kind::Label:
      break;
  }
}

void stmts_to(std::ostream& os, const std::vector<Stmt>& stmts, int depth) {
  for (const auto& s : stmts) stmt_to(os, s, depth);
}

void params_to(std::ostream& os, const std::vector<TypedName>& ps) {
  os << "(";
  bound_to(os, ps);
  os << ")";
}

void type_params_to(std::ostream& os, const std::vector<std::string>& tps) {
  if (tps.empty()) return;
  os << "<";
  for (std::size_t i = 0; i < tps.size(); ++i) os << (i ? ", " : "") << tps[i];
  os << ">";
}

void decl_to(std::ostream& os, const Decl& d) {
  switch (d.kind) {
    case Decl::Kind::Type:
      os << "type " << d.name;
      for (const auto& p : d.type_params) os << " " << p;
      if (d.synonym) {
        os << " = ";
        type_to(os, *d.synonym, false);
      }
      os << ";\n";
      return;
    case Decl::Kind::Const:
      os << "const " << (d.unique ? "unique " : "") << d.name << ": ";
      type_to(os, d.type, false);
      os << ";\n";
      return;
    case Decl::Kind::Var:
      os << "var " << d.name << ": ";
      type_to(os, d.type, false);
      os << ";\n";
      return;
    case Decl::Kind::Function:
      os << "function " << d.name;
      type_params_to(os, d.type_params);
      params_to(os, d.params);
      os << " returns (";
      type_to(os, d.type, false);
      os << ")";
      if (d.expr) {
        os << "\n{\n  ";
        expr_to(os, *d.expr);
        os << "\n}\n";
      } else {
        os << ";\n";
      }
      return;
    case Decl::Kind::Axiom:
      os << "axiom ";
      expr_to(os, *d.expr);
      os << ";\n";
      return;
    case Decl::Kind::Procedure:
      os << "procedure " << d.name;
      type_params_to(os, d.type_params);
      params_to(os, d.params);
      if (!d.outs.empty()) {
        os << " returns ";
        params_to(os, d.outs);
      }
      if (!d.body) os << ";";
      os << "\n";
      for (const auto& s : d.specs) {
        switch (s.kind) {
          case Spec::Kind::Requires: os << "  requires "; expr_to(os, *s.expr); break;
          case Spec::Kind::Ensures: os << "  ensures "; expr_to(os, *s.expr); break;
          case Spec::Kind::Modifies:
            os << "  modifies ";
            for (std::size_t i = 0; i < s.names.size(); ++i) os << (i ? ", " : "") << s.names[i];
            break;
        }
        os << ";\n";
      }
      if (d.body) {
        os << "{\n";
        for (const auto& l : d.body->locals) {
          os << "  var " << l.name << ": ";
          type_to(os, l.type, false);
          os << ";\n";
        }
        if (!d.body->locals.empty() && !d.body->stmts.empty()) os << "\n";
        stmts_to(os, d.body->stmts, 1);
        os << "}\n";
      }
      return;
  }
}

}  // namespace

std::string print(const Program& p) {
  std::ostringstream os;
  for (std::size_t i = 0; i < p.decls.size(); ++i) {
    const Decl& d = p.decls[i];
    bool spaced = d.kind == Decl::Kind::Procedure || (d.kind == Decl::Kind::Function && d.expr);
    bool prev_spaced = i > 0 && (p.decls[i - 1].kind == Decl::Kind::Procedure ||
                                 (p.decls[i - 1].kind == Decl::Kind::Function && p.decls[i - 1].expr) ||
                                 p.decls[i - 1].kind != d.kind);
    if (i > 0 && (spaced || prev_spaced)) os << "\n";
    decl_to(os, d);
  }
  return os.str();
}

std::string print(const Decl& d) {
  std::ostringstream os;
  decl_to(os, d);
  return os.str();
}

std::string print(const Stmt& s) {
  std::ostringstream os;
  stmt_to(os, s, 0);
  std::string out = os.str();
  while (!out.empty() && (out.back() == '\n' || out.front() == ' ')) {
    if (out.back() == '\n') out.pop_back();
    else out.erase(out.begin());
  }
  return out;
}

std::string print(const Expr& e) {
  std::ostringstream os;
  expr_to(os, e);
  return os.str();
}

std::string print(const Type& t) {
  std::ostringstream os;
  type_to(os, t, false);
  return os.str();
}

}  // namespace bcv::boogie
