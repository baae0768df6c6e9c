// SPDX-License-Identifier: Apache-2.0
#include "bcv/grimp.hpp"

#include <sstream>

#include "bcv/error.hpp"

namespace bcv::grimp {

const char* ex_name(Ex t) {
  switch (t) {
    case Ex::Unknown: return "unknown";
    case Ex::Boolean: return "boolean";
    case Ex::Int: return "int";
    case Ex::Long: return "long";
    case Ex::Real: return "real";
    case Ex::Ref: return "ref";
    case Ex::Void: return "void";
  }
  return "?";
}

Ex ex_of(const JType& t) {
  switch (t.kind()) {
    case JType::Kind::Void: return Ex::Void;
    case JType::Kind::Boolean: return Ex::Boolean;
    case JType::Kind::Byte:
    case JType::Kind::Char:
    case JType::Kind::Short:
    case JType::Kind::Int: return Ex::Int;
    case JType::Kind::Long: return Ex::Long;
    case JType::Kind::Float:
    case JType::Kind::Double: return Ex::Real;
    case JType::Kind::Object:
    case JType::Kind::Array: return Ex::Ref;
  }
  return Ex::Unknown;
}

Ex join(Ex a, Ex b) {
  if (a == b) return a;
  if (a == Ex::Unknown) return b;
  if (b == Ex::Unknown) return a;
  if ((a == Ex::Boolean && b == Ex::Int) || (a == Ex::Int && b == Ex::Boolean)) return Ex::Int;
  throw Error(ErrorCode::TypeConflict, std::string("cannot reconcile ") + ex_name(a) + " with " + ex_name(b));
}

const char* op_symbol(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Rem: return "%";
    case Op::And: return "&";
    case Op::Or: return "|";
    case Op::Xor: return "^";
    case Op::Shl: return "<<";
    case Op::Shr: return ">>";
    case Op::Ushr: return ">>>";
    case Op::Eq: return "==";
    case Op::Ne: return "!=";
    case Op::Lt: return "<";
    case Op::Ge: return ">=";
    case Op::Gt: return ">";
    case Op::Le: return "<=";
    case Op::Cmp: return "cmp";
    case Op::Cmpl: return "cmpl";
    case Op::Cmpg: return "cmpg";
  }
  return "?";
}

bool is_comparison(Op op) { return op >= Op::Eq && op <= Op::Le; }

Op negate_comparison(Op op) {
  switch (op) {
    case Op::Eq: return Op::Ne;
    case Op::Ne: return Op::Eq;
    case Op::Lt: return Op::Ge;
    case Op::Ge: return Op::Lt;
    case Op::Gt: return Op::Le;
    case Op::Le: return Op::Gt;
    default: return op;
  }
}

Expr local(std::string name, JType type) {
  Expr e;
  e.kind = Expr::Kind::Local;
  e.text = std::move(name);
  e.type = std::move(type);
  return e;
}

Expr int_const(std::int32_t v) {
  Expr e;
  e.kind = Expr::Kind::IntConst;
  e.integer = v;
  e.type = JType::of(JType::Kind::Int);
  return e;
}

Expr long_const(std::int64_t v) {
  Expr e;
  e.kind = Expr::Kind::LongConst;
  e.integer = v;
  e.type = JType::of(JType::Kind::Long);
  return e;
}

const char* intrinsic_name(Intrinsic k) {
  switch (k) {
    case Intrinsic::Eq: return "eq";
    case Intrinsic::Neq: return "neq";
    case Intrinsic::Lt: return "lt";
    case Intrinsic::Lte: return "lte";
    case Intrinsic::Gt: return "gt";
    case Intrinsic::Gte: return "gte";
    case Intrinsic::Not: return "not";
    case Intrinsic::Implies: return "implies";
    case Intrinsic::Conditional: return "conditional";
    case Intrinsic::Forall: return "forall";
    case Intrinsic::Exists: return "exists";
    case Intrinsic::Old: return "old";
    case Intrinsic::Invariant: return "invariant";
    case Intrinsic::Assertion: return "assertion";
    case Intrinsic::Assumption: return "assumption";
    case Intrinsic::Binding: return "binding";
  }
  return "?";
}

Expr binary(Op op, Expr a, Expr b, JType type) {
  Expr e;
  e.kind = Expr::Kind::Binary;
  e.op = op;
  e.type = std::move(type);
  e.args.push_back(std::move(a));
  e.args.push_back(std::move(b));
  return e;
}

const LocalVar* Body::find_local(const std::string& name) const {
  for (const auto& l : locals) {
    if (l.name == name) return &l;
  }
  return nullptr;
}

LocalVar* Body::find_local(const std::string& name) {
  for (auto& l : locals) {
    if (l.name == name) return &l;
  }
  return nullptr;
}

std::optional<std::size_t> Body::label_index(const std::string& label) const {
  for (std::size_t i = 0; i < stmts.size(); ++i) {
    if (stmts[i].kind == Stmt::Kind::Label && stmts[i].label == label) return i;
  }
  return std::nullopt;
}

JType Body::return_type() const { return MethodDescriptor::parse(method.descriptor).ret; }

namespace {

void print_expr(std::ostream& os, const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Local: os << e.text; break;
    case Expr::Kind::IntConst: os << e.integer; break;
    case Expr::Kind::LongConst: os << e.integer << "L"; break;
    case Expr::Kind::FloatConst: os << e.real << "F"; break;
    case Expr::Kind::DoubleConst: os << e.real; break;
    case Expr::Kind::Null: os << "null"; break;
    case Expr::Kind::StringConst: os << '"' << e.text << '"'; break;
    case Expr::Kind::ClassConst: os << e.text << ".class"; break;
    case Expr::Kind::Neg:
      os << "neg ";
      print_expr(os, e.args[0]);
      break;
    case Expr::Kind::Binary:
      if (e.op == Op::Cmp || e.op == Op::Cmpl || e.op == Op::Cmpg) {
        os << op_symbol(e.op) << "(";
        print_expr(os, e.args[0]);
        os << ", ";
        print_expr(os, e.args[1]);
        os << ")";
      } else {
        os << "(";
        print_expr(os, e.args[0]);
        os << " " << op_symbol(e.op) << " ";
        print_expr(os, e.args[1]);
        os << ")";
      }
      break;
    case Expr::Kind::Cast:
      os << "(" << e.type.java_name() << ") ";
      print_expr(os, e.args[0]);
      break;
    case Expr::Kind::InstanceOf:
      print_expr(os, e.args[0]);
      os << " instanceof " << e.text;
      break;
    case Expr::Kind::ArrayLength:
      os << "lengthof ";
      print_expr(os, e.args[0]);
      break;
    case Expr::Kind::ArrayRead:
      print_expr(os, e.args[0]);
      os << "[";
      print_expr(os, e.args[1]);
      os << "]";
      break;
    case Expr::Kind::FieldRead:
      print_expr(os, e.args[0]);
      os << "." << e.member->name;
      break;
    case Expr::Kind::StaticRead: os << dotted_name(e.member->owner) << "." << e.member->name; break;
    case Expr::Kind::Call: {
      std::size_t first = 0;
      if (e.call == CallKind::Static) {
        os << dotted_name(e.member->owner) << ".";
      } else {
        print_expr(os, e.args[0]);
        os << ".";
        first = 1;
      }
      os << e.member->name << "(";
      for (std::size_t i = first; i < e.args.size(); ++i) {
        if (i > first) os << ", ";
        print_expr(os, e.args[i]);
      }
      os << ")";
      break;
    }
    case Expr::Kind::Intrinsic:
      os << "@" << intrinsic_name(e.intrinsic) << "(";
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i > 0) os << ", ";
        print_expr(os, e.args[i]);
      }
      os << ")";
      break;
  }
}

void print_lvalue(std::ostream& os, const LValue& l) {
  switch (l.kind) {
    case LValue::Kind::Local: os << l.name; break;
    case LValue::Kind::Field:
      print_expr(os, l.args[0]);
      os << "." << l.member->name;
      break;
    case LValue::Kind::Static: os << dotted_name(l.member->owner) << "." << l.member->name; break;
    case LValue::Kind::Array:
      print_expr(os, l.args[0]);
      os << "[";
      print_expr(os, l.args[1]);
      os << "]";
      break;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::ostringstream os;
  print_expr(os, e);
  return os.str();
}

std::string to_string(const Stmt& s) {
  std::ostringstream os;
  switch (s.kind) {
    case Stmt::Kind::Assign:
      print_lvalue(os, *s.lhs);
      os << " = ";
      print_expr(os, *s.expr);
      break;
    case Stmt::Kind::New:
      print_lvalue(os, *s.lhs);
      os << " = new " << dotted_name(s.label);
      break;
    case Stmt::Kind::NewArray:
      print_lvalue(os, *s.lhs);
      os << " = newarray (" << s.type.java_name() << ")[";
      print_expr(os, *s.expr);
      os << "]";
      break;
    case Stmt::Kind::If:
      os << "if ";
      print_expr(os, *s.expr);
      os << " goto " << s.label;
      break;
    case Stmt::Kind::Goto: os << "goto " << s.label; break;
    case Stmt::Kind::Return:
      os << "return";
      if (s.expr) {
        os << " ";
        print_expr(os, *s.expr);
      }
      break;
    case Stmt::Kind::Invoke: print_expr(os, *s.expr); break;
    case Stmt::Kind::Label: os << s.label << ":"; break;
    case Stmt::Kind::Check: os << "check #" << s.check; break;
    case Stmt::Kind::Nop: os << "nop"; break;
  }
  return os.str();
}

std::string to_string(const Body& b) {
  std::ostringstream os;
  os << dotted_name(b.method.owner) << "." << b.method.name << b.method.descriptor << "\n";
  for (const auto& l : b.locals) {
    os << "  " << l.type.java_name() << " " << l.name;
    if (l.ex != Ex::Unknown) os << " : " << ex_name(l.ex);
    if (l.param) os << " (param)";
    os << "\n";
  }
  for (const auto& s : b.stmts) os << (s.kind == Stmt::Kind::Label ? "" : "    ") << to_string(s) << "\n";
  return os.str();
}

bool reads_local(const Expr& e, const std::string& name) {
  bool found = false;
  for_each_expr(e, [&](const Expr& x) { found = found || (x.kind == Expr::Kind::Local && x.text == name); });
  return found;
}

bool reads_heap(const Expr& e) {
  bool found = false;
  for_each_expr(e, [&](const Expr& x) {
    found = found || x.kind == Expr::Kind::ArrayRead || x.kind == Expr::Kind::FieldRead || x.kind == Expr::Kind::StaticRead;
  });
  return found;
}

bool has_call(const Expr& e) {
  bool found = false;
  for_each_expr(e, [&](const Expr& x) { found = found || x.kind == Expr::Kind::Call; });
  return found;
}

}  // namespace bcv::grimp
