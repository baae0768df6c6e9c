// SPDX-License-Identifier: Apache-2.0
#include <charconv>
#include <cmath>
#include <cstdio>

#include "bcv/encode.hpp"
#include "bcv/error.hpp"

namespace bcv::encode {

namespace b = boogie;
using grimp::Ex;
using grimp::Expr;
using grimp::Intrinsic;
using grimp::Op;

b::Type translate_type(const JType& t) {
  switch (t.kind()) {
    case JType::Kind::Boolean: return b::Type::boolean();
    case JType::Kind::Float:
    case JType::Kind::Double: return b::Type::real();
    case JType::Kind::Object:
    case JType::Kind::Array: return b::Type::named("Reference");
    default: return b::Type::integer();
  }
}

b::Type sort_of(Ex ex) {
  switch (ex) {
    case Ex::Boolean: return b::Type::boolean();
    case Ex::Real: return b::Type::real();
    case Ex::Ref: return b::Type::named("Reference");
    default: return b::Type::integer();
  }
}

std::string sanitize(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '$' || c == '#' || c == '\'';
    out += ok ? c : '$';
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0])) || out[0] == '.') out.insert(out.begin(), '$');
  if (b::is_keyword(out)) out += '$';
  return out;
}

namespace {

std::uint32_t fnv1a(std::string_view s) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : s) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

}  // namespace

std::string Mangler::claim(std::string mangled, std::string origin) {
  auto [it, fresh] = origins_.emplace(mangled, origin);
  if (!fresh && it->second != origin) {
    throw Error(ErrorCode::Unsupported, "name clash: " + it->second + " and " + origin + " both map to " + mangled);
  }
  return mangled;
}

std::string Mangler::type_const(std::string_view internal) {
  std::string name = internal.starts_with('[') ? "$" + std::string(internal.substr(1)) : dotted_name(internal);
  return claim(sanitize(name), "class " + std::string(internal));
}

std::string Mangler::field(const MemberRef& f) {
  return claim(sanitize(dotted_name(f.owner) + "." + f.name), "field " + f.owner + "." + f.name);
}

std::string Mangler::method(const MemberRef& m) {
  char hash[16];
  std::snprintf(hash, sizeof hash, "%08x", fnv1a(m.descriptor));
  return claim(sanitize(dotted_name(m.owner) + "." + m.name) + "#" + hash,
               "method " + m.owner + "." + m.name + m.descriptor);
}

std::string Symbols::type_ref(const std::string& internal) {
  types.insert(internal);
  return mangler.type_const(internal);
}

std::string Symbols::field_ref(const MemberRef& f) {
  MemberRef c = canonical(f);
  std::string name = mangler.field(c);
  fields.emplace(name, c);
  return name;
}

std::string Symbols::procedure_ref(const MemberRef& m, bool is_static) {
  MemberRef c = canonical(m);
  std::string name = mangler.method(c);
  procedures.emplace(name, Callee{c, is_static});
  return name;
}

std::int64_t Symbols::string_id(const std::string& s) {
  auto it = strings.find(s);
  if (it != strings.end()) return it->second;
  std::int64_t id = fnv1a(s) & 0x7fffffff;
  while (string_ids.count(id)) id = (id + 1) & 0x7fffffff;
  string_ids.insert(id);
  strings.emplace(s, id);
  return id;
}

namespace {

Ex natural(const Expr& e, const Scope& scope) {
  switch (e.kind) {
    case Expr::Kind::Local: {
      auto it = scope.local_ex.find(e.text);
      return it == scope.local_ex.end() ? grimp::ex_of(e.type) : it->second;
    }
    case Expr::Kind::IntConst: return Ex::Int;
    case Expr::Kind::Binary:
      if (grimp::is_comparison(e.op)) return Ex::Boolean;
      if (e.op == Op::Cmp || e.op == Op::Cmpl || e.op == Op::Cmpg) return Ex::Int;
      if ((e.op == Op::And || e.op == Op::Or || e.op == Op::Xor) && e.ex == Ex::Boolean) return Ex::Boolean;
      return grimp::ex_of(e.type);
    case Expr::Kind::InstanceOf: return Ex::Boolean;
    case Expr::Kind::ArrayLength: return Ex::Int;
    default: {
      Ex t = grimp::ex_of(e.type);
      return t == Ex::Unknown ? Ex::Int : t;
    }
  }
}

bool is_int_sort(Ex t) { return t == Ex::Int || t == Ex::Long || t == Ex::Unknown; }

b::Expr convert(b::Expr core, Ex from, Ex to) {
  if (from == Ex::Boolean && is_int_sort(to)) return b::ite(std::move(core), b::lit(std::int64_t{1}), b::lit(std::int64_t{0}));
  if (is_int_sort(from) && to == Ex::Boolean) return b::binary(b::BinOp::Neq, std::move(core), b::lit(std::int64_t{0}));
  if (is_int_sort(from) && to == Ex::Real) return b::call("int2real", {std::move(core)});
  if (from == Ex::Real && is_int_sort(to)) return b::call("real2int", {std::move(core)});
  return core;
}

b::Expr real_literal(double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::Unsupported, "non-finite floating-point constant");
  char buf[512];
  auto r = std::to_chars(buf, buf + sizeof buf, std::fabs(v), std::chars_format::fixed);
  std::string digits(buf, r.ptr);
  if (digits.find('.') == std::string::npos) digits += ".0";
  b::Expr lit = b::real_lit(digits);
  return std::signbit(v) && v != 0.0 ? b::minus(std::move(lit)) : lit;
}

class ExprTranslator {
 public:
  ExprTranslator(Symbols& sym, const Scope& scope) : sym_(sym), scope_(scope) {}

  b::Expr at(const Expr& e, Ex want) {
    if (e.kind == Expr::Kind::IntConst && want == Ex::Boolean && (e.integer == 0 || e.integer == 1)) {
      return b::lit(e.integer == 1);
    }
    return convert(core(e), natural(e, scope_), want);
  }

  b::Expr operator()(const Expr& e) { return at(e, e.ex); }

 private:
  b::Expr heap() const { return b::var(scope_.heap); }

  b::Expr core(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Local: {
        auto it = scope_.renames.find(e.text);
        return it != scope_.renames.end() ? it->second : b::var(sanitize(e.text));
      }
      case Expr::Kind::IntConst:
      case Expr::Kind::LongConst: return b::lit(e.integer);
      case Expr::Kind::FloatConst:
      case Expr::Kind::DoubleConst: return real_literal(e.real);
      case Expr::Kind::Null: return b::var("null");
      case Expr::Kind::StringConst: return b::call("string.const", {b::lit(sym_.string_id(e.text))});
      case Expr::Kind::ClassConst: return b::call("type2ref", {b::var(sym_.type_ref(e.text))});
      case Expr::Kind::Neg: return b::minus(at(e.args[0], natural(e, scope_)));
      case Expr::Kind::Binary: return binary(e);
      case Expr::Kind::Cast: return cast(e);
      case Expr::Kind::InstanceOf: return b::call("instanceof", {at(e.args[0], Ex::Ref), b::var(sym_.type_ref(e.text))});
      case Expr::Kind::ArrayLength: return b::call("lengthof", {at(e.args[0], Ex::Ref)});
      case Expr::Kind::ArrayRead:
        return b::coerce(b::call("array.read", {heap(), at(e.args[0], Ex::Ref), at(e.args[1], Ex::Int)}),
                         translate_type(e.type));
      case Expr::Kind::FieldRead:
        return b::call("read", {heap(), at(e.args[0], Ex::Ref), b::var(sym_.field_ref(*e.member))});
      case Expr::Kind::StaticRead:
        return b::call("read", {heap(), b::call("type2ref", {b::var(sym_.type_ref(sym_.canonical(*e.member).owner))}),
                                b::var(sym_.field_ref(*e.member))});
      case Expr::Kind::Call: return function_call(e);
      case Expr::Kind::Intrinsic: return intrinsic(e);
    }
    throw Error(ErrorCode::Unsupported, "expression " + grimp::to_string(e));
  }

  b::Expr function_call(const Expr& e) {
    if (!sym_.is_function || !sym_.is_function(*e.member)) {
      throw Error(ErrorCode::Unsupported, "call to procedure " + e.member->owner + "." + e.member->name + " inside an expression");
    }
    std::vector<b::Expr> args{heap()};
    for (const auto& a : e.args) args.push_back((*this)(a));
    return b::call(sym_.mangler.method(sym_.canonical(*e.member)), std::move(args));
  }

  b::Expr binary(const Expr& e) {
    const Expr& l = e.args[0];
    const Expr& r = e.args[1];
    auto both = [&](b::BinOp op) { return b::binary(op, (*this)(l), (*this)(r)); };
    switch (e.op) {
      case Op::Add: return both(b::BinOp::Add);
      case Op::Sub: return both(b::BinOp::Sub);
      case Op::Mul: return both(b::BinOp::Mul);
      case Op::Div: return both(grimp::ex_of(e.type) == Ex::Real ? b::BinOp::RealDiv : b::BinOp::Div);
      case Op::Rem:
        if (grimp::ex_of(e.type) == Ex::Real) throw Error(ErrorCode::Unsupported, "floating-point remainder");
        return both(b::BinOp::Mod);
      case Op::And:
        if (e.ex == Ex::Boolean) return both(b::BinOp::And);
        return b::call("bitand", {(*this)(l), (*this)(r)});
      case Op::Or:
        if (e.ex == Ex::Boolean) return both(b::BinOp::Or);
        return b::call("bitor", {(*this)(l), (*this)(r)});
      case Op::Xor:
        if (e.ex == Ex::Boolean) return both(b::BinOp::Neq);
        return b::call("bitxor", {(*this)(l), (*this)(r)});
      case Op::Shl: return b::call("shl", {(*this)(l), (*this)(r)});
      case Op::Shr: return b::call("shr", {(*this)(l), (*this)(r)});
      case Op::Ushr: return b::call("ushr", {(*this)(l), (*this)(r)});
      case Op::Eq:
        return both(l.ex == Ex::Boolean && r.ex == Ex::Boolean ? b::BinOp::Equiv : b::BinOp::Eq);
      case Op::Ne: return both(b::BinOp::Neq);
      case Op::Lt: return both(b::BinOp::Lt);
      case Op::Le: return both(b::BinOp::Le);
      case Op::Gt: return both(b::BinOp::Gt);
      case Op::Ge: return both(b::BinOp::Ge);
      case Op::Cmp:
      case Op::Cmpl:
      case Op::Cmpg: return b::call("cmp", {(*this)(l), (*this)(r)});
    }
    throw Error(ErrorCode::Unsupported, "operator");
  }

  b::Expr cast(const Expr& e) {
    const Expr& a = e.args[0];
    Ex to = grimp::ex_of(e.type);
    Ex from = natural(a, scope_);
    if (to == Ex::Ref) return at(a, Ex::Ref);
    if (from == Ex::Boolean) from = Ex::Int;
    return convert(at(a, from), from, to);
  }

  b::Expr intrinsic(const Expr& e) {
    auto arg = [&](std::size_t i) { return (*this)(e.args[i]); };
    auto cmp = [&](b::BinOp op) { return b::binary(op, arg(0), arg(1)); };
    switch (e.intrinsic) {
      case Intrinsic::Eq: {
        bool boolean = e.args[0].ex == Ex::Boolean && e.args[1].ex == Ex::Boolean;
        return cmp(boolean ? b::BinOp::Equiv : b::BinOp::Eq);
      }
      case Intrinsic::Neq: return cmp(b::BinOp::Neq);
      case Intrinsic::Lt: return cmp(b::BinOp::Lt);
      case Intrinsic::Lte: return cmp(b::BinOp::Le);
      case Intrinsic::Gt: return cmp(b::BinOp::Gt);
      case Intrinsic::Gte: return cmp(b::BinOp::Ge);
      case Intrinsic::Not: return b::negate(arg(0));
      case Intrinsic::Implies: return cmp(b::BinOp::Implies);
      case Intrinsic::Conditional: return b::ite(arg(0), arg(1), arg(2));
      case Intrinsic::Old:
        if (!scope_.in_ensures) throw Error(ErrorCode::OldOutsideEnsures, "old() outside a postcondition");
        return b::old(arg(0));
      case Intrinsic::Forall:
      case Intrinsic::Exists: {
        const Expr& v = e.args[0];
        Ex ex = scope_.local_ex.count(v.text) ? scope_.local_ex.at(v.text) : grimp::ex_of(v.type);
        Scope inner = scope_;
        std::string bound = sanitize(v.text);
        auto captured = [&](const std::string& n) {
          for (const auto& [k, x] : inner.renames) {
            if (k != v.text && x.kind == b::Expr::Kind::Var && x.text == n) return true;
          }
          return false;
        };
        while (captured(bound)) bound += '\'';
        inner.renames[v.text] = b::var(bound);
        ExprTranslator body(sym_, inner);
        return b::quantifier(e.intrinsic == Intrinsic::Forall, {{bound, sort_of(ex)}},
                             body.at(e.args[1], Ex::Boolean));
      }
      default: break;
    }
    throw Error(ErrorCode::Unsupported, std::string(grimp::intrinsic_name(e.intrinsic)) + " used as a value");
  }

  Symbols& sym_;
  const Scope& scope_;
};

}  // namespace

b::Expr translate_expr(const Expr& e, Symbols& sym, const Scope& scope) { return ExprTranslator(sym, scope)(e); }

b::Expr translate_expr(const Expr& e, Ex want, Symbols& sym, const Scope& scope) {
  return ExprTranslator(sym, scope).at(e, want);
}

}  // namespace bcv::encode
