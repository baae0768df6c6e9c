// SPDX-License-Identifier: Apache-2.0
#include "bcv/interp.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "bcv/error.hpp"

namespace bcv::interp {

using grimp::Expr;
using grimp::LValue;
using grimp::Op;
using grimp::Stmt;

bool operator==(const Value& a, const Value& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Value::Kind::Float:
    case Value::Kind::Double: return std::bit_cast<std::uint64_t>(a.d) == std::bit_cast<std::uint64_t>(b.d);
    case Value::Kind::Void: return true;
    default: return a.i == b.i;
  }
}

std::string to_string(const Value& v) {
  std::ostringstream os;
  switch (v.kind) {
    case Value::Kind::Void: os << "void"; break;
    case Value::Kind::Int: os << v.i; break;
    case Value::Kind::Long: os << v.i << "L"; break;
    case Value::Kind::Float: os << v.d << "F"; break;
    case Value::Kind::Double: os << v.d << "D"; break;
    case Value::Kind::Ref:
      if (v.i == 0) {
        os << "null";
      } else {
        os << "#" << v.i;
      }
      break;
  }
  return os.str();
}

Value default_value(const JType& t) {
  switch (t.kind()) {
    case JType::Kind::Void: return Value::none();
    case JType::Kind::Long: return Value::of_long(0);
    case JType::Kind::Float: return Value::of_float(0.0F);
    case JType::Kind::Double: return Value::of_double(0.0);
    case JType::Kind::Object:
    case JType::Kind::Array: return Value::null();
    default: return Value::of_int(0);
  }
}

namespace {

[[noreturn]] void trap(const std::string& what) { throw Error(ErrorCode::Trap, what); }

}  // namespace

Value TestHeap::allocate(std::string cls) {
  objects.push_back({std::move(cls), {}, false, {}});
  return Value::ref(static_cast<std::int64_t>(objects.size()));
}

Value TestHeap::allocate_array(const JType& element, std::int32_t length) {
  if (length < 0) trap("negative array size");
  Object o;
  o.cls = JType::array_of(element).descriptor();
  o.is_array = true;
  o.elements.assign(static_cast<std::size_t>(length), default_value(element));
  objects.push_back(std::move(o));
  return Value::ref(static_cast<std::int64_t>(objects.size()));
}

Value TestHeap::intern(const std::string& text) {
  auto it = strings.find(text);
  if (it != strings.end()) return Value::ref(it->second);
  Value v = allocate("java/lang/String");
  strings[text] = v.i;
  return v;
}

Object& TestHeap::deref(const Value& v) {
  if (v.kind != Value::Kind::Ref) trap("dereference of a non-reference value");
  if (v.i == 0) trap("null dereference");
  return objects.at(static_cast<std::size_t>(v.i - 1));
}

bool TestHeap::is_instance(const Value& v, const std::string& type) const {
  if (v.i == 0) return false;
  const std::string& cls = objects.at(static_cast<std::size_t>(v.i - 1)).cls;
  if (cls == type || type == "java/lang/Object") return true;
  return subtype ? subtype(cls, type) : false;
}

void TestHeap::tick() {
  if (budget == 0) trap("step budget exhausted");
  --budget;
}

bool TestHeap::same_state(const TestHeap& other) const { return objects == other.objects && statics == other.statics; }

namespace jvm {

std::int32_t d2i(double v) {
  if (std::isnan(v)) return 0;
  if (v >= 2147483647.0) return std::numeric_limits<std::int32_t>::max();
  if (v <= -2147483648.0) return std::numeric_limits<std::int32_t>::min();
  return static_cast<std::int32_t>(v);
}

std::int64_t d2l(double v) {
  if (std::isnan(v)) return 0;
  if (v >= 9223372036854775807.0) return std::numeric_limits<std::int64_t>::max();
  if (v <= -9223372036854775808.0) return std::numeric_limits<std::int64_t>::min();
  return static_cast<std::int64_t>(v);
}

Value convert(const Value& v, const JType& to) {
  using K = JType::Kind;
  const bool floating = v.kind == Value::Kind::Float || v.kind == Value::Kind::Double;
  switch (to.kind()) {
    case K::Int:
    case K::Boolean:
      if (floating) return Value::of_int(d2i(v.d));
      return Value::of_int(static_cast<std::int32_t>(static_cast<std::uint32_t>(static_cast<std::uint64_t>(v.i))));
    case K::Byte: return Value::of_int(static_cast<std::int8_t>(v.i));
    case K::Char: return Value::of_int(static_cast<std::uint16_t>(v.i));
    case K::Short: return Value::of_int(static_cast<std::int16_t>(v.i));
    case K::Long:
      if (floating) return Value::of_long(d2l(v.d));
      return Value::of_long(v.i);
    case K::Float:
      if (floating) return Value::of_float(static_cast<float>(v.d));
      return Value::of_float(static_cast<float>(v.i));
    case K::Double:
      if (floating) return Value::of_double(v.d);
      return Value::of_double(static_cast<double>(v.i));
    default:
      return v;
  }
}

namespace {

template <typename T>
T wrap_add(T a, T b) {
  using U = std::make_unsigned_t<T>;
  return static_cast<T>(static_cast<U>(a) + static_cast<U>(b));
}
template <typename T>
T wrap_sub(T a, T b) {
  using U = std::make_unsigned_t<T>;
  return static_cast<T>(static_cast<U>(a) - static_cast<U>(b));
}
template <typename T>
T wrap_mul(T a, T b) {
  using U = std::make_unsigned_t<T>;
  return static_cast<T>(static_cast<U>(a) * static_cast<U>(b));
}

template <typename T>
T integer_op(Op op, T a, T b, std::int32_t shift) {
  using U = std::make_unsigned_t<T>;
  constexpr int mask = sizeof(T) * 8 - 1;
  switch (op) {
    case Op::Add: return wrap_add(a, b);
    case Op::Sub: return wrap_sub(a, b);
    case Op::Mul: return wrap_mul(a, b);
    case Op::Div:
      if (b == 0) trap("division by zero");
      if (a == std::numeric_limits<T>::min() && b == -1) return a;
      return a / b;
    case Op::Rem:
      if (b == 0) trap("division by zero");
      if (b == -1) return 0;
      return a % b;
    case Op::And: return a & b;
    case Op::Or: return a | b;
    case Op::Xor: return a ^ b;
    case Op::Shl: return static_cast<T>(static_cast<U>(a) << (shift & mask));
    case Op::Shr: return static_cast<T>(a >> (shift & mask));
    case Op::Ushr: return static_cast<T>(static_cast<U>(a) >> (shift & mask));
    default: return 0;
  }
}

std::int32_t fcmp(double a, double b, Op op) {
  if (std::isnan(a) || std::isnan(b)) return op == Op::Cmpg ? 1 : -1;
  return a < b ? -1 : (a > b ? 1 : 0);
}

}  // namespace

Value arith(Op op, const Value& a, const Value& b) {
  if (op == Op::Cmp) return Value::of_int(a.i < b.i ? -1 : (a.i > b.i ? 1 : 0));
  if (op == Op::Cmpl || op == Op::Cmpg) return Value::of_int(fcmp(a.d, b.d, op));
  switch (a.kind) {
    case Value::Kind::Int:
      return Value::of_int(integer_op<std::int32_t>(op, a.as_int(), b.as_int(), b.as_int()));
    case Value::Kind::Long:
      return Value::of_long(integer_op<std::int64_t>(op, a.i, b.i, static_cast<std::int32_t>(b.i)));
    case Value::Kind::Float:
    case Value::Kind::Double: {
      double r = 0.0;
      switch (op) {
        case Op::Add: r = a.d + b.d; break;
        case Op::Sub: r = a.d - b.d; break;
        case Op::Mul: r = a.d * b.d; break;
        case Op::Div: r = a.d / b.d; break;
        case Op::Rem: r = std::fmod(a.d, b.d); break;
        default: trap("bitwise operation on a floating value");
      }
      if (a.kind == Value::Kind::Float) return Value::of_float(static_cast<float>(r));
      return Value::of_double(r);
    }
    default:
      trap("arithmetic on a non-numeric value");
  }
}

bool compare(Op op, const Value& a, const Value& b) {
  auto cmp = [&](auto x, auto y) {
    switch (op) {
      case Op::Eq: return x == y;
      case Op::Ne: return x != y;
      case Op::Lt: return x < y;
      case Op::Ge: return x >= y;
      case Op::Gt: return x > y;
      case Op::Le: return x <= y;
      default: return false;
    }
  };
  if (a.kind == Value::Kind::Float || a.kind == Value::Kind::Double) return cmp(a.d, b.d);
  return cmp(a.i, b.i);
}

Value store_narrow(const Value& v, const JType& element) {
  switch (element.kind()) {
    case JType::Kind::Boolean: return Value::of_int(v.as_int() & 1);
    case JType::Kind::Byte:
    case JType::Kind::Char:
    case JType::Kind::Short: return convert(v, element);
    default: return v;
  }
}

}  // namespace jvm

namespace {

class Machine {
 public:
  Machine(const grimp::Body& body, TestHeap& heap) : body_(body), heap_(heap) {}

  Value run(const std::vector<Value>& args) {
    if (args.size() != body_.params.size()) {
      throw Error(ErrorCode::Unsupported, "expected " + std::to_string(body_.params.size()) + " arguments");
    }
    for (const auto& l : body_.locals) locals_[l.name] = default_value(l.type);
    for (std::size_t i = 0; i < args.size(); ++i) locals_[body_.params[i]] = args[i];
    std::size_t pc = 0;
    const auto& stmts = body_.stmts;
    while (pc < stmts.size()) {
      heap_.tick();
      const Stmt& s = stmts[pc];
      switch (s.kind) {
        case Stmt::Kind::Assign: {
          assign(*s.lhs, *s.expr);
          break;
        }
        case Stmt::Kind::New:
          locals_[s.lhs->name] = heap_.allocate(s.label);
          break;
        case Stmt::Kind::NewArray:
          locals_[s.lhs->name] = heap_.allocate_array(s.type, eval(*s.expr).as_int());
          break;
        case Stmt::Kind::If:
          if (truth(eval(*s.expr))) {
            pc = target(s.label);
            continue;
          }
          break;
        case Stmt::Kind::Goto:
          pc = target(s.label);
          continue;
        case Stmt::Kind::Return:
          return s.expr ? eval(*s.expr) : Value::none();
        case Stmt::Kind::Invoke:
          eval(*s.expr);
          break;
        default:
          break;
      }
      ++pc;
    }
    trap("control fell off the end of the body");
  }

 private:
  static bool truth(const Value& v) { return v.i != 0; }

  std::size_t target(const std::string& label) {
    auto it = labels_.find(label);
    if (it != labels_.end()) return it->second;
    auto idx = body_.label_index(label);
    if (!idx) throw Error(ErrorCode::Unsupported, "jump to undefined label " + label);
    labels_[label] = *idx;
    return *idx;
  }

  static std::string field_key(const MemberRef& m) { return m.owner + "." + m.name; }

  void assign(const LValue& l, const Expr& rhs) {
    switch (l.kind) {
      case LValue::Kind::Local:
        locals_[l.name] = eval(rhs);
        return;
      case LValue::Kind::Static: {
        Value v = eval(rhs);
        heap_.statics[field_key(*l.member)] = v;
        return;
      }
      case LValue::Kind::Field: {
        Value obj = eval(l.args[0]);
        Value v = eval(rhs);
        heap_.deref(obj).fields[field_key(*l.member)] = v;
        return;
      }
      case LValue::Kind::Array: {
        Value arr = eval(l.args[0]);
        Value idx = eval(l.args[1]);
        Value v = eval(rhs);
        Object& o = heap_.deref(arr);
        if (idx.as_int() < 0 || static_cast<std::size_t>(idx.as_int()) >= o.elements.size()) trap("array index out of bounds");
        o.elements[static_cast<std::size_t>(idx.as_int())] = jvm::store_narrow(v, JType::parse(o.cls.substr(1)));
        return;
      }
    }
  }

  Value eval(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Local: return locals_.at(e.text);
      case Expr::Kind::IntConst: return Value::of_int(static_cast<std::int32_t>(e.integer));
      case Expr::Kind::LongConst: return Value::of_long(e.integer);
      case Expr::Kind::FloatConst: return Value::of_float(static_cast<float>(e.real));
      case Expr::Kind::DoubleConst: return Value::of_double(e.real);
      case Expr::Kind::Null: return Value::null();
      case Expr::Kind::StringConst: return heap_.intern(e.text);
      case Expr::Kind::ClassConst: return heap_.intern("class " + e.text);
      case Expr::Kind::Neg: {
        Value v = eval(e.args[0]);
        switch (v.kind) {
          case Value::Kind::Int: return Value::of_int(static_cast<std::int32_t>(0U - static_cast<std::uint32_t>(v.as_int())));
          case Value::Kind::Long: return Value::of_long(static_cast<std::int64_t>(0ULL - static_cast<std::uint64_t>(v.i)));
          case Value::Kind::Float: return Value::of_float(-static_cast<float>(v.d));
          default: return Value::of_double(-v.d);
        }
      }
      case Expr::Kind::Binary: {
        Value a = eval(e.args[0]);
        Value b = eval(e.args[1]);
        if (grimp::is_comparison(e.op)) return Value::of_int(jvm::compare(e.op, a, b) ? 1 : 0);
        return jvm::arith(e.op, a, b);
      }
      case Expr::Kind::Cast: {
        Value v = eval(e.args[0]);
        if (e.type.is_reference()) {
          if (v.i != 0 && !heap_.is_instance(v, e.type.kind() == JType::Kind::Array ? e.type.descriptor() : e.type.class_name())) {
            trap("class cast failure");
          }
          return v;
        }
        return jvm::convert(v, e.type);
      }
      case Expr::Kind::InstanceOf: {
        Value v = eval(e.args[0]);
        return Value::of_int(heap_.is_instance(v, e.text) ? 1 : 0);
      }
      case Expr::Kind::ArrayLength: {
        Value v = eval(e.args[0]);
        Object& o = heap_.deref(v);
        return Value::of_int(static_cast<std::int32_t>(o.elements.size()));
      }
      case Expr::Kind::ArrayRead: {
        Value arr = eval(e.args[0]);
        Value idx = eval(e.args[1]);
        Object& o = heap_.deref(arr);
        if (idx.as_int() < 0 || static_cast<std::size_t>(idx.as_int()) >= o.elements.size()) trap("array index out of bounds");
        return o.elements[static_cast<std::size_t>(idx.as_int())];
      }
      case Expr::Kind::FieldRead: {
        Value obj = eval(e.args[0]);
        Object& o = heap_.deref(obj);
        auto it = o.fields.find(field_key(*e.member));
        return it != o.fields.end() ? it->second : default_value(e.type);
      }
      case Expr::Kind::StaticRead: {
        auto it = heap_.statics.find(field_key(*e.member));
        return it != heap_.statics.end() ? it->second : default_value(e.type);
      }
      case Expr::Kind::Call: return call(e);
      case Expr::Kind::Intrinsic: throw Error(ErrorCode::Unsupported, "specification operator in executable code");
    }
    return Value::none();
  }

  Value call(const Expr& e) {
    std::vector<Value> args;
    for (const auto& a : e.args) args.push_back(eval(a));
    const MemberRef& m = *e.member;
    std::string cls;
    if (e.call != grimp::CallKind::Static) {
      const Object& recv = heap_.deref(args[0]);
      if (m.name == "<init>" && m.owner == "java/lang/Object") return Value::none();
      cls = e.call == grimp::CallKind::Special ? m.owner : recv.cls;
    }
    const grimp::Body* callee = heap_.resolve ? heap_.resolve(m, cls) : nullptr;
    if (!callee) throw Error(ErrorCode::Unsupported, "unresolved callee " + dotted_name(m.owner) + "." + m.name);
    return Machine(*callee, heap_).run(args);
  }

  const grimp::Body& body_;
  TestHeap& heap_;
  std::map<std::string, Value> locals_;
  std::map<std::string, std::size_t> labels_;
};

}  // namespace

Value eval_grimp(const grimp::Body& body, const std::vector<Value>& args, TestHeap& heap) {
  return Machine(body, heap).run(args);
}

}  // namespace bcv::interp
