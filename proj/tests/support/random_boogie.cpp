// SPDX-License-Identifier: Apache-2.0
#include "random_boogie.hpp"

#include <limits>

namespace bcv::testing {

namespace {

using namespace boogie;

class Gen {
 public:
  explicit Gen(Rng& r) : r_(r) {}

  Program program() {
    Program p;
    int n = r_.uniform(1, 8);
    for (int k = 0; k < n; ++k) p.decls.push_back(decl());
    return p;
  }

 private:
  std::string ident() {
    static const std::vector<std::string> names = {"x", "y", "h", "#heap", "@ret", "a.b.C", "f$", "v'", "T0", "array.read", "i"};
    return r_.pick(names);
  }

  Type type(int d) {
    switch (d <= 0 ? r_.uniform(0, 3) : r_.uniform(0, 5)) {
      case 0: return Type::boolean();
      case 1: return Type::integer();
      case 2: return Type::real();
      case 3: return Type::named(r_.pick(std::vector<std::string>{"Heap", "Reference", "Type"}));
      case 4: return Type::named("Field", {type(d - 1)});
      default: {
        Type m;
        m.kind = Type::Kind::Map;
        if (r_.chance(0.5)) m.type_params = {"a"};
        int dom = r_.uniform(1, 2);
        for (int k = 0; k < dom; ++k) m.args.push_back(type(d - 1));
        m.args.push_back(m.type_params.empty() ? type(d - 1) : Type::named("a"));
        return m;
      }
    }
  }

  std::vector<TypedName> typed(int lo, int hi) {
    std::vector<TypedName> out;
    int n = r_.uniform(lo, hi);
    for (int k = 0; k < n; ++k) out.push_back({ident(), type(2)});
    return out;
  }

  Expr expr(int d) {
    if (d <= 0 || r_.chance(0.2)) {
      switch (r_.uniform(0, 3)) {
        case 0: return lit(r_.chance(0.5));
        case 1: {
          std::int64_t v = r_.pick(std::vector<std::int64_t>{0, 1, -1, 42, -7, std::numeric_limits<std::int64_t>::min(),
                                                             std::numeric_limits<std::int64_t>::max()});
          return lit(v);
        }
        case 2: return real_lit(r_.pick(std::vector<std::string>{"0.0", "1.5", "3.25", "100.0"}));
        default: return var(ident());
      }
    }
    switch (r_.uniform(0, 10)) {
      case 0: return old(expr(d - 1));
      case 1: return negate(expr(d - 1));
      case 2: return minus(expr(d - 1));
      case 3: {
        std::vector<Expr> args;
        int n = r_.uniform(0, 3);
        for (int k = 0; k < n; ++k) args.push_back(expr(d - 1));
        return call(r_.pick(std::vector<std::string>{"read", "lengthof", "f.g#0a1b2c3d", "cmp"}), std::move(args));
      }
      case 4: {
        std::vector<Expr> idx;
        int n = r_.uniform(1, 2);
        for (int k = 0; k < n; ++k) idx.push_back(expr(d - 1));
        return select(expr(d - 1), std::move(idx));
      }
      case 5: return store(expr(d - 1), {expr(d - 1)}, expr(d - 1));
      case 6: return coerce(expr(d - 1), type(1));
      case 7: {
        std::vector<std::string> tps;
        if (r_.chance(0.3)) tps = {"a"};
        return quantifier(r_.chance(0.5), typed(1, 2), expr(d - 1), tps);
      }
      case 8: return ite(expr(d - 1), expr(d - 1), expr(d - 1));
      default: return binary(static_cast<BinOp>(r_.uniform(0, static_cast<int>(BinOp::RealDiv))), expr(d - 1), expr(d - 1));
    }
  }

  std::vector<Stmt> stmts(int d) {
    std::vector<Stmt> out;
    int n = r_.uniform(0, 5);
    for (int k = 0; k < n; ++k) out.push_back(stmt(d));
    return out;
  }

  Stmt stmt(int d) {
    switch (r_.uniform(0, d <= 0 ? 7 : 8)) {
      case 0: return label("L" + std::to_string(r_.uniform(0, 99)));
      case 1: return assign(ident(), expr(3));
      case 2: {
        std::vector<std::string> outs;
        int n = r_.uniform(0, 2);
        for (int k = 0; k < n; ++k) outs.push_back(ident());
        std::vector<Expr> args;
        int m = r_.uniform(0, 3);
        for (int k = 0; k < m; ++k) args.push_back(expr(2));
        return call_stmt(outs, r_.pick(std::vector<std::string>{"new", "array.new", "p.C.m#00ff00ff"}), args);
      }
      case 3: {
        std::vector<std::string> targets = {"L1"};
        if (r_.chance(0.3)) targets.push_back("L2");
        return goto_stmt(targets);
      }
      case 4: return assert_stmt(expr(3));
      case 5: return assume_stmt(expr(3));
      case 6: return return_stmt();
      case 7: return havoc(ident());
      default: {
        std::optional<std::vector<Stmt>> els;
        if (r_.chance(0.4)) els = stmts(d - 1);
        return if_stmt(expr(2), stmts(d - 1), els);
      }
    }
  }

  Decl decl() {
    Decl d;
    d.name = ident();
    switch (r_.uniform(0, 5)) {
      case 0:
        d.kind = Decl::Kind::Type;
        d.name = r_.pick(std::vector<std::string>{"Heap", "Field", "Box"});
        if (r_.chance(0.5)) d.type_params = {"a"};
        if (r_.chance(0.4)) d.synonym = type(2);
        break;
      case 1:
        d.kind = Decl::Kind::Const;
        d.type = type(2);
        d.unique = r_.chance(0.5);
        break;
      case 2:
        d.kind = Decl::Kind::Var;
        d.type = type(2);
        break;
      case 3:
        d.kind = Decl::Kind::Function;
        if (r_.chance(0.3)) d.type_params = {"a"};
        d.params = typed(0, 3);
        d.type = type(2);
        if (r_.chance(0.6)) d.expr = expr(4);
        break;
      case 4:
        d.kind = Decl::Kind::Axiom;
        d.name.clear();
        d.expr = expr(4);
        break;
      default: {
        d.kind = Decl::Kind::Procedure;
        d.params = typed(0, 3);
        d.outs = typed(0, 1);
        int specs = r_.uniform(0, 3);
        for (int k = 0; k < specs; ++k) {
          Spec s;
          s.kind = static_cast<Spec::Kind>(r_.uniform(0, 2));
          if (s.kind == Spec::Kind::Modifies)
            s.names = {"#heap"};
          else
            s.expr = expr(3);
          d.specs.push_back(s);
        }
        if (r_.chance(0.7)) d.body = Body{typed(0, 3), stmts(2)};
      }
    }
    return d;
  }

  Rng& r_;
};

}  // namespace

Program random_program(Rng& rng) { return Gen(rng).program(); }

}  // namespace bcv::testing
