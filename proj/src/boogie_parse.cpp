// SPDX-License-Identifier: Apache-2.0
#include <array>
#include <cctype>
#include <charconv>

#include "bcv/boogie.hpp"
#include "bcv/error.hpp"

namespace bcv::boogie {
namespace {

constexpr std::array kKeywords = {
    "assert",   "assume", "axiom", "bool",   "call",     "const",    "div",     "else",   "ensures",
    "exists",   "false",  "forall", "free",  "function", "goto",     "havoc",   "if",     "int",
    "mod",      "modifies", "old",  "procedure", "real", "requires", "return",  "returns", "then",
    "true",     "type",   "unique", "var"};

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '$' || c == '#' ||
         c == '\'' || c == '`' || c == '~' || c == '^' || c == '\\' || c == '?' || c == '@';
}
bool ident_char(char c) { return ident_start(c) || std::isdigit(static_cast<unsigned char>(c)); }

struct Token {
  enum class Kind { Ident, Int, Real, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  SourcePos pos;
  std::size_t begin = 0, end = 0;
};

[[noreturn]] void syntax(const SourcePos& pos, const std::string& msg) {
  throw Error(ErrorCode::Syntax, msg, std::to_string(pos.line) + ":" + std::to_string(pos.column));
}

std::vector<Token> lex(std::string_view s) {
  static constexpr std::array kPuncts = {"<==>", "==>", "::", ":=", "==", "!=", "<=", ">=", "&&", "||",
                                         "(",    ")",   "[",  "]",  "{",  "}",  "<",  ">",  ",",  ";",
                                         ":",    "+",   "-",  "*",  "/",  "!",  "="};
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (s.substr(i, 2) == "//") {
      while (i < s.size() && s[i] != '\n') advance(1);
      continue;
    }
    if (s.substr(i, 2) == "/*") {
      SourcePos start{line, col};
      auto close = s.find("*/", i + 2);
      if (close == std::string_view::npos) syntax(start, "unterminated comment");
      advance(close + 2 - i);
      continue;
    }
    Token t;
    t.pos = {line, col};
    t.begin = i;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      t.kind = Token::Kind::Int;
      if (j + 1 < s.size() && s[j] == '.' && std::isdigit(static_cast<unsigned char>(s[j + 1]))) {
        ++j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        if (j < s.size() && s[j] == 'e') {
          std::size_t k = j + 1;
          if (k < s.size() && s[k] == '-') ++k;
          if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
            while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
            j = k;
          }
        }
        t.kind = Token::Kind::Real;
      }
      t.text = std::string(s.substr(i, j - i));
      advance(j - i);
    } else if (ident_start(c)) {
      std::size_t j = i;
      while (j < s.size() && ident_char(s[j])) ++j;
      t.kind = Token::Kind::Ident;
      t.text = std::string(s.substr(i, j - i));
      advance(j - i);
    } else {
      t.kind = Token::Kind::Punct;
      for (const char* p : kPuncts) {
        std::string_view pv(p);
        if (s.substr(i, pv.size()) == pv) {
          t.text = std::string(pv);
          break;
        }
      }
      if (t.text.empty()) syntax(t.pos, std::string("unexpected character '") + c + "'");
      advance(t.text.size());
    }
    t.end = i;
    out.push_back(std::move(t));
  }
  Token end;
  end.pos = {line, col};
  end.begin = end.end = s.size();
  out.push_back(end);
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  Program program() {
    Program p;
    while (!at_end()) p.decls.push_back(decl());
    return p;
  }

  Expr expression_only() {
    Expr e = expr();
    if (!at_end()) fail("unexpected '" + peek().text + "' after expression");
    return e;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  bool is(std::string_view text, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return (t.kind == Token::Kind::Punct || t.kind == Token::Kind::Ident) && t.text == text;
  }
  bool accept(std::string_view text) {
    if (!is(text)) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void fail(const std::string& msg) const { syntax(peek().pos, msg); }
  void expect(std::string_view text) {
    if (!accept(text)) {
      fail("expected '" + std::string(text) + "' but found " +
           (at_end() ? std::string("end of input") : "'" + peek().text + "'"));
    }
  }
  std::string ident() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Ident || is_keyword(t.text)) {
      fail("expected identifier but found " + (at_end() ? std::string("end of input") : "'" + t.text + "'"));
    }
    ++pos_;
    return t.text;
  }
  bool at_ident() const { return peek().kind == Token::Kind::Ident && !is_keyword(peek().text); }

  // Types

  Type type() {
    if (accept("bool")) return Type::boolean();
    if (accept("int")) return Type::integer();
    if (accept("real")) return Type::real();
    if (is("<") || is("[")) {
      Type t;
      t.kind = Type::Kind::Map;
      if (accept("<")) {
        t.type_params.push_back(ident());
        while (accept(",")) t.type_params.push_back(ident());
        expect(">");
      }
      expect("[");
      t.args.push_back(type());
      while (accept(",")) t.args.push_back(type());
      expect("]");
      t.args.push_back(type());
      return t;
    }
    if (accept("(")) {
      Type t = type();
      expect(")");
      return t;
    }
    Type t = Type::named(ident());
    while (true) {
      if (at_ident()) {
        t.args.push_back(Type::named(ident()));
      } else if (is("bool") || is("int") || is("real")) {
        t.args.push_back(type());
      } else if (accept("(")) {
        t.args.push_back(type());
        expect(")");
      } else {
        break;
      }
    }
    return t;
  }

  TypedName typed_name() {
    TypedName n;
    n.name = ident();
    expect(":");
    n.type = type();
    return n;
  }

  std::vector<TypedName> typed_names_until(std::string_view close) {
    std::vector<TypedName> out;
    if (is(close)) return out;
    out.push_back(typed_name());
    while (accept(",")) out.push_back(typed_name());
    return out;
  }

  std::vector<std::string> type_params() {
    std::vector<std::string> out;
    if (accept("<")) {
      out.push_back(ident());
      while (accept(",")) out.push_back(ident());
      expect(">");
    }
    return out;
  }

  // Expressions

  Expr expr() { return equiv(); }

  Expr equiv() {
    Expr e = implies();
    while (accept("<==>")) e = binary(BinOp::Equiv, std::move(e), implies());
    return e;
  }

  Expr implies() {
    Expr e = logic();
    if (accept("==>")) return binary(BinOp::Implies, std::move(e), implies());
    return e;
  }

  Expr logic() {
    Expr e = relation();
    if (is("&&") || is("||")) {
      std::string op = peek().text;
      BinOp b = op == "&&" ? BinOp::And : BinOp::Or;
      while (accept(op)) e = binary(b, std::move(e), relation());
      if (is("&&") || is("||")) fail("mixing && and || requires parentheses");
    }
    return e;
  }

  Expr relation() {
    Expr e = additive();
    static const std::pair<const char*, BinOp> ops[] = {{"==", BinOp::Eq}, {"!=", BinOp::Neq}, {"<=", BinOp::Le},
                                                       {">=", BinOp::Ge}, {"<", BinOp::Lt},   {">", BinOp::Gt}};
    for (const auto& [sym, op] : ops) {
      if (accept(sym)) {
        e = binary(op, std::move(e), additive());
        for (const auto& [sym2, op2] : ops) {
          (void)op2;
          if (is(sym2)) fail("relational operators do not associate");
        }
        return e;
      }
    }
    return e;
  }

  Expr additive() {
    Expr e = multiplicative();
    while (true) {
      if (accept("+")) e = binary(BinOp::Add, std::move(e), multiplicative());
      else if (accept("-")) e = binary(BinOp::Sub, std::move(e), multiplicative());
      else return e;
    }
  }

  Expr multiplicative() {
    Expr e = unary();
    while (true) {
      if (accept("*")) e = binary(BinOp::Mul, std::move(e), unary());
      else if (accept("div")) e = binary(BinOp::Div, std::move(e), unary());
      else if (accept("mod")) e = binary(BinOp::Mod, std::move(e), unary());
      else if (accept("/")) e = binary(BinOp::RealDiv, std::move(e), unary());
      else return e;
    }
  }

  Expr unary() {
    if (accept("!")) return negate(unary());
    if (is("-")) {
      const Token& minus_tok = peek();
      const Token& next = peek(1);
      if ((next.kind == Token::Kind::Int || next.kind == Token::Kind::Real) && next.begin == minus_tok.end) {
        ++pos_;
        return postfix(number(true));
      }
      ++pos_;
      return minus(unary());
    }
    return postfix(atom());
  }

  Expr postfix(Expr e) {
    while (accept("[")) {
      std::vector<Expr> idx;
      idx.push_back(expr());
      while (accept(",")) idx.push_back(expr());
      if (accept(":=")) {
        Expr v = expr();
        expect("]");
        e = store(std::move(e), std::move(idx), std::move(v));
      } else {
        expect("]");
        e = select(std::move(e), std::move(idx));
      }
    }
    return e;
  }

  Expr number(bool negative) {
    const Token& t = peek();
    ++pos_;
    if (t.kind == Token::Kind::Real) return real_lit((negative ? "-" : "") + t.text);
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    (void)p;
    constexpr std::uint64_t kMaxMagnitude = std::uint64_t{1} << 63;
    if (ec != std::errc() || v > kMaxMagnitude || (!negative && v == kMaxMagnitude)) {
      syntax(t.pos, "integer literal out of range: " + t.text);
    }
    if (negative) return lit(static_cast<std::int64_t>(0 - v));
    return lit(static_cast<std::int64_t>(v));
  }

  std::vector<Expr> call_args() {
    std::vector<Expr> args;
    expect("(");
    if (!is(")")) {
      args.push_back(expr());
      while (accept(",")) args.push_back(expr());
    }
    expect(")");
    return args;
  }

  Expr atom() {
    const Token& t = peek();
    if (t.kind == Token::Kind::Int || t.kind == Token::Kind::Real) return number(false);
    if (accept("true")) return lit(true);
    if (accept("false")) return lit(false);
    if (accept("old")) {
      expect("(");
      Expr e = expr();
      expect(")");
      return old(std::move(e));
    }
    if ((is("int") || is("real")) && is("(", 1)) {
      std::string name = peek().text;
      ++pos_;
      return call(name, call_args());
    }
    if (accept("(")) {
      if (is("forall") || is("exists")) {
        bool forall = peek().text == "forall";
        ++pos_;
        auto tps = type_params();
        auto bound = typed_names_until("::");
        if (bound.empty()) fail("quantifier without bound variables");
        expect("::");
        Expr body = expr();
        expect(")");
        return quantifier(forall, std::move(bound), std::move(body), std::move(tps));
      }
      if (accept("if")) {
        Expr c = expr();
        expect("then");
        Expr a = expr();
        expect("else");
        Expr b = expr();
        expect(")");
        return ite(std::move(c), std::move(a), std::move(b));
      }
      Expr e = expr();
      if (accept(":")) {
        Type ty = type();
        expect(")");
        return coerce(std::move(e), std::move(ty));
      }
      expect(")");
      return e;
    }
    std::string name = ident();
    if (is("(")) return call(std::move(name), call_args());
    return var(std::move(name));
  }

  // Statements

  std::vector<Stmt> block() {
    expect("{");
    std::vector<Stmt> out;
    while (!is("}")) {
      if (at_end()) fail("unterminated block");
      out.push_back(stmt());
    }
    expect("}");
    return out;
  }

  Stmt stmt() {
    SourcePos pos = peek().pos;
    Stmt s;
    if (accept("call")) {
      std::vector<std::string> names;
      names.push_back(ident());
      while (accept(",")) names.push_back(ident());
      if (accept(":=")) {
        std::string callee = ident();
        s = call_stmt(std::move(names), std::move(callee), call_args());
      } else {
        if (names.size() != 1) fail("expected ':=' after call targets");
        s = call_stmt({}, std::move(names.front()), call_args());
      }
      expect(";");
    } else if (accept("if")) {
      expect("(");
      Expr c = expr();
      expect(")");
      auto then_branch = block();
      std::optional<std::vector<Stmt>> else_branch;
      if (accept("else")) {
        if (is("if")) {
          else_branch = std::vector<Stmt>{stmt()};
        } else {
          else_branch = block();
        }
      }
      s = if_stmt(std::move(c), std::move(then_branch), std::move(else_branch));
    } else if (accept("goto")) {
      std::vector<std::string> names;
      names.push_back(ident());
      while (accept(",")) names.push_back(ident());
      expect(";");
      s = goto_stmt(std::move(names));
    } else if (accept("assert")) {
      s = assert_stmt(expr());
      expect(";");
    } else if (accept("assume")) {
      s = assume_stmt(expr());
      expect(";");
    } else if (accept("return")) {
      expect(";");
      s = return_stmt();
    } else if (accept("havoc")) {
      s = havoc(ident());
      expect(";");
    } else {
      std::string name = ident();
      if (accept(":")) {
        s = label(std::move(name));
      } else {
        expect(":=");
        s = assign(std::move(name), expr());
        expect(";");
      }
    }
    s.pos = pos;
    return s;
  }

  // Declarations

  Decl decl() {
    Decl d;
    d.pos = peek().pos;
    if (accept("type")) {
      d.kind = Decl::Kind::Type;
      d.name = ident();
      while (at_ident()) d.type_params.push_back(ident());
      if (accept("=")) d.synonym = type();
      expect(";");
    } else if (accept("const")) {
      d.kind = Decl::Kind::Const;
      d.unique = accept("unique");
      d.name = ident();
      expect(":");
      d.type = type();
      expect(";");
    } else if (accept("var")) {
      d.kind = Decl::Kind::Var;
      d.name = ident();
      expect(":");
      d.type = type();
      expect(";");
    } else if (accept("function")) {
      d.kind = Decl::Kind::Function;
      d.name = ident();
      d.type_params = type_params();
      expect("(");
      d.params = typed_names_until(")");
      expect(")");
      if (accept("returns")) {
        expect("(");
        if (at_ident() && is(":", 1)) {
          ident();
          expect(":");
        }
        d.type = type();
        expect(")");
      } else {
        expect(":");
        d.type = type();
      }
      if (accept("{")) {
        d.expr = expr();
        expect("}");
      } else {
        expect(";");
      }
    } else if (accept("axiom")) {
      d.kind = Decl::Kind::Axiom;
      d.expr = expr();
      expect(";");
    } else if (accept("procedure")) {
      d.kind = Decl::Kind::Procedure;
      d.name = ident();
      d.type_params = type_params();
      expect("(");
      d.params = typed_names_until(")");
      expect(")");
      if (accept("returns")) {
        expect("(");
        d.outs = typed_names_until(")");
        expect(")");
      }
      bool bodiless = accept(";");
      while (true) {
        Spec sp;
        if (accept("requires")) {
          sp.kind = Spec::Kind::Requires;
          sp.expr = expr();
        } else if (accept("ensures")) {
          sp.kind = Spec::Kind::Ensures;
          sp.expr = expr();
        } else if (accept("modifies")) {
          sp.kind = Spec::Kind::Modifies;
          sp.names.push_back(ident());
          while (accept(",")) sp.names.push_back(ident());
        } else {
          break;
        }
        expect(";");
        d.specs.push_back(std::move(sp));
      }
      if (!bodiless) {
        expect("{");
        Body b;
        while (accept("var")) {
          b.locals.push_back(typed_name());
          while (accept(",")) b.locals.push_back(typed_name());
          expect(";");
        }
        while (!is("}")) {
          if (at_end()) fail("unterminated procedure body");
          b.stmts.push_back(stmt());
        }
        expect("}");
        d.body = std::move(b);
      }
    } else {
      fail("expected a declaration but found '" + peek().text + "'");
    }
    return d;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

bool is_keyword(std::string_view s) {
  for (const char* k : kKeywords) {
    if (s == k) return true;
  }
  return false;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !ident_start(s[0]) || is_keyword(s)) return false;
  for (char c : s) {
    if (!ident_char(c)) return false;
  }
  return true;
}

Program parse(std::string_view text) { return Parser(text).program(); }

Expr parse_expr(std::string_view text) { return Parser(text).expression_only(); }

}  // namespace bcv::boogie
