#pragma once

// Closed-form complex functions of one variable z: parsing, printing and
// evaluation with derivatives up to third order via jet arithmetic.
//
// Grammar (precedence ^  >  unary -  >  * /  >  + -, ^ right-associative):
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?
//   atom   := NUMBER | 'z' | 'i' | 'pi' | 'e' | FUNC '(' expr ')' | '(' expr ')'
//   FUNC   := exp | log | sin | cos | tan | sinh | cosh | sqrt

#include <cctype>
#include <charconv>
#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "bltk/jet.hpp"

namespace bltk {

enum class NodeKind { Literal, ConstI, ConstPi, ConstE, Var, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Builtin { Exp, Log, Sin, Cos, Tan, Sinh, Cosh, Sqrt };

struct ExprNode {
  NodeKind kind;
  double literal = 0.0;  // Literal
  Builtin fn = Builtin::Exp;
  std::shared_ptr<const ExprNode> a, b;
};

// Immutable expression tree; cheap to copy, safe to share across threads.
class Expr {
 public:
  Expr() = default;
  explicit Expr(std::shared_ptr<const ExprNode> r) : root_(std::move(r)) {}
  const ExprNode* get() const { return root_.get(); }
  bool empty() const { return !root_; }

  static Expr literal(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Literal;
    n->literal = v;
    return Expr(n);
  }
  static Expr var() { return make(NodeKind::Var, Expr(), Expr()); }
  static Expr constant_i() { return make(NodeKind::ConstI, Expr(), Expr()); }
  static Expr make(NodeKind k, Expr a, Expr b) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->a = a.root_;
    n->b = b.root_;
    return Expr(n);
  }
  static Expr call(Builtin f, Expr a) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Call;
    n->fn = f;
    n->a = a.root_;
    return Expr(n);
  }

 private:
  std::shared_ptr<const ExprNode> root_;
};

inline Expr operator+(Expr a, Expr b) { return Expr::make(NodeKind::Add, a, b); }
inline Expr operator-(Expr a, Expr b) { return Expr::make(NodeKind::Sub, a, b); }
inline Expr operator*(Expr a, Expr b) { return Expr::make(NodeKind::Mul, a, b); }
inline Expr operator/(Expr a, Expr b) { return Expr::make(NodeKind::Div, a, b); }
inline Expr operator-(Expr a) { return Expr::make(NodeKind::Neg, a, Expr()); }

namespace detail {

struct Parser {
  const std::string& src;
  std::size_t pos = 0;

  explicit Parser(const std::string& s) : src(s) {}

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      skip_ws();
      if (eat('+')) lhs = lhs + parse_term();
      else if (eat('-')) lhs = lhs - parse_term();
      else return lhs;
    }
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    for (;;) {
      skip_ws();
      if (eat('*')) lhs = lhs * parse_unary();
      else if (eat('/')) lhs = lhs / parse_unary();
      else return lhs;
    }
  }

  Expr parse_unary() {
    skip_ws();
    if (eat('-')) return -parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    skip_ws();
    if (eat('^')) return Expr::make(NodeKind::Pow, base, parse_unary());
    return base;
  }

  Expr parse_atom() {
    skip_ws();
    if (pos >= src.size()) fail("unexpected end of input");
    char c = src[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    if (eat('(')) {
      Expr e = parse_expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr parse_number() {
    std::size_t start = pos;
    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
    if (pos < src.size() && src[pos] == '.') {
      ++pos;
      while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
    }
    if (pos < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
      std::size_t mark = pos;
      ++pos;
      if (pos < src.size() && (src[pos] == '+' || src[pos] == '-')) ++pos;
      if (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
        while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
      } else {
        pos = mark;  // the 'e' was the Euler constant, not an exponent
      }
    }
    double value = 0.0;
    auto res = std::from_chars(src.data() + start, src.data() + pos, value);
    if (res.ec != std::errc()) {
      pos = start;
      fail("malformed number");
    }
    return Expr::literal(value);
  }

  Expr parse_ident() {
    std::size_t start = pos;
    while (pos < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
      ++pos;
    std::string name = src.substr(start, pos - start);
    if (name == "z") return Expr::var();
    if (name == "i") return Expr::make(NodeKind::ConstI, Expr(), Expr());
    if (name == "pi") return Expr::make(NodeKind::ConstPi, Expr(), Expr());
    if (name == "e") return Expr::make(NodeKind::ConstE, Expr(), Expr());
    Builtin fn;
    if (name == "exp") fn = Builtin::Exp;
    else if (name == "log") fn = Builtin::Log;
    else if (name == "sin") fn = Builtin::Sin;
    else if (name == "cos") fn = Builtin::Cos;
    else if (name == "tan") fn = Builtin::Tan;
    else if (name == "sinh") fn = Builtin::Sinh;
    else if (name == "cosh") fn = Builtin::Cosh;
    else if (name == "sqrt") fn = Builtin::Sqrt;
    else {
      pos = start;
      fail("unknown identifier '" + name + "'");
    }
    if (!eat('(')) fail("expected '(' after function name");
    Expr arg = parse_expr();
    if (!eat(')')) fail("expected ')'");
    return Expr::call(fn, arg);
  }
};

}  // namespace detail

inline Expr parse(const std::string& source) {
  if (source.empty()) throw ParseError("empty expression", 0);
  detail::Parser p(source);
  Expr e = p.parse_expr();
  p.skip_ws();
  if (p.pos != source.size()) p.fail("trailing input");
  return e;
}

namespace detail {

inline const char* builtin_name(Builtin f) {
  switch (f) {
    case Builtin::Exp: return "exp";
    case Builtin::Log: return "log";
    case Builtin::Sin: return "sin";
    case Builtin::Cos: return "cos";
    case Builtin::Tan: return "tan";
    case Builtin::Sinh: return "sinh";
    case Builtin::Cosh: return "cosh";
    case Builtin::Sqrt: return "sqrt";
  }
  return "?";
}

// Precedence levels for printing with minimal parentheses.
inline int prec(NodeKind k) {
  switch (k) {
    case NodeKind::Add:
    case NodeKind::Sub: return 1;
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Neg: return 3;
    case NodeKind::Pow: return 4;
    default: return 5;
  }
}

inline void serialize_rec(const ExprNode* n, std::string& out, int parent_prec, bool right) {
  int p = prec(n->kind);
  bool need = p < parent_prec || (p == parent_prec && right && p != 4) ||
              (p == parent_prec && !right && p == 4);
  auto lit = [&](double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
  };
  if (need) out += '(';
  switch (n->kind) {
    case NodeKind::Literal: lit(n->literal); break;
    case NodeKind::ConstI: out += 'i'; break;
    case NodeKind::ConstPi: out += "pi"; break;
    case NodeKind::ConstE: out += 'e'; break;
    case NodeKind::Var: out += 'z'; break;
    case NodeKind::Neg:
      out += '-';
      serialize_rec(n->a.get(), out, p, true);
      break;
    case NodeKind::Add:
      serialize_rec(n->a.get(), out, p, false);
      out += " + ";
      serialize_rec(n->b.get(), out, p, true);
      break;
    case NodeKind::Sub:
      serialize_rec(n->a.get(), out, p, false);
      out += " - ";
      serialize_rec(n->b.get(), out, p, true);
      break;
    case NodeKind::Mul:
      serialize_rec(n->a.get(), out, p, false);
      out += '*';
      serialize_rec(n->b.get(), out, p, true);
      break;
    case NodeKind::Div:
      serialize_rec(n->a.get(), out, p, false);
      out += '/';
      serialize_rec(n->b.get(), out, p, true);
      break;
    case NodeKind::Pow:
      serialize_rec(n->a.get(), out, p, false);
      out += '^';
      serialize_rec(n->b.get(), out, p, true);
      break;
    case NodeKind::Call:
      out += builtin_name(n->fn);
      out += '(';
      serialize_rec(n->a.get(), out, 0, false);
      out += ')';
      break;
  }
  if (need) out += ')';
}

}  // namespace detail

inline std::string serialize(const Expr& e) {
  std::string out;
  detail::serialize_rec(e.get(), out, 0, false);
  return out;
}

inline bool structurally_equal(const ExprNode* a, const ExprNode* b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case NodeKind::Literal: return a->literal == b->literal;
    case NodeKind::Call:
      if (a->fn != b->fn) return false;
      return structurally_equal(a->a.get(), b->a.get());
    default:
      return structurally_equal(a->a.get(), b->a.get()) &&
             structurally_equal(a->b.get(), b->b.get());
  }
}

inline bool structurally_equal(const Expr& a, const Expr& b) {
  return structurally_equal(a.get(), b.get());
}

inline bool depends_on_z(const ExprNode* n) {
  if (!n) return false;
  if (n->kind == NodeKind::Var) return true;
  return depends_on_z(n->a.get()) || depends_on_z(n->b.get());
}

namespace detail {

inline Jet eval_node(const ExprNode* n, Cplx z, int order);

inline Jet eval_pow(const ExprNode* n, Cplx z, int order) {
  // Constant exponents that are (near-)integers use repeated
  // multiplication; everything else goes through exp(c log w).
  if (!depends_on_z(n->b.get())) {
    Cplx c = eval_node(n->b.get(), z, 0).value();
    double rn = std::round(c.real());
    if (c.imag() == 0.0 && std::abs(c.real() - rn) == 0.0 && std::fabs(rn) <= 64.0) {
      return jet_pow_int(eval_node(n->a.get(), z, order), static_cast<long>(rn));
    }
    return jet_exp(Jet::constant(c, order) * jet_log(eval_node(n->a.get(), z, order)));
  }
  return jet_pow(eval_node(n->a.get(), z, order), eval_node(n->b.get(), z, order));
}

inline Jet eval_node(const ExprNode* n, Cplx z, int order) {
  switch (n->kind) {
    case NodeKind::Literal: return Jet::constant(n->literal, order);
    case NodeKind::ConstI: return Jet::constant(Cplx(0, 1), order);
    case NodeKind::ConstPi: return Jet::constant(3.141592653589793238462643383279502884, order);
    case NodeKind::ConstE: return Jet::constant(2.718281828459045235360287471352662498, order);
    case NodeKind::Var: return Jet::variable(z, order);
    case NodeKind::Neg: return -eval_node(n->a.get(), z, order);
    case NodeKind::Add: return eval_node(n->a.get(), z, order) + eval_node(n->b.get(), z, order);
    case NodeKind::Sub: return eval_node(n->a.get(), z, order) - eval_node(n->b.get(), z, order);
    case NodeKind::Mul: return eval_node(n->a.get(), z, order) * eval_node(n->b.get(), z, order);
    case NodeKind::Div: return eval_node(n->a.get(), z, order) / eval_node(n->b.get(), z, order);
    case NodeKind::Pow: return eval_pow(n, z, order);
    case NodeKind::Call: {
      Jet u = eval_node(n->a.get(), z, order);
      switch (n->fn) {
        case Builtin::Exp: return jet_exp(u);
        case Builtin::Log: return jet_log(u);
        case Builtin::Sin: return jet_sin(u);
        case Builtin::Cos: return jet_cos(u);
        case Builtin::Tan: return jet_tan(u);
        case Builtin::Sinh: return jet_sinh(u);
        case Builtin::Cosh: return jet_cosh(u);
        case Builtin::Sqrt: return jet_sqrt(u);
      }
    }
  }
  throw NumericsError("corrupt expression node");
}

}  // namespace detail

inline Jet eval_jet(const Expr& f, Cplx z, int order) {
  if (order < 0 || order > 3) throw PreconditionError("jet order must be 0..3");
  return detail::eval_node(f.get(), z, order);
}

// Type-erased "evaluable with derivatives": either a parsed expression or
// a native evaluator (quadrature-defined functions register through this).
class JetFn {
 public:
  JetFn() = default;
  JetFn(std::function<Jet(Cplx, int)> fn) : fn_(std::move(fn)) {}
  JetFn(const Expr& e)
      : fn_([e](Cplx z, int order) { return eval_jet(e, z, order); }) {}

  Jet jet(Cplx z, int order) const { return fn_(z, order); }
  Cplx operator()(Cplx z) const { return fn_(z, 0).value(); }
  Cplx deriv(Cplx z) const { return fn_(z, 1).d1(); }
  bool empty() const { return !fn_; }

 private:
  std::function<Jet(Cplx, int)> fn_;
};

}  // namespace bltk
