#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "holoconf/jet.hpp"
#include "holoconf/types.hpp"

namespace holoconf {

// ---------------------------------------------------------------------------
// Expression AST
//
// Grammar (EBNF, see docs/grammar.md):
//   expr    = term , { ( "+" | "-" ) , term } ;
//   term    = unary , { ( "*" | "/" ) , unary } ;
//   unary   = "-" , unary | power ;
//   power   = atom , { "^" , [ "-" ] , integer } ;
//   atom    = number , [ "i" ] | "i" | variable | func , "(" , expr , ")"
//           | "(" , expr , ")" ;
//   variable = "z" , integer ;                      (* z1 .. zn *)
//   func     = "exp" | "log" | "sin" | "cos" | "sqrt" ;
//
// Precedence: ^  >  unary -  >  * /  >  + -, binary operators left-assoc.
// Only integer exponents are allowed in ^; general powers via exp(log(.)).
// ---------------------------------------------------------------------------

enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Func };
enum class Fn { Exp, Log, Sin, Cos, Sqrt };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  Op op = Op::Const;
  cplx cval{0.0};
  int var = 0;
  int ipow = 0;
  Fn fn = Fn::Exp;
  ExprPtr a, b;
};

namespace ast {

inline ExprPtr constant(cplx c) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Const;
  e->cval = c;
  return e;
}
inline ExprPtr var(int i) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Var;
  e->var = i;
  return e;
}
inline ExprPtr binary(Op op, ExprPtr a, ExprPtr b) {
  // Fold constant subtrees so complex literals round-trip structurally.
  if (a->op == Op::Const && b->op == Op::Const) {
    switch (op) {
      case Op::Add: return constant(a->cval + b->cval);
      case Op::Sub: return constant(a->cval - b->cval);
      case Op::Mul: return constant(a->cval * b->cval);
      default: break;
    }
  }
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}
inline ExprPtr add(ExprPtr a, ExprPtr b) { return binary(Op::Add, std::move(a), std::move(b)); }
inline ExprPtr sub(ExprPtr a, ExprPtr b) { return binary(Op::Sub, std::move(a), std::move(b)); }
inline ExprPtr mul(ExprPtr a, ExprPtr b) { return binary(Op::Mul, std::move(a), std::move(b)); }
inline ExprPtr div(ExprPtr a, ExprPtr b) { return binary(Op::Div, std::move(a), std::move(b)); }
inline ExprPtr neg(ExprPtr a) {
  if (a->op == Op::Const) return constant(-a->cval);
  auto e = std::make_shared<Expr>();
  e->op = Op::Neg;
  e->a = std::move(a);
  return e;
}
inline ExprPtr powi(ExprPtr a, int k) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Pow;
  e->a = std::move(a);
  e->ipow = k;
  return e;
}
inline ExprPtr call(Fn f, ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Func;
  e->fn = f;
  e->a = std::move(a);
  return e;
}

inline bool equal(const ExprPtr& x, const ExprPtr& y) {
  if (x->op != y->op) return false;
  switch (x->op) {
    case Op::Const: return x->cval == y->cval;
    case Op::Var: return x->var == y->var;
    case Op::Neg: return equal(x->a, y->a);
    case Op::Pow: return x->ipow == y->ipow && equal(x->a, y->a);
    case Op::Func: return x->fn == y->fn && equal(x->a, y->a);
    default: return equal(x->a, y->a) && equal(x->b, y->b);
  }
}

}  // namespace ast

/// A parsed holomorphic scalar expression over variables z1..zn.
/// Immutable after construction; evaluation is pure.
struct HoloExpr {
  ExprPtr root;
  int n = 0;
};

// ------------------------------ parser ------------------------------------

namespace detail {

class Parser {
 public:
  Parser(const std::string& src, int n) : s_(src), n_(n) {}

  ExprPtr parse() {
    skip_ws();
    if (pos_ >= s_.size()) throw parse_error("empty expression", 0);
    ExprPtr e = parse_expr();
    skip_ws();
    if (pos_ != s_.size()) throw parse_error("unexpected trailing input", pos_);
    return e;
  }

 private:
  ExprPtr parse_expr() {
    ExprPtr e = parse_term();
    for (;;) {
      skip_ws();
      if (accept('+'))
        e = ast::add(e, parse_term());
      else if (accept('-'))
        e = ast::sub(e, parse_term());
      else
        return e;
    }
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_unary();
    for (;;) {
      skip_ws();
      if (accept('*'))
        e = ast::mul(e, parse_unary());
      else if (accept('/'))
        e = ast::div(e, parse_unary());
      else
        return e;
    }
  }

  ExprPtr parse_unary() {
    skip_ws();
    if (accept('-')) return ast::neg(parse_unary());
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr e = parse_atom();
    for (;;) {
      skip_ws();
      if (!accept('^')) return e;
      skip_ws();
      bool negexp = accept('-');
      std::size_t at = pos_;
      if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
        throw parse_error("integer exponent expected after '^'", at);
      long k = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
        k = k * 10 + (s_[pos_++] - '0');
      e = ast::powi(e, static_cast<int>(negexp ? -k : k));
    }
  }

  ExprPtr parse_atom() {
    skip_ws();
    if (pos_ >= s_.size()) throw parse_error("unexpected end of input", pos_);
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      ExprPtr e = parse_expr();
      skip_ws();
      if (!accept(')')) throw parse_error("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    throw parse_error(std::string("unexpected character '") + c + "'", pos_);
  }

  ExprPtr parse_number() {
    std::size_t at = pos_;
    while (pos_ < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
      ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      } else {
        pos_ = save;  // not an exponent, e.g. "2*exp(z1)"
      }
    }
    double v = 0.0;
    const std::string tok = s_.substr(at, pos_ - at);
    std::size_t used = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw parse_error("malformed number", at);
    }
    if (used != tok.size()) throw parse_error("malformed number", at);
    if (pos_ < s_.size() && s_[pos_] == 'i' && !ident_continues(pos_ + 1)) {
      ++pos_;
      return ast::constant(cplx(0.0, v));
    }
    return ast::constant(cplx(v, 0.0));
  }

  ExprPtr parse_ident() {
    std::size_t at = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    std::string id = s_.substr(at, pos_ - at);
    if (id == "i") return ast::constant(cplx(0.0, 1.0));
    if (id.size() >= 2 && id[0] == 'z') {
      bool digits = true;
      for (std::size_t p = 1; p < id.size(); ++p)
        if (!std::isdigit(static_cast<unsigned char>(id[p]))) digits = false;
      if (digits) {
        int idx = std::stoi(id.substr(1));
        if (idx < 1 || idx > n_)
          throw parse_error("variable " + id + " out of range for chart dimension " +
                                std::to_string(n_),
                            at);
        return ast::var(idx - 1);
      }
    }
    Fn f;
    if (id == "exp")
      f = Fn::Exp;
    else if (id == "log")
      f = Fn::Log;
    else if (id == "sin")
      f = Fn::Sin;
    else if (id == "cos")
      f = Fn::Cos;
    else if (id == "sqrt")
      f = Fn::Sqrt;
    else
      throw parse_error("unknown identifier '" + id + "'", at);
    skip_ws();
    if (!accept('(')) throw parse_error("expected '(' after " + id, pos_);
    ExprPtr arg = parse_expr();
    skip_ws();
    if (!accept(')')) throw parse_error("expected ')'", pos_);
    return ast::call(f, arg);
  }

  bool ident_continues(std::size_t p) const {
    return p < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[p])) || s_[p] == '_');
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  const std::string& s_;
  int n_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline HoloExpr parse(const std::string& src, int n) {
  if (n < 1) throw parse_error("chart dimension must be >= 1", 0);
  detail::Parser p(src, n);
  return HoloExpr{p.parse(), n};
}

// ------------------------------ printer -----------------------------------

namespace detail {

inline std::string fmt_double(double v) {
  if (v == static_cast<long long>(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
    return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string fmt_const(cplx c) {
  if (c.imag() == 0.0) return fmt_double(c.real());
  if (c.real() == 0.0) return fmt_double(c.imag()) + "i";
  std::string im = fmt_double(std::abs(c.imag())) + "i";
  return "(" + fmt_double(c.real()) + (c.imag() < 0 ? "-" : "+") + im + ")";
}

// Precedence levels: 1 add, 2 mul, 3 unary-, 4 pow, 5 atom.
inline int prec(const Expr& e) {
  switch (e.op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    case Op::Const: return e.cval.imag() == 0.0 && e.cval.real() < 0.0 ? 3 : 5;
    default: return 5;
  }
}

inline void print_rec(const Expr& e, int ctx, std::string& out) {
  const int p = prec(e);
  const bool paren = p < ctx;
  if (paren) out += '(';
  switch (e.op) {
    case Op::Const: out += fmt_const(e.cval); break;
    case Op::Var: out += "z" + std::to_string(e.var + 1); break;
    case Op::Add:
      print_rec(*e.a, 1, out);
      out += " + ";
      print_rec(*e.b, 2, out);
      break;
    case Op::Sub:
      print_rec(*e.a, 1, out);
      out += " - ";
      print_rec(*e.b, 2, out);
      break;
    case Op::Mul:
      print_rec(*e.a, 2, out);
      out += "*";
      print_rec(*e.b, 3, out);
      break;
    case Op::Div:
      print_rec(*e.a, 2, out);
      out += "/";
      print_rec(*e.b, 3, out);
      break;
    case Op::Neg:
      out += "-";
      print_rec(*e.a, 3, out);
      break;
    case Op::Pow:
      print_rec(*e.a, 5, out);
      out += "^";
      if (e.ipow < 0) out += "-";
      out += std::to_string(std::abs(e.ipow));
      break;
    case Op::Func: {
      const char* name = "";
      switch (e.fn) {
        case Fn::Exp: name = "exp"; break;
        case Fn::Log: name = "log"; break;
        case Fn::Sin: name = "sin"; break;
        case Fn::Cos: name = "cos"; break;
        case Fn::Sqrt: name = "sqrt"; break;
      }
      out += name;
      out += "(";
      print_rec(*e.a, 1, out);
      out += ")";
      break;
    }
  }
  if (paren) out += ')';
}

}  // namespace detail

inline std::string print(const HoloExpr& e) {
  std::string out;
  detail::print_rec(*e.root, 1, out);
  return out;
}

// ------------------------------ evaluation --------------------------------

namespace detail {

inline Jet eval_rec(const Expr& e, const CVec& p, int order) {
  const int n = static_cast<int>(p.size());
  switch (e.op) {
    case Op::Const: return Jet::constant(e.cval, n, order);
    case Op::Var: return Jet::variable(e.var, p[static_cast<std::size_t>(e.var)], n, order);
    case Op::Add: return eval_rec(*e.a, p, order) + eval_rec(*e.b, p, order);
    case Op::Sub: return eval_rec(*e.a, p, order) - eval_rec(*e.b, p, order);
    case Op::Mul: return eval_rec(*e.a, p, order) * eval_rec(*e.b, p, order);
    case Op::Div: return eval_rec(*e.a, p, order) / eval_rec(*e.b, p, order);
    case Op::Neg: return -eval_rec(*e.a, p, order);
    case Op::Pow: {
      Jet base = eval_rec(*e.a, p, order);
      if (e.ipow < 0 && base.value == cplx(0.0)) throw eval_error("division by zero in power");
      return jet_powi(base, e.ipow);
    }
    case Op::Func: {
      Jet u = eval_rec(*e.a, p, order);
      switch (e.fn) {
        case Fn::Exp: return jet_exp(u);
        case Fn::Log: return jet_log(u);
        case Fn::Sin: return jet_sin(u);
        case Fn::Cos: return jet_cos(u);
        case Fn::Sqrt: return jet_sqrt(u);
      }
    }
  }
  throw eval_error("corrupt expression node");
}

}  // namespace detail

/// Value and holomorphic partial derivatives at p, to `order` (default 3),
/// by jet propagation.
inline Jet eval_jet(const HoloExpr& e, const CVec& p, int order = 3) {
  if (static_cast<int>(p.size()) != e.n) throw eval_error("point dimension mismatch");
  return detail::eval_rec(*e.root, p, order);
}

inline cplx eval_value(const HoloExpr& e, const CVec& p) { return eval_jet(e, p, 0).value; }

// ------------------------------ FD oracle ---------------------------------

/// Independent derivative oracle: finite differences at complex nodes
/// (m-th roots of unity), order-k derivative in one direction from
/// k!/(m h^k) sum_j f(p + h w^j e_d) w^{-jk}. Truncation is O(h^{m-k}) for
/// holomorphic f, so the stencil stays accurate at moderate steps; the step
/// is widened for higher k to balance roundoff against truncation.
inline Jet fd_oracle_jet(const HoloExpr& e, const CVec& p, double step) {
  if (step < 1e-6 || step > 1e-2) throw precondition_error("fd step outside [1e-6, 1e-2]");
  const int n = e.n;
  constexpr int m = 8;
  Jet out(n, 3);
  out.value = eval_value(e, p);

  cplx w[m];
  for (int j = 0; j < m; ++j)
    w[j] = std::exp(cplx(0.0, 2.0 * M_PI * j / m));

  // mult[d] = derivative multiplicity per direction; total <= 3.
  auto stencil = [&](const std::vector<int>& dirs, const std::vector<int>& mult) -> cplx {
    const int nd = static_cast<int>(dirs.size());
    int total = 0;
    for (int q : mult) total += q;
    const double h = total == 1 ? step : (total == 2 ? std::pow(step, 0.75) : std::sqrt(step));
    cplx acc = 0.0;
    std::vector<int> j(static_cast<std::size_t>(nd), 0);
    for (;;) {
      CVec q = p;
      cplx weight = 1.0;
      for (int d = 0; d < nd; ++d) {
        q[static_cast<std::size_t>(dirs[static_cast<std::size_t>(d)])] +=
            h * w[j[static_cast<std::size_t>(d)]];
        weight *= std::conj(w[(j[static_cast<std::size_t>(d)] *
                               mult[static_cast<std::size_t>(d)]) % m]);
      }
      acc += weight * eval_value(e, q);
      int d = 0;
      while (d < nd && ++j[static_cast<std::size_t>(d)] == m) {
        j[static_cast<std::size_t>(d)] = 0;
        ++d;
      }
      if (d == nd) break;
    }
    double scale = 1.0;
    for (int d = 0; d < nd; ++d) {
      double fact = 1.0;
      for (int q = 1; q <= mult[static_cast<std::size_t>(d)]; ++q) fact *= q;
      scale *= fact / (m * std::pow(h, mult[static_cast<std::size_t>(d)]));
    }
    return acc * scale;
  };

  auto derive = [&](std::vector<int> ix) -> cplx {
    std::vector<int> dirs, mult;
    for (int d : ix) {
      bool found = false;
      for (std::size_t q = 0; q < dirs.size(); ++q)
        if (dirs[q] == d) {
          ++mult[q];
          found = true;
        }
      if (!found) {
        dirs.push_back(d);
        mult.push_back(1);
      }
    }
    return stencil(dirs, mult);
  };

  for (int i = 0; i < n; ++i) out.ref(1, {i, 0, 0, 0}) = derive({i});
  for (int i = 0; i < n; ++i)
    for (int j2 = 0; j2 < n; ++j2) out.ref(2, {i, j2, 0, 0}) = derive({i, j2});
  for (int i = 0; i < n; ++i)
    for (int j2 = 0; j2 < n; ++j2)
      for (int k = 0; k < n; ++k) out.ref(3, {i, j2, k, 0}) = derive({i, j2, k});
  return out;
}

}  // namespace holoconf
