#include "magctrl/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "magctrl/parallel.hpp"
#include "magctrl/state.hpp"

namespace magctrl {

double Expr::eval(const std::array<double, 3>& x) const {
  switch (kind) {
    case Kind::Num:
      return num;
    case Kind::Var:
      return x[static_cast<std::size_t>(var)];
    case Kind::Gauss:
      return std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
    case Kind::Add:
      return a->eval(x) + b->eval(x);
    case Kind::Sub:
      return a->eval(x) - b->eval(x);
    case Kind::Mul:
      return a->eval(x) * b->eval(x);
    case Kind::Div:
      return a->eval(x) / b->eval(x);
    case Kind::Pow:
      return std::pow(a->eval(x), b->eval(x));
    case Kind::Neg:
      return -a->eval(x);
    case Kind::Call: {
      const double v = a->eval(x);
      if (fn == "sin") return std::sin(v);
      if (fn == "cos") return std::cos(v);
      if (fn == "exp") return std::exp(v);
      if (fn == "sqrt") return std::sqrt(v);
      if (fn == "tanh") return std::tanh(v);
      if (fn == "abs") return std::abs(v);
      if (fn == "log") return std::log(v);
      throw std::logic_error("expr: unknown function " + fn);
    }
  }
  return 0.0;
}

namespace {

struct Parser {
  const std::string& s;
  std::size_t pos = 0;

  explicit Parser(const std::string& text) : s(text) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("expr: " + msg + " at position " +
                                std::to_string(pos) + " in \"" + s + "\"");
  }
  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  char peek() {
    skip();
    return pos < s.size() ? s[pos] : '\0';
  }

  static ExprPtr num(double v) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Num;
    e->num = v;
    return e;
  }
  static ExprPtr binary(Expr::Kind k, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
  }

  ExprPtr parse() {
    ExprPtr e = expr();
    skip();
    if (pos != s.size()) fail("trailing input");
    return e;
  }

  ExprPtr expr() {
    ExprPtr e = term();
    for (;;) {
      if (eat('+'))
        e = binary(Expr::Kind::Add, e, term());
      else if (eat('-'))
        e = binary(Expr::Kind::Sub, e, term());
      else
        return e;
    }
  }

  ExprPtr term() {
    ExprPtr e = factor();
    for (;;) {
      if (eat('*'))
        e = binary(Expr::Kind::Mul, e, factor());
      else if (eat('/'))
        e = binary(Expr::Kind::Div, e, factor());
      else
        return e;
    }
  }

  ExprPtr factor() {
    ExprPtr base = unary();
    if (eat('^')) return binary(Expr::Kind::Pow, base, factor());
    return base;
  }

  ExprPtr unary() {
    if (eat('-')) {
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Neg;
      e->a = unary();
      return e;
    }
    return primary();
  }

  ExprPtr primary() {
    skip();
    if (pos >= s.size()) fail("unexpected end of input");
    const char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      char* end = nullptr;
      const double v = std::strtod(s.c_str() + pos, &end);
      if (end == s.c_str() + pos) fail("bad number");
      pos = static_cast<std::size_t>(end - s.c_str());
      return num(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos;
      while (pos < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
        ++pos;
      const std::string name = s.substr(start, pos - start);
      if (name == "pi") return num(3.141592653589793238);
      if (name == "G") {
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::Gauss;
        return e;
      }
      int axis = -1;
      if (name == "x" || name == "x1") axis = 0;
      if (name == "y" || name == "x2") axis = 1;
      if (name == "z" || name == "x3") axis = 2;
      if (axis >= 0) {
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::Var;
        e->var = axis;
        return e;
      }
      static const char* fns[] = {"sin", "cos", "exp", "sqrt", "tanh", "abs", "log"};
      for (const char* fn : fns) {
        if (name == fn) {
          if (!eat('(')) fail("expected ( after " + name);
          ExprPtr arg = expr();
          if (!eat(')')) fail("expected )");
          auto e = std::make_shared<Expr>();
          e->kind = Expr::Kind::Call;
          e->fn = name;
          e->a = std::move(arg);
          return e;
        }
      }
      pos = start;
      fail("unknown name \"" + name + "\"");
    }
    if (c == '(') {
      ++pos;
      ExprPtr e = expr();
      if (!eat(')')) fail("expected )");
      return e;
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

ExprPtr parse_expr(const std::string& text) { return Parser(text).parse(); }

ScalarField sample_expr(const Grid& g, const ExprPtr& e) {
  ScalarField out(g);
  parallel_for(g.size(), [&](std::int64_t i) {
    std::array<double, 3> x{};
    g.point(i, x);
    out.v[static_cast<std::size_t>(i)] = e->eval(x);
  });
  return out;
}

ScalarField sample_expr(const Grid& g, const std::string& text) {
  return sample_expr(g, parse_expr(text));
}

}  // namespace magctrl
