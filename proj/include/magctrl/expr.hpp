#pragma once
#include <array>
#include <memory>
#include <string>
#include <vector>

#include "magctrl/grid.hpp"

namespace magctrl {

// Closed-form scalar expressions over the grid coordinates. Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := unary ('^' factor)?          (right associative)
//   unary  := '-' unary | primary
//   primary:= number | name | name '(' expr ')' | '(' expr ')'
// Names: variables x,y,z (aliases x1,x2,x3), the constant pi, the reserved
// symbol G = exp(-|x|^2/2), and functions sin cos exp sqrt tanh abs log.
struct Expr {
  enum class Kind { Num, Var, Gauss, Add, Sub, Mul, Div, Pow, Neg, Call };
  Kind kind = Kind::Num;
  double num = 0.0;
  int var = 0;           // Var: axis 0..2
  std::string fn;        // Call: function name
  std::shared_ptr<const Expr> a, b;

  double eval(const std::array<double, 3>& x) const;
};

using ExprPtr = std::shared_ptr<const Expr>;

// Throws std::invalid_argument with a position marker on malformed input.
ExprPtr parse_expr(const std::string& text);

ScalarField sample_expr(const Grid& g, const std::string& text);
ScalarField sample_expr(const Grid& g, const ExprPtr& e);

}  // namespace magctrl
