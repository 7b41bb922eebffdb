#pragma once
#include <array>
#include <map>
#include <vector>

#include "magctrl/grid.hpp"

namespace magctrl {

inline constexpr int kPolyDegreeCap = 12;

// Multivariate polynomial, monomial basis, total degree capped.
struct PolyMD {
  int d = 1;
  std::map<std::array<int, 3>, double> c;

  PolyMD() = default;
  explicit PolyMD(int dim);

  void add(const std::array<int, 3>& mono, double coeff);
  PolyMD operator+(const PolyMD& o) const;
  PolyMD operator*(double f) const;
  PolyMD deriv(int axis) const;
  PolyMD mul_var(int axis) const;  // multiply by x_axis
  double evaluate(const std::array<double, 3>& x) const;
  bool empty() const { return c.empty(); }
  int total_degree() const;
  void prune(double eps = 0.0);
};

// phi(x) = constant + <lin, x> + p(x) e^{-|x|^2/2}
struct GaussHermite {
  int d = 1;
  double constant = 0.0;
  std::array<double, 3> lin = {0.0, 0.0, 0.0};
  PolyMD p;

  GaussHermite() = default;
  explicit GaussHermite(int dim) : d(dim), p(dim) {}

  double evaluate(const std::array<double, 3>& x) const;
  GaussHermite operator+(const GaussHermite& o) const;
  GaussHermite operator*(double f) const;
  bool same_shape(const GaussHermite& o, double tol) const;
};

// d/dx_axis phi: the linear slope lands in the constant slot and the
// Gaussian part maps to (d_axis p - x_axis p) e^{-|x|^2/2}.
GaussHermite d_partial(const GaussHermite& phi, int axis);

ScalarField sample_hermite(const Grid& g, const GaussHermite& phi);
std::string hermite_to_expr(const GaussHermite& phi);

// Probabilists' Hermite polynomial He_n as monomial coefficients (monic;
// He_{n+1} = x He_n - n He_{n-1}); exact integers.
std::vector<double> hermite_coeffs(int n);

// One-dimensional monomial -> Hermite basis change (triangular, exact).
std::vector<double> mono_to_hermite(const std::vector<double>& mono);

// Tensor Hermite expansion of p: returns multi-index -> coefficient with
// p(x) = sum_alpha c_alpha prod_a He_{alpha_a}(x_a).
std::map<std::array<int, 3>, double> hermite_expand(const PolyMD& p);

// He_alpha(x) e^{-|x|^2/2} as a GaussHermite (pure Gaussian part).
GaussHermite hermite_mode(int d, const std::array<int, 3>& alpha);

// Parse "poly * G + linear + constant" style closed forms, e.g.
// "(x^2-1)*G + 0.5*x - 1". Polynomial-ring evaluation of the expression
// tree; throws if the expression leaves the class.
GaussHermite parse_hermite(const std::string& expr, int d);

}  // namespace magctrl
