#pragma once
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "magctrl/grid.hpp"

namespace magctrl {

// Frequency vectors are stored canonically: the first nonzero component is
// positive (flipping k negates the sine coefficient and fixes the cosine).
struct FreqKey {
  std::array<int, 3> k = {0, 0, 0};
  bool operator<(const FreqKey& o) const { return k < o.k; }
  bool operator==(const FreqKey& o) const { return k == o.k; }
  bool zero() const { return k[0] == 0 && k[1] == 0 && k[2] == 0; }
  int max_abs() const {
    return std::max({std::abs(k[0]), std::abs(k[1]), std::abs(k[2])});
  }
  int norm2() const { return k[0] * k[0] + k[1] * k[1] + k[2] * k[2]; }
};

// canonical representative; flipped reports whether k was negated
FreqKey canonical_freq(const std::array<int, 3>& k, bool& flipped);

// exact small rational, for the coefficient-level regression tests
struct Rat {
  std::int64_t n = 0, d = 1;
  Rat() = default;
  Rat(std::int64_t num) : n(num) {}
  Rat(std::int64_t num, std::int64_t den) : n(num), d(den) { reduce(); }
  void reduce() {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    if (n == 0) d = 1;
  }
  Rat operator+(const Rat& o) const { return Rat(n * o.d + o.n * d, d * o.d); }
  Rat operator-(const Rat& o) const { return Rat(n * o.d - o.n * d, d * o.d); }
  Rat operator-() const { return Rat(-n, d); }
  Rat operator*(const Rat& o) const { return Rat(n * o.n, d * o.d); }
  bool operator==(const Rat& o) const { return n == o.n && d == o.d; }
  bool is_zero() const { return n == 0; }
  double to_double() const { return static_cast<double>(n) / static_cast<double>(d); }
};

inline Rat half_of(const Rat& r) { return Rat(r.n, r.d * 2); }
inline double half_of(double v) { return 0.5 * v; }
inline bool coeff_zero(const Rat& r) { return r.is_zero(); }
inline bool coeff_zero(double v) { return v == 0.0; }
inline double coeff_value(const Rat& r) { return r.to_double(); }
inline double coeff_value(double v) { return v; }

inline constexpr int kTrigFreqCap = 16;

// Finite combination  c_0 + sum_k [ s_k sin<k,x> + c_k cos<k,x> ]  on the
// torus, closed under derivative, product, and |grad . |^2.
template <class C>
struct TrigPolyT {
  int d = 1;
  std::map<FreqKey, std::pair<C, C>> terms;  // (sin, cos); k = 0 keeps only cos

  TrigPolyT() = default;
  explicit TrigPolyT(int dim) : d(dim) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("trigpoly: d must be 1..3");
  }

  void add_term(const std::array<int, 3>& k, C s, C c) {
    bool flipped = false;
    const FreqKey key = canonical_freq(k, flipped);
    if (key.max_abs() > kTrigFreqCap)
      throw std::invalid_argument("trigpoly: frequency cap exceeded");
    if (flipped) s = -s;
    auto& slot = terms[key];
    slot.first = slot.first + s;
    slot.second = slot.second + c;
    if (key.zero()) slot.first = C{};  // sin 0 = 0
    if (coeff_zero(slot.first) && coeff_zero(slot.second)) terms.erase(key);
  }

  void add_const(C c) { add_term({0, 0, 0}, C{}, c); }

  C constant() const {
    auto it = terms.find(FreqKey{});
    return it == terms.end() ? C{} : it->second.second;
  }

  TrigPolyT operator+(const TrigPolyT& o) const {
    check_dim(o);
    TrigPolyT r = *this;
    for (const auto& [k, sc] : o.terms) {
      auto& slot = r.terms[k];
      slot.first = slot.first + sc.first;
      slot.second = slot.second + sc.second;
      if (coeff_zero(slot.first) && coeff_zero(slot.second)) r.terms.erase(k);
    }
    return r;
  }
  TrigPolyT operator-(const TrigPolyT& o) const { return *this + (o * C(-1)); }
  TrigPolyT operator*(C f) const {
    TrigPolyT r(d);
    if (coeff_zero(f)) return r;
    for (const auto& [k, sc] : terms)
      r.terms[k] = {sc.first * f, sc.second * f};
    return r;
  }

  TrigPolyT deriv(int axis) const {
    TrigPolyT r(d);
    for (const auto& [key, sc] : terms) {
      const int ka = key.k[static_cast<std::size_t>(axis)];
      if (ka == 0) continue;
      // d/dx_a sin = k_a cos, d/dx_a cos = -k_a sin
      r.add_term(key.k, sc.second * C(-ka), sc.first * C(ka));
    }
    return r;
  }

  TrigPolyT operator*(const TrigPolyT& o) const {
    check_dim(o);
    TrigPolyT r(d);
    for (const auto& [ka, va] : terms)
      for (const auto& [kb, vb] : o.terms) {
        std::array<int, 3> sum{}, dif{};
        for (int a = 0; a < 3; ++a) {
          sum[static_cast<std::size_t>(a)] = ka.k[static_cast<std::size_t>(a)] + kb.k[static_cast<std::size_t>(a)];
          dif[static_cast<std::size_t>(a)] = ka.k[static_cast<std::size_t>(a)] - kb.k[static_cast<std::size_t>(a)];
        }
        const C ss = half_of(va.first * vb.first);
        const C sc = half_of(va.first * vb.second);
        const C cs = half_of(va.second * vb.first);
        const C cc = half_of(va.second * vb.second);
        // sin a sin b = (cos(a-b) - cos(a+b))/2
        r.add_term(dif, C{}, ss);
        r.add_term(sum, C{}, -ss);
        // sin a cos b = (sin(a+b) + sin(a-b))/2
        r.add_term(sum, sc, C{});
        r.add_term(dif, sc, C{});
        // cos a sin b = (sin(a+b) - sin(a-b))/2
        r.add_term(sum, cs, C{});
        r.add_term(dif, -cs, C{});
        // cos a cos b = (cos(a-b) + cos(a+b))/2
        r.add_term(dif, C{}, cc);
        r.add_term(sum, C{}, cc);
      }
    return r;
  }

  bool operator==(const TrigPolyT& o) const { return d == o.d && terms == o.terms; }
  bool empty() const { return terms.empty(); }

  double evaluate(const std::array<double, 3>& x) const {
    double val = 0.0;
    for (const auto& [key, sc] : terms) {
      double arg = 0.0;
      for (int a = 0; a < d; ++a) arg += key.k[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
      val += coeff_value(sc.first) * std::sin(arg) + coeff_value(sc.second) * std::cos(arg);
    }
    return val;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [key, sc] : terms)
      m = std::max({m, std::abs(coeff_value(sc.first)), std::abs(coeff_value(sc.second))});
    return m;
  }

  int max_freq() const {
    int m = 0;
    for (const auto& [key, sc] : terms) m = std::max(m, key.max_abs());
    return m;
  }

  void prune(double eps) {
    for (auto it = terms.begin(); it != terms.end();) {
      if (std::abs(coeff_value(it->second.first)) <= eps &&
          std::abs(coeff_value(it->second.second)) <= eps)
        it = terms.erase(it);
      else
        ++it;
    }
  }

 private:
  void check_dim(const TrigPolyT& o) const {
    if (d != o.d) throw std::invalid_argument("trigpoly: dimension mismatch");
  }
};

using TrigPoly = TrigPolyT<double>;
using TrigPolyQ = TrigPolyT<Rat>;

// |grad phi|^2, exact product-to-sum expansion
template <class C>
TrigPolyT<C> grad_square(const TrigPolyT<C>& phi) {
  TrigPolyT<C> out(phi.d);
  for (int a = 0; a < phi.d; ++a) {
    const TrigPolyT<C> da = phi.deriv(a);
    out = out + da * da;
  }
  return out;
}

// <grad phi, grad chi> via polarization
template <class C>
TrigPolyT<C> bracket(const TrigPolyT<C>& phi, const TrigPolyT<C>& chi) {
  TrigPolyT<C> s = grad_square(phi + chi) - grad_square(phi) - grad_square(chi);
  return s * half_of(C(1));
}

ScalarField sample_trig(const Grid& g, const TrigPoly& p);
// closed form usable by the expression parser
std::string trig_to_expr(const TrigPoly& p);
// FFT projection of a sampled field onto the trig family; exact for
// band-limited input. Coefficients below drop_tol (relative) are dropped.
TrigPoly project_trig(const ScalarField& f, double drop_tol = 1e-12);
// parse a closed-form expression by sampling and projecting
TrigPoly parse_trig(const std::string& expr, int d);
TrigPolyQ to_rational(const TrigPoly& p, std::int64_t max_den = 1000000);
TrigPoly to_double(const TrigPolyQ& p);

}  // namespace magctrl
