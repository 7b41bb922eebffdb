#include "magctrl/hermite.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "magctrl/expr.hpp"
#include "magctrl/parallel.hpp"

namespace magctrl {

PolyMD::PolyMD(int dim) : d(dim) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("poly: d must be 1..3");
}

void PolyMD::add(const std::array<int, 3>& mono, double coeff) {
  if (coeff == 0.0) return;
  int deg = 0;
  for (int a = 0; a < 3; ++a) {
    if (mono[static_cast<std::size_t>(a)] < 0)
      throw std::invalid_argument("poly: negative exponent");
    if (a >= d && mono[static_cast<std::size_t>(a)] != 0)
      throw std::invalid_argument("poly: exponent beyond dimension");
    deg += mono[static_cast<std::size_t>(a)];
  }
  if (deg > kPolyDegreeCap) throw std::invalid_argument("poly: degree cap exceeded");
  auto& slot = c[mono];
  slot += coeff;
  if (slot == 0.0) c.erase(mono);
}

PolyMD PolyMD::operator+(const PolyMD& o) const {
  if (d != o.d) throw std::invalid_argument("poly: dimension mismatch");
  PolyMD r = *this;
  for (const auto& [m, v] : o.c) r.add(m, v);
  return r;
}

PolyMD PolyMD::operator*(double f) const {
  PolyMD r(d);
  if (f == 0.0) return r;
  for (const auto& [m, v] : c) r.c[m] = v * f;
  return r;
}

PolyMD PolyMD::deriv(int axis) const {
  PolyMD r(d);
  for (const auto& [m, v] : c) {
    const int e = m[static_cast<std::size_t>(axis)];
    if (e == 0) continue;
    std::array<int, 3> mm = m;
    --mm[static_cast<std::size_t>(axis)];
    r.add(mm, v * e);
  }
  return r;
}

PolyMD PolyMD::mul_var(int axis) const {
  PolyMD r(d);
  for (const auto& [m, v] : c) {
    std::array<int, 3> mm = m;
    ++mm[static_cast<std::size_t>(axis)];
    r.add(mm, v);
  }
  return r;
}

double PolyMD::evaluate(const std::array<double, 3>& x) const {
  double val = 0.0;
  for (const auto& [m, v] : c) {
    double t = v;
    for (int a = 0; a < d; ++a)
      for (int e = 0; e < m[static_cast<std::size_t>(a)]; ++e) t *= x[static_cast<std::size_t>(a)];
    val += t;
  }
  return val;
}

int PolyMD::total_degree() const {
  int deg = 0;
  for (const auto& [m, v] : c)
    deg = std::max(deg, m[0] + m[1] + m[2]);
  return deg;
}

void PolyMD::prune(double eps) {
  for (auto it = c.begin(); it != c.end();)
    it = std::abs(it->second) <= eps ? c.erase(it) : std::next(it);
}

double GaussHermite::evaluate(const std::array<double, 3>& x) const {
  double val = constant;
  for (int a = 0; a < d; ++a) val += lin[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
  if (!p.empty()) {
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) r2 += x[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
    val += p.evaluate(x) * std::exp(-0.5 * r2);
  }
  return val;
}

GaussHermite GaussHermite::operator+(const GaussHermite& o) const {
  if (d != o.d) throw std::invalid_argument("hermite: dimension mismatch");
  GaussHermite r = *this;
  r.constant += o.constant;
  for (int a = 0; a < d; ++a) r.lin[static_cast<std::size_t>(a)] += o.lin[static_cast<std::size_t>(a)];
  r.p = r.p + o.p;
  return r;
}

GaussHermite GaussHermite::operator*(double f) const {
  GaussHermite r = *this;
  r.constant *= f;
  for (int a = 0; a < d; ++a) r.lin[static_cast<std::size_t>(a)] *= f;
  r.p = r.p * f;
  return r;
}

bool GaussHermite::same_shape(const GaussHermite& o, double tol) const {
  if (d != o.d) return false;
  if (std::abs(constant - o.constant) > tol) return false;
  for (int a = 0; a < d; ++a)
    if (std::abs(lin[static_cast<std::size_t>(a)] - o.lin[static_cast<std::size_t>(a)]) > tol) return false;
  PolyMD diff = p + (o.p * -1.0);
  diff.prune(tol);
  return diff.empty();
}

GaussHermite d_partial(const GaussHermite& phi, int axis) {
  if (axis < 0 || axis >= phi.d) throw std::invalid_argument("d_partial: bad axis");
  GaussHermite r(phi.d);
  r.constant = phi.lin[static_cast<std::size_t>(axis)];
  r.p = phi.p.deriv(axis) + (phi.p.mul_var(axis) * -1.0);
  return r;
}

ScalarField sample_hermite(const Grid& g, const GaussHermite& phi) {
  if (g.d != phi.d) throw std::invalid_argument("sample_hermite: dimension mismatch");
  ScalarField out(g);
  parallel_for(g.size(), [&](std::int64_t i) {
    std::array<double, 3> x{};
    g.point(i, x);
    out.v[static_cast<std::size_t>(i)] = phi.evaluate(x);
  });
  return out;
}

std::string hermite_to_expr(const GaussHermite& phi) {
  char buf[64];
  const char* names[3] = {"x", "y", "z"};
  std::string s;
  auto push = [&](double coeff, const std::string& body) {
    if (coeff == 0.0) return;
    if (s.empty()) {
      if (coeff < 0.0) s += "-";
    } else {
      s += coeff < 0.0 ? " - " : " + ";
    }
    const double a = std::abs(coeff);
    if (body.empty() || a != 1.0) {
      std::snprintf(buf, sizeof buf, "%.17g", a);
      s += buf;
      if (!body.empty()) s += "*";
    }
    s += body;
  };
  push(phi.constant, "");
  for (int a = 0; a < phi.d; ++a) push(phi.lin[static_cast<std::size_t>(a)], names[a]);
  for (const auto& [m, v] : phi.p.c) {
    std::string body;
    for (int a = 0; a < phi.d; ++a)
      for (int e = 0; e < m[static_cast<std::size_t>(a)]; ++e) {
        if (!body.empty()) body += "*";
        body += names[a];
      }
    if (!body.empty()) body += "*";
    body += "G";
    push(v, body);
  }
  if (s.empty()) s = "0";
  return s;
}

std::vector<double> hermite_coeffs(int n) {
  if (n < 0 || n > kPolyDegreeCap) throw std::invalid_argument("hermite_coeffs: bad degree");
  std::vector<std::vector<double>> he(static_cast<std::size_t>(n) + 1);
  he[0] = {1.0};
  if (n >= 1) he[1] = {0.0, 1.0};
  for (int m = 1; m < n; ++m) {
    std::vector<double> next(static_cast<std::size_t>(m) + 2, 0.0);
    for (std::size_t i = 0; i < he[static_cast<std::size_t>(m)].size(); ++i)
      next[i + 1] += he[static_cast<std::size_t>(m)][i];
    for (std::size_t i = 0; i < he[static_cast<std::size_t>(m - 1)].size(); ++i)
      next[i] -= m * he[static_cast<std::size_t>(m - 1)][i];
    he[static_cast<std::size_t>(m) + 1] = std::move(next);
  }
  return he[static_cast<std::size_t>(n)];
}

std::vector<double> mono_to_hermite(const std::vector<double>& mono) {
  std::vector<double> rem = mono;
  const int deg = static_cast<int>(mono.size()) - 1;
  std::vector<double> out(mono.size(), 0.0);
  for (int n = deg; n >= 0; --n) {
    const double c = rem[static_cast<std::size_t>(n)];
    out[static_cast<std::size_t>(n)] = c;  // He_n is monic
    if (c != 0.0) {
      const auto he = hermite_coeffs(n);
      for (std::size_t i = 0; i < he.size(); ++i) rem[i] -= c * he[i];
    }
  }
  return out;
}

std::map<std::array<int, 3>, double> hermite_expand(const PolyMD& p) {
  // convert one axis at a time; the transform is triangular per axis
  std::map<std::array<int, 3>, double> cur = p.c;
  for (int axis = 0; axis < p.d; ++axis) {
    std::map<std::array<int, 3>, double> next;
    // group by the other exponents
    std::map<std::array<int, 3>, std::vector<double>> rows;
    for (const auto& [m, v] : cur) {
      std::array<int, 3> rest = m;
      const int e = m[static_cast<std::size_t>(axis)];
      rest[static_cast<std::size_t>(axis)] = 0;
      auto& row = rows[rest];
      if (static_cast<int>(row.size()) <= e) row.resize(static_cast<std::size_t>(e) + 1, 0.0);
      row[static_cast<std::size_t>(e)] = v;
    }
    for (auto& [rest, row] : rows) {
      const auto he = mono_to_hermite(row);
      for (std::size_t e = 0; e < he.size(); ++e) {
        if (he[e] == 0.0) continue;
        std::array<int, 3> m = rest;
        m[static_cast<std::size_t>(axis)] = static_cast<int>(e);
        next[m] += he[e];
      }
    }
    cur = std::move(next);
  }
  return cur;
}

GaussHermite hermite_mode(int d, const std::array<int, 3>& alpha) {
  GaussHermite out(d);
  PolyMD prod(d);
  prod.add({0, 0, 0}, 1.0);
  for (int a = 0; a < d; ++a) {
    const auto he = hermite_coeffs(alpha[static_cast<std::size_t>(a)]);
    PolyMD axis_poly(d);
    for (std::size_t e = 0; e < he.size(); ++e) {
      if (he[e] == 0.0) continue;
      std::array<int, 3> m{0, 0, 0};
      m[static_cast<std::size_t>(a)] = static_cast<int>(e);
      axis_poly.add(m, he[e]);
    }
    // multiply prod by axis_poly
    PolyMD next(d);
    for (const auto& [m1, v1] : prod.c)
      for (const auto& [m2, v2] : axis_poly.c) {
        std::array<int, 3> m{};
        for (int t = 0; t < 3; ++t) m[static_cast<std::size_t>(t)] = m1[static_cast<std::size_t>(t)] + m2[static_cast<std::size_t>(t)];
        next.add(m, v1 * v2);
      }
    prod = std::move(next);
  }
  out.p = std::move(prod);
  return out;
}

namespace {

// polynomial-ring value: plain + gpart * G
struct HermVal {
  PolyMD plain, gpart;
  explicit HermVal(int d) : plain(d), gpart(d) {}
};

HermVal walk(const ExprPtr& e, int d) {
  HermVal out(d);
  switch (e->kind) {
    case Expr::Kind::Num:
      out.plain.add({0, 0, 0}, e->num);
      return out;
    case Expr::Kind::Var:
      if (e->var >= d) throw std::invalid_argument("hermite parse: variable beyond dimension");
      {
        std::array<int, 3> m{0, 0, 0};
        m[static_cast<std::size_t>(e->var)] = 1;
        out.plain.add(m, 1.0);
      }
      return out;
    case Expr::Kind::Gauss:
      out.gpart.add({0, 0, 0}, 1.0);
      return out;
    case Expr::Kind::Add: {
      HermVal a = walk(e->a, d), b = walk(e->b, d);
      out.plain = a.plain + b.plain;
      out.gpart = a.gpart + b.gpart;
      return out;
    }
    case Expr::Kind::Sub: {
      HermVal a = walk(e->a, d), b = walk(e->b, d);
      out.plain = a.plain + (b.plain * -1.0);
      out.gpart = a.gpart + (b.gpart * -1.0);
      return out;
    }
    case Expr::Kind::Neg: {
      HermVal a = walk(e->a, d);
      out.plain = a.plain * -1.0;
      out.gpart = a.gpart * -1.0;
      return out;
    }
    case Expr::Kind::Mul: {
      HermVal a = walk(e->a, d), b = walk(e->b, d);
      if (!a.gpart.empty() && !b.gpart.empty())
        throw std::invalid_argument("hermite parse: G*G leaves the class");
      auto mul = [&](const PolyMD& p1, const PolyMD& p2) {
        PolyMD r(d);
        for (const auto& [m1, v1] : p1.c)
          for (const auto& [m2, v2] : p2.c) {
            std::array<int, 3> m{};
            for (int t = 0; t < 3; ++t) m[static_cast<std::size_t>(t)] = m1[static_cast<std::size_t>(t)] + m2[static_cast<std::size_t>(t)];
            r.add(m, v1 * v2);
          }
        return r;
      };
      out.plain = mul(a.plain, b.plain);
      out.gpart = mul(a.plain, b.gpart) + mul(a.gpart, b.plain);
      return out;
    }
    case Expr::Kind::Div: {
      HermVal a = walk(e->a, d), b = walk(e->b, d);
      if (!b.gpart.empty() || b.plain.total_degree() > 0)
        throw std::invalid_argument("hermite parse: division by a non-constant");
      auto it = b.plain.c.find({0, 0, 0});
      const double den = it == b.plain.c.end() ? 0.0 : it->second;
      if (den == 0.0) throw std::invalid_argument("hermite parse: division by zero");
      out.plain = a.plain * (1.0 / den);
      out.gpart = a.gpart * (1.0 / den);
      return out;
    }
    case Expr::Kind::Pow: {
      HermVal a = walk(e->a, d), b = walk(e->b, d);
      if (!b.gpart.empty() || b.plain.total_degree() > 0)
        throw std::invalid_argument("hermite parse: exponent must be a constant");
      auto it = b.plain.c.find({0, 0, 0});
      const double ev = it == b.plain.c.end() ? 0.0 : it->second;
      const int n = static_cast<int>(std::lround(ev));
      if (std::abs(ev - n) > 1e-12 || n < 0)
        throw std::invalid_argument("hermite parse: exponent must be a nonnegative integer");
      if (!a.gpart.empty() && n > 1)
        throw std::invalid_argument("hermite parse: power of G leaves the class");
      HermVal r(d);
      r.plain.add({0, 0, 0}, 1.0);
      for (int i = 0; i < n; ++i) {
        HermVal nr(d);
        auto mul = [&](const PolyMD& p1, const PolyMD& p2) {
          PolyMD res(d);
          for (const auto& [m1, v1] : p1.c)
            for (const auto& [m2, v2] : p2.c) {
              std::array<int, 3> m{};
              for (int t = 0; t < 3; ++t) m[static_cast<std::size_t>(t)] = m1[static_cast<std::size_t>(t)] + m2[static_cast<std::size_t>(t)];
              res.add(m, v1 * v2);
            }
          return res;
        };
        if (!r.gpart.empty() && !a.gpart.empty())
          throw std::invalid_argument("hermite parse: power of G leaves the class");
        nr.plain = mul(r.plain, a.plain);
        nr.gpart = mul(r.plain, a.gpart) + mul(r.gpart, a.plain);
        r = std::move(nr);
      }
      return r;
    }
    case Expr::Kind::Call:
      throw std::invalid_argument("hermite parse: function " + e->fn + " leaves the class");
  }
  return out;
}

}  // namespace

GaussHermite parse_hermite(const std::string& expr, int d) {
  HermVal v = walk(parse_expr(expr), d);
  GaussHermite out(d);
  for (const auto& [m, coeff] : v.plain.c) {
    const int deg = m[0] + m[1] + m[2];
    if (deg == 0) {
      out.constant = coeff;
    } else if (deg == 1) {
      for (int a = 0; a < d; ++a)
        if (m[static_cast<std::size_t>(a)] == 1) out.lin[static_cast<std::size_t>(a)] += coeff;
    } else {
      throw std::invalid_argument(
          "hermite parse: bare polynomial of degree > 1 (multiply by G)");
    }
  }
  out.p = v.gpart;
  return out;
}

}  // namespace magctrl
