#include "magctrl/trigpoly.hpp"

#include <cmath>
#include <cstdio>

#include "magctrl/expr.hpp"
#include "magctrl/fft.hpp"
#include "magctrl/parallel.hpp"
#include "magctrl/state.hpp"

namespace magctrl {

FreqKey canonical_freq(const std::array<int, 3>& k, bool& flipped) {
  flipped = false;
  for (int a = 0; a < 3; ++a) {
    const int v = k[static_cast<std::size_t>(a)];
    if (v > 0) break;
    if (v < 0) {
      flipped = true;
      break;
    }
  }
  FreqKey key;
  key.k = k;
  if (flipped)
    for (int a = 0; a < 3; ++a) key.k[static_cast<std::size_t>(a)] = -k[static_cast<std::size_t>(a)];
  return key;
}

ScalarField sample_trig(const Grid& g, const TrigPoly& p) {
  if (g.d != p.d) throw std::invalid_argument("sample_trig: dimension mismatch");
  ScalarField out(g);
  parallel_for(g.size(), [&](std::int64_t i) {
    std::array<double, 3> x{};
    g.point(i, x);
    out.v[static_cast<std::size_t>(i)] = p.evaluate(x);
  });
  return out;
}

namespace {

void append_coeff(std::string& s, double c, const std::string& body) {
  char buf[64];
  if (s.empty()) {
    if (c < 0.0) s += "-";
  } else {
    s += c < 0.0 ? " - " : " + ";
  }
  const double a = std::abs(c);
  if (body.empty()) {
    std::snprintf(buf, sizeof buf, "%.17g", a);
    s += buf;
    return;
  }
  if (a == 1.0) {
    s += body;
  } else {
    std::snprintf(buf, sizeof buf, "%.17g", a);
    s += buf;
    s += "*";
    s += body;
  }
}

std::string freq_arg(const FreqKey& key, int d) {
  const char* names[3] = {"x", "y", "z"};
  std::string arg;
  for (int a = 0; a < d; ++a) {
    const int c = key.k[static_cast<std::size_t>(a)];
    if (c == 0) continue;
    if (!arg.empty()) arg += c < 0 ? "-" : "+";
    else if (c < 0) arg += "-";
    const int m = std::abs(c);
    if (m != 1) {
      arg += std::to_string(m);
      arg += "*";
    }
    arg += names[a];
  }
  return arg;
}

}  // namespace

std::string trig_to_expr(const TrigPoly& p) {
  std::string s;
  for (const auto& [key, sc] : p.terms) {
    if (key.zero()) {
      if (sc.second != 0.0) append_coeff(s, sc.second, "");
      continue;
    }
    const std::string arg = freq_arg(key, p.d);
    if (sc.first != 0.0) append_coeff(s, sc.first, "sin(" + arg + ")");
    if (sc.second != 0.0) append_coeff(s, sc.second, "cos(" + arg + ")");
  }
  if (s.empty()) s = "0";
  return s;
}

TrigPoly project_trig(const ScalarField& f, double drop_tol) {
  const Grid& g = f.grid;
  if (g.domain != Domain::Torus)
    throw std::invalid_argument("project_trig: torus grids only");
  std::vector<cplx> spec(static_cast<std::size_t>(g.size()));
  parallel_for(g.size(), [&](std::int64_t i) {
    spec[static_cast<std::size_t>(i)] = f.v[static_cast<std::size_t>(i)];
  });
  fft_forward_inplace(g, spec);
  const double scale = 1.0 / static_cast<double>(g.size());
  double top = 0.0;
  for (const auto& z : spec) top = std::max(top, std::abs(z) * scale);
  const double cut = drop_tol * std::max(top, 1.0);

  TrigPoly p(g.d);
  std::array<int, 3> idx{};
  for (std::int64_t i = 0; i < g.size(); ++i) {
    const cplx z = spec[static_cast<std::size_t>(i)] * scale;
    if (std::abs(z) <= cut) continue;
    g.unravel(i, idx);
    std::array<int, 3> k{0, 0, 0};
    bool nyquist = false;
    for (int a = 0; a < g.d; ++a) {
      const int bf = g.bin_freq(a, idx[static_cast<std::size_t>(a)]);
      if (g.n[static_cast<std::size_t>(a)] % 2 == 0 &&
          idx[static_cast<std::size_t>(a)] == g.n[static_cast<std::size_t>(a)] / 2)
        nyquist = true;
      k[static_cast<std::size_t>(a)] = bf;
    }
    if (nyquist)
      throw std::invalid_argument("project_trig: content at the Nyquist frequency");
    bool flipped = false;
    const FreqKey key = canonical_freq(k, flipped);
    if (key.max_abs() > kTrigFreqCap)
      throw std::invalid_argument("project_trig: frequency cap exceeded");
    if (key.zero()) {
      p.add_const(z.real());
      continue;
    }
    if (flipped) continue;  // canonical partner handles the pair
    // z e^{i<k,x>} + conj(z) e^{-i<k,x>} = 2 Re z cos - 2 Im z sin
    p.add_term(k, -2.0 * z.imag(), 2.0 * z.real());
  }
  p.prune(cut);
  return p;
}

TrigPoly parse_trig(const std::string& expr, int d) {
  const Grid g = Grid::torus(d, 64);
  ScalarField f = sample_expr(g, expr);
  TrigPoly p = project_trig(f, 1e-11);
  // reject inputs that are not band-limited trig combinations
  ScalarField back = sample_trig(g, p);
  double err = 0.0, scale = 1.0;
  for (std::size_t i = 0; i < f.v.size(); ++i) {
    err = std::max(err, std::abs(back.v[i] - f.v[i]));
    scale = std::max(scale, std::abs(f.v[i]));
  }
  if (err > 1e-8 * scale)
    throw std::invalid_argument("parse_trig: expression is not a trig combination (residual " +
                                std::to_string(err) + ")");
  return p;
}

TrigPolyQ to_rational(const TrigPoly& p, std::int64_t max_den) {
  TrigPolyQ q(p.d);
  auto approx = [&](double v) {
    // continued-fraction rationalization
    std::int64_t best_n = 0, best_d = 1;
    double best_err = std::abs(v);
    std::int64_t pn = 1, pd = 0, qn = 0, qd = 1;
    double x = v;
    for (int iter = 0; iter < 40; ++iter) {
      const double fl = std::floor(x);
      const std::int64_t a = static_cast<std::int64_t>(fl);
      const std::int64_t nn = a * pn + qn, nd = a * pd + qd;
      if (nd > max_den || nd < 0) break;
      qn = pn;
      qd = pd;
      pn = nn;
      pd = nd;
      if (nd > 0) {
        const double err = std::abs(v - static_cast<double>(nn) / static_cast<double>(nd));
        if (err < best_err) {
          best_err = err;
          best_n = nn;
          best_d = nd;
        }
        if (err == 0.0) break;
      }
      const double frac = x - fl;
      if (frac < 1e-15) break;
      x = 1.0 / frac;
    }
    if (best_err > 1e-9 * std::max(1.0, std::abs(v)))
      throw std::invalid_argument("to_rational: coefficient is not a small rational");
    return Rat(best_n, best_d);
  };
  for (const auto& [key, sc] : p.terms)
    q.terms[key] = {sc.first == 0.0 ? Rat() : approx(sc.first),
                    sc.second == 0.0 ? Rat() : approx(sc.second)};
  return q;
}

TrigPoly to_double(const TrigPolyQ& p) {
  TrigPoly out(p.d);
  for (const auto& [key, sc] : p.terms)
    out.terms[key] = {sc.first.to_double(), sc.second.to_double()};
  return out;
}

}  // namespace magctrl
