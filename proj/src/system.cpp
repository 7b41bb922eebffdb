#include "magctrl/system.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "magctrl/expr.hpp"
#include "magctrl/parallel.hpp"
#include "magctrl/state.hpp"

namespace magctrl {

namespace {

std::atomic<std::uint64_t> g_next_system_id{1};

void check_finite(const ScalarField& f, const char* what) {
  for (double v : f.v)
    if (!std::isfinite(v)) throw std::invalid_argument(std::string("system: non-finite ") + what);
}

void finish(ControlSystem& sys, const std::string& divA_expr) {
  const Grid& g = sys.grid;
  sys.has_A = false;
  for (int a = 0; a < g.d; ++a) {
    const auto& comp = sys.A.comp[static_cast<std::size_t>(a)];
    if (comp.v.empty()) continue;
    check_finite(comp, "A");
    for (double v : comp.v)
      if (v != 0.0) {
        sys.has_A = true;
        break;
      }
  }
  // normalize representation: full-size components even when zero
  for (int a = 0; a < g.d; ++a) {
    auto& comp = sys.A.comp[static_cast<std::size_t>(a)];
    if (comp.v.empty()) comp = ScalarField(g);
  }
  sys.A.grid = g;

  sys.A2 = ScalarField(g);
  if (sys.has_A) {
    parallel_for(g.size(), [&](std::int64_t i) {
      double s = 0.0;
      for (int a = 0; a < g.d; ++a) {
        const double v = sys.A.comp[static_cast<std::size_t>(a)].v[static_cast<std::size_t>(i)];
        s += v * v;
      }
      sys.A2.v[static_cast<std::size_t>(i)] = s;
    });
    sys.divA = divA_expr.empty() ? spectral_divergence(sys.A)
                                 : sample_expr(g, divA_expr);
  } else {
    sys.divA = ScalarField(g);
  }

  if (sys.V.v.empty()) sys.V = ScalarField(g);
  check_finite(sys.V, "V");
  sys.has_V = false;
  for (double v : sys.V.v)
    if (v != 0.0) {
      sys.has_V = true;
      break;
    }

  for (const auto& w : sys.W) {
    if (w.v.size() != static_cast<std::size_t>(g.size()))
      throw std::invalid_argument("system: W field size mismatch");
    check_finite(w, "W");
  }
  sys.id = g_next_system_id.fetch_add(1);
}

void sample_A_V(ControlSystem& sys, const std::array<std::string, 3>& A_expr,
                const std::string& V_expr) {
  const Grid& g = sys.grid;
  sys.A_expr = A_expr;
  sys.V_expr = V_expr;
  for (int a = 0; a < g.d; ++a)
    if (!A_expr[static_cast<std::size_t>(a)].empty())
      sys.A.comp[static_cast<std::size_t>(a)] = sample_expr(g, A_expr[static_cast<std::size_t>(a)]);
  if (!V_expr.empty()) sys.V = sample_expr(g, V_expr);
}

}  // namespace

std::vector<std::array<int, 3>> torus_base_freqs(int d) {
  std::vector<std::array<int, 3>> b;
  for (int j = 0; j < d - 1; ++j) {
    std::array<int, 3> e{0, 0, 0};
    e[static_cast<std::size_t>(j)] = 1;
    b.push_back(e);
  }
  std::array<int, 3> ones{0, 0, 0};
  for (int a = 0; a < d; ++a) ones[static_cast<std::size_t>(a)] = 1;
  b.push_back(ones);
  return b;
}

ControlSystem make_torus_trig(int d, int n_per_axis,
                              const std::array<std::string, 3>& A_expr,
                              const std::string& V_expr) {
  ControlSystem sys;
  sys.kind = SystemKind::TorusTrig;
  sys.grid = Grid::torus(d, n_per_axis);
  sys.A = VectorField(sys.grid);
  sample_A_V(sys, A_expr, V_expr);
  const auto freqs = torus_base_freqs(d);
  for (const auto& b : freqs) {
    auto dot = [&](const std::array<double, 3>& x) {
      double s = 0.0;
      for (int a = 0; a < d; ++a) s += b[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
      return s;
    };
    sys.W.push_back(sample(sys.grid, [&](const std::array<double, 3>& x) { return std::sin(dot(x)); }));
    sys.W.push_back(sample(sys.grid, [&](const std::array<double, 3>& x) { return std::cos(dot(x)); }));
    std::string arg;
    for (int a = 0; a < d; ++a) {
      const int c = b[static_cast<std::size_t>(a)];
      if (c == 0) continue;
      if (!arg.empty()) arg += "+";
      arg += (a == 0 ? "x" : a == 1 ? "y" : "z");
    }
    sys.W_expr.push_back("sin(" + arg + ")");
    sys.W_expr.push_back("cos(" + arg + ")");
  }
  finish(sys, "");
  return sys;
}

ControlSystem make_line_dipole(int d, int n_per_axis, double L,
                               const std::array<std::string, 3>& A_expr,
                               const std::string& V_expr) {
  ControlSystem sys;
  sys.kind = SystemKind::LineDipole;
  sys.grid = Grid::line(d, n_per_axis, L);
  sys.A = VectorField(sys.grid);
  sample_A_V(sys, A_expr, V_expr);
  const char* names[3] = {"x", "y", "z"};
  for (int j = 0; j < d; ++j) {
    sys.W.push_back(sample(sys.grid, [&](const std::array<double, 3>& x) { return x[static_cast<std::size_t>(j)]; }));
    sys.W_expr.push_back(names[j]);
  }
  sys.W.push_back(sample(sys.grid, [&](const std::array<double, 3>& x) {
    return std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
  }));
  sys.W_expr.push_back("G");
  finish(sys, "");
  return sys;
}

ControlSystem make_quadratic_r(int d, int n_per_axis, double L,
                               const std::string& W2_expr,
                               const std::array<std::string, 3>& A_expr,
                               const std::string& V_expr) {
  ControlSystem sys;
  sys.kind = SystemKind::QuadraticR;
  sys.grid = Grid::line(d, n_per_axis, L);
  sys.A = VectorField(sys.grid);
  sample_A_V(sys, A_expr, V_expr);
  sys.W.push_back(sample(sys.grid, [&](const std::array<double, 3>& x) {
    return x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  }));
  sys.W_expr.push_back("x^2+y^2+z^2");
  if (!W2_expr.empty()) {
    sys.W.push_back(sample_expr(sys.grid, W2_expr));
    sys.W_expr.push_back(W2_expr);
  }
  finish(sys, "");
  return sys;
}

ControlSystem make_custom(const Grid& g, const std::array<std::string, 3>& A_expr,
                          const std::string& V_expr,
                          const std::vector<std::string>& W_expr) {
  ControlSystem sys;
  sys.kind = SystemKind::Custom;
  sys.grid = g;
  sys.A = VectorField(g);
  sample_A_V(sys, A_expr, V_expr);
  for (const auto& w : W_expr) {
    sys.W.push_back(sample_expr(g, w));
    sys.W_expr.push_back(w);
  }
  finish(sys, "");
  return sys;
}

ControlSystem make_custom_fields(const Grid& g, const VectorField& A,
                                 const ScalarField& V,
                                 const std::vector<ScalarField>& W,
                                 const std::string& divA_expr) {
  ControlSystem sys;
  sys.kind = SystemKind::Custom;
  sys.grid = g;
  sys.A = A.grid.d > 0 && !A.comp[0].v.empty() ? A : VectorField(g);
  sys.A.grid = g;
  sys.V = V;
  sys.W = W;
  sys.W_expr.assign(W.size(), "");
  finish(sys, divA_expr);
  return sys;
}

void set_analytic_divA(ControlSystem& sys, const std::string& expr) {
  sys.divA = sample_expr(sys.grid, expr);
}

WaveFunction apply_hamiltonian(const ControlSystem& sys,
                               const std::vector<double>& u,
                               const WaveFunction& psi) {
  const Grid& g = sys.grid;
  if (!(psi.grid == g)) throw std::invalid_argument("apply_hamiltonian: grid mismatch");
  if (u.size() != static_cast<std::size_t>(sys.m()))
    throw std::invalid_argument("apply_hamiltonian: control vector size mismatch");

  std::array<WaveFunction, 3> grads;
  spectral_gradient(psi, grads);

  // eta_a = (-i d_a - A_a) psi, then H psi = sum_a (-i d_a - A_a) eta_a + ...
  WaveFunction out(g);
  for (int a = 0; a < g.d; ++a) {
    WaveFunction eta(g);
    const auto& Aa = sys.A.comp[static_cast<std::size_t>(a)].v;
    if (sys.has_A) {
      parallel_for(g.size(), [&](std::int64_t i) {
        const auto ii = static_cast<std::size_t>(i);
        eta.v[ii] = cplx(0.0, -1.0) * grads[static_cast<std::size_t>(a)].v[ii] - Aa[ii] * psi.v[ii];
      });
    } else {
      parallel_for(g.size(), [&](std::int64_t i) {
        const auto ii = static_cast<std::size_t>(i);
        eta.v[ii] = cplx(0.0, -1.0) * grads[static_cast<std::size_t>(a)].v[ii];
      });
    }
    WaveFunction deta = spectral_partial(eta, a);
    if (sys.has_A) {
      parallel_for(g.size(), [&](std::int64_t i) {
        const auto ii = static_cast<std::size_t>(i);
        out.v[ii] += cplx(0.0, -1.0) * deta.v[ii] - Aa[ii] * eta.v[ii];
      });
    } else {
      parallel_for(g.size(), [&](std::int64_t i) {
        const auto ii = static_cast<std::size_t>(i);
        out.v[ii] += cplx(0.0, -1.0) * deta.v[ii];
      });
    }
  }

  parallel_for(g.size(), [&](std::int64_t i) {
    const auto ii = static_cast<std::size_t>(i);
    double pot = sys.V.v[ii];
    for (int j = 0; j < sys.m(); ++j)
      pot += u[static_cast<std::size_t>(j)] * sys.W[static_cast<std::size_t>(j)].v[ii];
    out.v[ii] += pot * psi.v[ii];
  });
  return out;
}

WaveFunction apply_hamiltonian_expanded(const ControlSystem& sys,
                                        const std::vector<double>& u,
                                        const WaveFunction& psi) {
  const Grid& g = sys.grid;
  if (u.size() != static_cast<std::size_t>(sys.m()))
    throw std::invalid_argument("apply_hamiltonian_expanded: control vector size mismatch");
  WaveFunction lap = spectral_laplacian(psi);
  std::array<WaveFunction, 3> grads;
  spectral_gradient(psi, grads);
  WaveFunction out(g);
  parallel_for(g.size(), [&](std::int64_t i) {
    const auto ii = static_cast<std::size_t>(i);
    cplx val = -lap.v[ii];
    if (sys.has_A) {
      cplx adotg{0.0, 0.0};
      for (int a = 0; a < g.d; ++a)
        adotg += sys.A.comp[static_cast<std::size_t>(a)].v[ii] * grads[static_cast<std::size_t>(a)].v[ii];
      val += (sys.A2.v[ii] + cplx(0.0, 1.0) * sys.divA.v[ii]) * psi.v[ii] +
             cplx(0.0, 2.0) * adotg;
    }
    double pot = sys.V.v[ii];
    for (int j = 0; j < sys.m(); ++j)
      pot += u[static_cast<std::size_t>(j)] * sys.W[static_cast<std::size_t>(j)].v[ii];
    val += pot * psi.v[ii];
    out.v[ii] = val;
  });
  return out;
}

double hamiltonian_spread_bound(const ControlSystem& sys,
                                const std::vector<double>& u) {
  const Grid& g = sys.grid;
  double k2max = 0.0;
  for (int a = 0; a < g.d; ++a) {
    const double km = g.kappa_max(a);
    k2max += km * km;
  }
  double amax = 0.0;
  if (sys.has_A)
    for (std::int64_t i = 0; i < g.size(); ++i)
      amax = std::max(amax, std::sqrt(sys.A2.v[static_cast<std::size_t>(i)]));
  double pot_lo = 0.0, pot_hi = 0.0;
  for (std::int64_t i = 0; i < g.size(); ++i) {
    const auto ii = static_cast<std::size_t>(i);
    double pot = sys.V.v[ii];
    for (int j = 0; j < sys.m(); ++j)
      pot += u[static_cast<std::size_t>(j)] * sys.W[static_cast<std::size_t>(j)].v[ii];
    if (i == 0) {
      pot_lo = pot_hi = pot;
    } else {
      pot_lo = std::min(pot_lo, pot);
      pot_hi = std::max(pot_hi, pot);
    }
  }
  const double kin = k2max + 2.0 * amax * std::sqrt(k2max) + amax * amax;
  return kin + (pot_hi - pot_lo);
}

TangencyReport validate_tangency(const ControlSystem& sys, double tol) {
  TangencyReport rep;
  if (!sys.has_A || sys.grid.domain == Domain::Torus) return rep;
  const Grid& g = sys.grid;
  double worst = 0.0;
  std::array<double, 3> x{};
  for (std::int64_t i = 0; i < g.size(); ++i) {
    g.point(i, x);
    double dot = 0.0;
    for (int a = 0; a < g.d; ++a)
      dot += sys.A.comp[static_cast<std::size_t>(a)].v[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(a)];
    worst = std::max(worst, std::abs(dot));
  }
  rep.max_abs = worst;
  rep.tangent = worst <= tol;
  return rep;
}

}  // namespace magctrl
