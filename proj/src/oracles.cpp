#include "magctrl/oracles.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "magctrl/dense.hpp"
#include "magctrl/fft.hpp"
#include "magctrl/parallel.hpp"
#include "magctrl/state.hpp"

namespace magctrl {

WaveFunction apply_phase(const WaveFunction& psi, const ScalarField& phi,
                         double scale) {
  WaveFunction out = psi;
  phase_multiply(out, phi, scale);
  return out;
}

WaveFunction apply_quadratic_phase(const WaveFunction& psi, double delta) {
  const Grid& g = psi.grid;
  WaveFunction out = psi;
  parallel_for(g.size(), [&](std::int64_t i) {
    std::array<double, 3> x{};
    g.point(i, x);
    const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    out.v[static_cast<std::size_t>(i)] *= std::polar(1.0, delta * r2);
  });
  return out;
}

WaveFunction apply_dilation(const WaveFunction& psi, double alpha) {
  if (psi.grid.domain != Domain::Line)
    throw std::invalid_argument("apply_dilation: line grids only");
  if (!(alpha > 0.0))
    throw std::invalid_argument("apply_dilation: alpha must be positive");
  const Grid& g = psi.grid;
  TrigInterp interp(psi);
  std::vector<std::array<double, 3>> pts(static_cast<std::size_t>(g.size()));
  parallel_for(g.size(), [&](std::int64_t i) {
    std::array<double, 3> x{};
    g.point(i, x);
    for (int a = 0; a < g.d; ++a) x[static_cast<std::size_t>(a)] *= alpha;
    pts[static_cast<std::size_t>(i)] = x;
  });
  WaveFunction out(g);
  interp.eval_many(pts, out.v);
  const double amp = std::pow(alpha, 0.5 * g.d);
  parallel_for(g.size(), [&](std::int64_t i) { out.v[static_cast<std::size_t>(i)] *= amp; });
  return out;
}

WaveFunction apply_free_evolution(const WaveFunction& psi, double sigma) {
  const Grid& g = psi.grid;
  WaveFunction out(g);
  fft_forward(g, psi.v, out.v);
  parallel_for(g.size(), [&](std::int64_t i) {
    std::array<int, 3> idx{};
    g.unravel(i, idx);
    double k2 = 0.0;
    for (int a = 0; a < g.d; ++a) {
      const double k = g.kappa(a, idx[static_cast<std::size_t>(a)]);
      k2 += k * k;
    }
    out.v[static_cast<std::size_t>(i)] *= std::polar(1.0, -sigma * k2);
  });
  fft_inverse_inplace(g, out.v);
  return out;
}

namespace {

struct GridKey {
  int domain, d, n0, n1, n2;
  double L;
  bool operator<(const GridKey& o) const {
    return std::tie(domain, d, n0, n1, n2, L) <
           std::tie(o.domain, o.d, o.n0, o.n1, o.n2, o.L);
  }
};

std::map<GridKey, std::shared_ptr<EigData>> g_osc_cache;
std::mutex g_osc_mutex;

std::shared_ptr<EigData> oscillator_eig(const Grid& g) {
  const GridKey key{static_cast<int>(g.domain), g.d, g.n[0], g.n[1], g.n[2], g.L};
  {
    std::lock_guard<std::mutex> lock(g_osc_mutex);
    auto it = g_osc_cache.find(key);
    if (it != g_osc_cache.end()) return it->second;
  }
  ScalarField V = sample(g, [](const std::array<double, 3>& x) {
    return x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  });
  ControlSystem sys = make_custom_fields(g, VectorField(), V, {});
  auto H = assemble(sys, {});
  auto eig = std::make_shared<EigData>(eig_hermitian(std::move(H), static_cast<int>(g.size())));
  std::lock_guard<std::mutex> lock(g_osc_mutex);
  g_osc_cache.emplace(key, eig);
  return eig;
}

}  // namespace

WaveFunction apply_harmonic_evolution(const WaveFunction& psi, double sigma) {
  if (psi.grid.domain != Domain::Line)
    throw std::invalid_argument("apply_harmonic_evolution: line grids only");
  auto eig = oscillator_eig(psi.grid);
  WaveFunction out = psi;
  eig_evolve(*eig, sigma, out.v);
  return out;
}

WaveFunction apply_translation(const WaveFunction& psi, int axis, double u) {
  const Grid& g = psi.grid;
  if (axis < 0 || axis >= g.d)
    throw std::invalid_argument("apply_translation: bad axis");
  WaveFunction out(g);
  fft_forward(g, psi.v, out.v);
  parallel_for(g.size(), [&](std::int64_t i) {
    std::array<int, 3> idx{};
    g.unravel(i, idx);
    const double k = g.kappa(axis, idx[static_cast<std::size_t>(axis)]);
    out.v[static_cast<std::size_t>(i)] *= std::polar(1.0, k * u);
  });
  fft_inverse_inplace(g, out.v);
  return out;
}

namespace {

WaveFunction transport_core(const WaveFunction& psi, const ScalarField& phi,
                            double t, int substeps, const ControlSystem* sys) {
  const Grid& g = psi.grid;
  if (!(phi.grid == g)) throw std::invalid_argument("transport: grid mismatch");

  VectorField gradphi = spectral_gradient(phi);
  ScalarField lap = spectral_laplacian(phi);

  // f = 2 grad phi; div f = 2 lap phi; twist integrand q = 2 <A, grad phi>
  std::array<std::unique_ptr<TrigInterp>, 3> f_interp;
  double fmax = 0.0;
  for (int a = 0; a < g.d; ++a) {
    WaveFunction w(g);
    for (std::int64_t i = 0; i < g.size(); ++i) {
      const double val = 2.0 * gradphi.comp[static_cast<std::size_t>(a)].v[static_cast<std::size_t>(i)];
      w.v[static_cast<std::size_t>(i)] = val;
      fmax = std::max(fmax, std::abs(val));
    }
    f_interp[static_cast<std::size_t>(a)] = std::make_unique<TrigInterp>(w);
  }
  WaveFunction aux(g);  // div f + i q
  for (std::int64_t i = 0; i < g.size(); ++i) {
    const auto ii = static_cast<std::size_t>(i);
    double q = 0.0;
    if (sys && sys->has_A)
      for (int a = 0; a < g.d; ++a)
        q += 2.0 * sys->A.comp[static_cast<std::size_t>(a)].v[ii] *
             gradphi.comp[static_cast<std::size_t>(a)].v[ii];
    aux.v[ii] = cplx(2.0 * lap.v[ii], q);
  }
  TrigInterp aux_interp(aux);
  TrigInterp psi_interp(psi);

  int n = substeps;
  if (n <= 0)
    n = std::max(8, static_cast<int>(std::ceil(64.0 * std::abs(t) * fmax / g.min_spacing())));
  const double h = t / n;

  WaveFunction out(g);
  const int d = g.d;
  parallel_for_blocks(static_cast<std::size_t>(g.size()),
                      [&](std::size_t, std::size_t lo, std::size_t hi) {
    std::array<double, 3> y{}, yt{};
    std::array<std::array<double, 3>, 4> kf{};
    std::array<cplx, 4> ka{};
    for (std::size_t i = lo; i < hi; ++i) {
      g.point(static_cast<std::int64_t>(i), y);
      double idiv = 0.0, itw = 0.0;
      for (int step = 0; step < n; ++step) {
        for (int stage = 0; stage < 4; ++stage) {
          const double c = stage == 0 ? 0.0 : stage == 3 ? 1.0 : 0.5;
          for (int a = 0; a < d; ++a)
            yt[static_cast<std::size_t>(a)] =
                y[static_cast<std::size_t>(a)] +
                (stage == 0 ? 0.0 : h * c * kf[static_cast<std::size_t>(stage - 1)][static_cast<std::size_t>(a)]);
          for (int a = 0; a < d; ++a)
            kf[static_cast<std::size_t>(stage)][static_cast<std::size_t>(a)] =
                f_interp[static_cast<std::size_t>(a)]->eval(yt).real();
          ka[static_cast<std::size_t>(stage)] = aux_interp.eval(yt);
        }
        for (int a = 0; a < d; ++a)
          y[static_cast<std::size_t>(a)] +=
              h / 6.0 * (kf[0][static_cast<std::size_t>(a)] + 2.0 * kf[1][static_cast<std::size_t>(a)] +
                         2.0 * kf[2][static_cast<std::size_t>(a)] + kf[3][static_cast<std::size_t>(a)]);
        const cplx ia = h / 6.0 * (ka[0] + 2.0 * ka[1] + 2.0 * ka[2] + ka[3]);
        idiv += ia.real();
        itw += ia.imag();
      }
      out.v[i] = psi_interp.eval(y) * std::exp(0.5 * idiv) * std::polar(1.0, -itw);
    }
  });
  return out;
}

}  // namespace

WaveFunction apply_transport(const WaveFunction& psi, const ScalarField& phi,
                             double t, int substeps) {
  return transport_core(psi, phi, t, substeps, nullptr);
}

WaveFunction apply_twisted_transport(const ControlSystem& sys,
                                     const WaveFunction& psi,
                                     const ScalarField& phi, double t,
                                     int substeps) {
  if (!(sys.grid == psi.grid))
    throw std::invalid_argument("apply_twisted_transport: grid mismatch");
  return transport_core(psi, phi, t, substeps, &sys);
}

}  // namespace magctrl
