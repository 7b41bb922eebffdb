#include "magctrl/gaussian_fit.hpp"

#include <algorithm>
#include <cmath>

#include "magctrl/parallel.hpp"

namespace magctrl {

namespace {

// Overlap <g(a,b), psi> with the normalized chirped Gaussian, one pass.
cplx overlap(const WaveFunction& psi, double a, double b) {
  const Grid& g = psi.grid;
  const std::size_t n = g.size();
  std::vector<double> w2(blocked_count(n), 0.0);
  std::vector<cplx> ov(blocked_count(n), cplx{0.0, 0.0});
  parallel_for_blocks(n, [&](std::size_t blk, std::size_t lo, std::size_t hi) {
    double s = 0.0;
    cplx z{0.0, 0.0};
    std::array<double, 3> x;
    for (std::size_t i = lo; i < hi; ++i) {
      g.point(i, x);
      const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
      const double amp = std::exp(-a * r2);
      s += amp * amp;
      // conj(g_raw) = e^{-(a-ib)r^2}
      z += amp * std::polar(1.0, b * r2) * psi.v[i];
    }
    w2[blk] = s;
    ov[blk] = z;
  });
  double nrm2 = 0.0;
  cplx tot{0.0, 0.0};
  for (std::size_t blk = 0; blk < w2.size(); ++blk) {
    nrm2 += w2[blk];
    tot += ov[blk];
  }
  const double vol = g.cell_volume();
  nrm2 *= vol;
  if (nrm2 <= 0.0) return cplx{0.0, 0.0};
  return tot * vol / std::sqrt(nrm2);
}

double objective(const WaveFunction& psi, double a, double b) {
  const cplx c = overlap(psi, a, b);
  return 1.0 - std::norm(c);
}

}  // namespace

GaussianFit fit_gaussian(const WaveFunction& psi) {
  if (psi.grid.domain != Domain::Line)
    throw std::invalid_argument("fit_gaussian: line domain required");
  const std::size_t n = psi.grid.size();

  // Moment initialization: <|x|^2> = d/(4a) for a centered Gaussian.
  const double r2bar = mean_r2(psi);
  double a = (r2bar > 0.0) ? psi.grid.d / (4.0 * r2bar) : 1.0;
  a = std::clamp(a, 1e-8, 1e8);

  // Chirp estimate from the radial phase current:
  //   Im(conj(psi) <x, grad psi>) = -2b |x|^2 |psi|^2 for an exact Gaussian.
  std::array<WaveFunction, 3> grads;
  spectral_gradient(psi, grads);
  double num = 0.0, den = 0.0;
  {
    std::vector<double> nb(blocked_count(n), 0.0), db(blocked_count(n), 0.0);
    parallel_for_blocks(n, [&](std::size_t blk, std::size_t lo, std::size_t hi) {
      double ns = 0.0, ds = 0.0;
      std::array<double, 3> x;
      for (std::size_t i = lo; i < hi; ++i) {
        psi.grid.point(i, x);
        const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        cplx xg{0.0, 0.0};
        for (int ax = 0; ax < psi.grid.d; ++ax) xg += x[ax] * grads[ax].v[i];
        ns += std::imag(std::conj(psi.v[i]) * xg);
        ds += r2 * std::norm(psi.v[i]);
      }
      nb[blk] = ns;
      db[blk] = ds;
    });
    for (std::size_t blk = 0; blk < nb.size(); ++blk) {
      num += nb[blk];
      den += db[blk];
    }
  }
  double b = (den > 0.0) ? -num / (2.0 * den) : 0.0;

  GaussianFit fit;
  double f = objective(psi, a, b);
  bool converged = false;
  int iter = 0;
  for (; iter < 200; ++iter) {
    const double ha = 1e-5 * (std::abs(a) + 1e-3);
    const double hb = 1e-5 * (std::abs(b) + 1e-3);
    const double fpa = objective(psi, a + ha, b);
    const double fma = objective(psi, a - ha, b);
    const double fpb = objective(psi, a, b + hb);
    const double fmb = objective(psi, a, b - hb);
    const double fpp = objective(psi, a + ha, b + hb);
    const double fpm = objective(psi, a + ha, b - hb);
    const double fmp = objective(psi, a - ha, b + hb);
    const double fmm = objective(psi, a - ha, b - hb);
    const double ga = (fpa - fma) / (2.0 * ha);
    const double gb = (fpb - fmb) / (2.0 * hb);
    double haa = (fpa - 2.0 * f + fma) / (ha * ha);
    double hbb = (fpb - 2.0 * f + fmb) / (hb * hb);
    const double hab = (fpp - fpm - fmp + fmm) / (4.0 * ha * hb);

    // Damped Newton: inflate the diagonal until the step decreases f.
    double lambda = 0.0;
    const double scale = std::max({std::abs(haa), std::abs(hbb), 1e-12});
    bool stepped = false;
    double da = 0.0, db_ = 0.0;
    for (int trial = 0; trial < 24; ++trial) {
      const double d0 = haa + lambda, d1 = hbb + lambda;
      const double det = d0 * d1 - hab * hab;
      if (det > 1e-300 && d0 > 0.0) {
        da = -(d1 * ga - hab * gb) / det;
        db_ = -(d0 * gb - hab * ga) / det;
        double atry = std::clamp(a + da, 1e-8, 1e8);
        double btry = b + db_;
        const double ftry = objective(psi, atry, btry);
        if (ftry <= f) {
          da = atry - a;
          db_ = btry - b;
          a = atry;
          b = btry;
          f = ftry;
          stepped = true;
          break;
        }
      }
      lambda = (lambda == 0.0) ? 1e-4 * scale : lambda * 10.0;
    }
    if (!stepped) break;
    const double step = std::hypot(da, db_);
    if (step <= 1e-12 * (1.0 + std::hypot(a, b))) {
      converged = true;
      break;
    }
  }

  const cplx c = overlap(psi, a, b);
  fit.params.a = a;
  fit.params.b = b;
  fit.params.theta = std::arg(c);
  fit.residual = std::sqrt(std::max(0.0, 2.0 - 2.0 * std::abs(c)));
  fit.iterations = iter;
  fit.converged = converged || fit.residual < 1e-12;
  return fit;
}

}  // namespace magctrl
