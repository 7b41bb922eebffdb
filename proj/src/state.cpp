#include "magctrl/state.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "magctrl/fft.hpp"
#include "magctrl/parallel.hpp"

namespace magctrl {

static void check_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw std::invalid_argument("grid mismatch");
}

cplx inner_product(const WaveFunction& a, const WaveFunction& b) {
  check_same_grid(a.grid, b.grid);
  const cplx s = parallel_sum_c(a.grid.size(), [&](std::int64_t i) {
    return std::conj(a.v[static_cast<std::size_t>(i)]) * b.v[static_cast<std::size_t>(i)];
  });
  return s * a.grid.cell_volume();
}

double norm(const WaveFunction& a) {
  const double s = parallel_sum(a.grid.size(), [&](std::int64_t i) {
    return std::norm(a.v[static_cast<std::size_t>(i)]);
  });
  return std::sqrt(s * a.grid.cell_volume());
}

void normalize(WaveFunction& a) {
  const double n = norm(a);
  if (n == 0.0) throw std::invalid_argument("normalize: zero state");
  const double inv = 1.0 / n;
  parallel_for(a.grid.size(), [&](std::int64_t i) { a.v[static_cast<std::size_t>(i)] *= inv; });
}

double projective_distance(const WaveFunction& a, const WaveFunction& b) {
  const double c = std::abs(inner_product(a, b));
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * c));
}

double l2_distance(const WaveFunction& a, const WaveFunction& b) {
  check_same_grid(a.grid, b.grid);
  const double s = parallel_sum(a.grid.size(), [&](std::int64_t i) {
    return std::norm(a.v[static_cast<std::size_t>(i)] - b.v[static_cast<std::size_t>(i)]);
  });
  return std::sqrt(s * a.grid.cell_volume());
}

void phase_multiply(WaveFunction& psi, const ScalarField& phase, double scale) {
  check_same_grid(psi.grid, phase.grid);
  parallel_for(psi.grid.size(), [&](std::int64_t i) {
    const double p = scale * phase.v[static_cast<std::size_t>(i)];
    psi.v[static_cast<std::size_t>(i)] *= cplx(std::cos(p), std::sin(p));
  });
}

void cmul(std::vector<cplx>& x, const std::vector<cplx>& factor) {
  parallel_for(static_cast<std::int64_t>(x.size()),
               [&](std::int64_t i) { x[static_cast<std::size_t>(i)] *= factor[static_cast<std::size_t>(i)]; });
}

void axpy(std::vector<cplx>& y, cplx alpha, const std::vector<cplx>& x) {
  parallel_for(static_cast<std::int64_t>(y.size()),
               [&](std::int64_t i) { y[static_cast<std::size_t>(i)] += alpha * x[static_cast<std::size_t>(i)]; });
}

namespace ref {
void phase_multiply(WaveFunction& psi, const ScalarField& phase, double scale) {
  for (std::size_t i = 0; i < psi.v.size(); ++i) {
    const double p = scale * phase.v[i];
    psi.v[i] *= cplx(std::cos(p), std::sin(p));
  }
}
void cmul(std::vector<cplx>& x, const std::vector<cplx>& factor) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] *= factor[i];
}
void axpy(std::vector<cplx>& y, cplx alpha, const std::vector<cplx>& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}
cplx inner_product(const WaveFunction& a, const WaveFunction& b) {
  const cplx s = ref::serial_sum_c(a.grid.size(), [&](std::int64_t i) {
    return std::conj(a.v[static_cast<std::size_t>(i)]) * b.v[static_cast<std::size_t>(i)];
  });
  return s * a.grid.cell_volume();
}
}  // namespace ref

// ---- spectral calculus ----

static void derivative_axis(const Grid& g, std::vector<cplx>& spec, int axis) {
  // multiply spectrum by i*kappa_axis
  parallel_for(g.size(), [&](std::int64_t i) {
    std::array<int, 3> idx{};
    g.unravel(i, idx);
    const double k = g.kappa(axis, idx[static_cast<std::size_t>(axis)]);
    spec[static_cast<std::size_t>(i)] *= cplx(0.0, k);
  });
}

VectorField spectral_gradient(const ScalarField& f) {
  const Grid& g = f.grid;
  std::vector<cplx> base(static_cast<std::size_t>(g.size()));
  parallel_for(g.size(), [&](std::int64_t i) { base[static_cast<std::size_t>(i)] = f.v[static_cast<std::size_t>(i)]; });
  fft_forward_inplace(g, base);
  VectorField out(g);
  for (int a = 0; a < g.d; ++a) {
    std::vector<cplx> spec = base;
    derivative_axis(g, spec, a);
    fft_inverse_inplace(g, spec);
    parallel_for(g.size(), [&](std::int64_t i) {
      out.comp[static_cast<std::size_t>(a)].v[static_cast<std::size_t>(i)] = spec[static_cast<std::size_t>(i)].real();
    });
  }
  return out;
}

ScalarField spectral_divergence(const VectorField& f) {
  const Grid& g = f.grid;
  ScalarField out(g);
  for (int a = 0; a < g.d; ++a) {
    std::vector<cplx> spec(static_cast<std::size_t>(g.size()));
    parallel_for(g.size(), [&](std::int64_t i) {
      spec[static_cast<std::size_t>(i)] = f.comp[static_cast<std::size_t>(a)].v[static_cast<std::size_t>(i)];
    });
    fft_forward_inplace(g, spec);
    derivative_axis(g, spec, a);
    fft_inverse_inplace(g, spec);
    parallel_for(g.size(), [&](std::int64_t i) {
      out.v[static_cast<std::size_t>(i)] += spec[static_cast<std::size_t>(i)].real();
    });
  }
  return out;
}

ScalarField spectral_laplacian(const ScalarField& f) {
  const Grid& g = f.grid;
  std::vector<cplx> spec(static_cast<std::size_t>(g.size()));
  parallel_for(g.size(), [&](std::int64_t i) { spec[static_cast<std::size_t>(i)] = f.v[static_cast<std::size_t>(i)]; });
  fft_forward_inplace(g, spec);
  parallel_for(g.size(), [&](std::int64_t i) {
    std::array<int, 3> idx{};
    g.unravel(i, idx);
    double k2 = 0.0;
    for (int a = 0; a < g.d; ++a) {
      const double k = g.kappa(a, idx[static_cast<std::size_t>(a)]);
      k2 += k * k;
    }
    spec[static_cast<std::size_t>(i)] *= -k2;
  });
  fft_inverse_inplace(g, spec);
  ScalarField out(g);
  parallel_for(g.size(), [&](std::int64_t i) { out.v[static_cast<std::size_t>(i)] = spec[static_cast<std::size_t>(i)].real(); });
  return out;
}

void spectral_gradient(const WaveFunction& psi, std::array<WaveFunction, 3>& out) {
  const Grid& g = psi.grid;
  std::vector<cplx> base;
  fft_forward(g, psi.v, base);
  for (int a = 0; a < g.d; ++a) {
    out[static_cast<std::size_t>(a)] = WaveFunction(g);
    std::vector<cplx> spec = base;
    derivative_axis(g, spec, a);
    fft_inverse_inplace(g, spec);
    out[static_cast<std::size_t>(a)].v = std::move(spec);
  }
}

WaveFunction spectral_partial(const WaveFunction& psi, int axis) {
  const Grid& g = psi.grid;
  WaveFunction out(g);
  fft_forward(g, psi.v, out.v);
  derivative_axis(g, out.v, axis);
  fft_inverse_inplace(g, out.v);
  return out;
}

WaveFunction spectral_laplacian(const WaveFunction& psi) {
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
    out.v[static_cast<std::size_t>(i)] *= -k2;
  });
  fft_inverse_inplace(g, out.v);
  return out;
}

// ---- sampling ----

ScalarField sample(const Grid& g, const std::function<double(const std::array<double, 3>&)>& f) {
  ScalarField out(g);
  parallel_for(g.size(), [&](std::int64_t i) {
    std::array<double, 3> x{};
    g.point(i, x);
    out.v[static_cast<std::size_t>(i)] = f(x);
  });
  return out;
}

WaveFunction sample_c(const Grid& g, const std::function<cplx(const std::array<double, 3>&)>& f) {
  WaveFunction out(g);
  parallel_for(g.size(), [&](std::int64_t i) {
    std::array<double, 3> x{};
    g.point(i, x);
    out.v[static_cast<std::size_t>(i)] = f(x);
  });
  return out;
}

// ---- Gaussians, moments, window ----

WaveFunction gaussian_state(const Grid& g, const GaussianParams& p, double tol) {
  if (g.domain != Domain::Line) throw std::invalid_argument("gaussian_state: Line grid required");
  if (!(p.a > 0.0)) throw std::invalid_argument("gaussian_state: a must be positive");
  WaveFunction psi = sample_c(g, [&](const std::array<double, 3>& x) {
    double r2 = 0.0;
    for (int a = 0; a < g.d; ++a) r2 += x[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
    const cplx e = cplx(0.0, p.theta) - cplx(p.a, p.b) * r2;
    return std::exp(e);
  });
  normalize(psi);
  const double bm = boundary_mass(psi);
  if (bm > tol) throw std::invalid_argument("gaussian_state: boundary-mass violation");
  return psi;
}

double boundary_mass(const WaveFunction& psi, double frac) {
  const Grid& g = psi.grid;
  if (g.domain == Domain::Torus) return 0.0;
  const double thresh = (1.0 - frac) * g.L;
  const double total = parallel_sum(g.size(), [&](std::int64_t i) {
    return std::norm(psi.v[static_cast<std::size_t>(i)]);
  });
  const double outer = parallel_sum(g.size(), [&](std::int64_t i) {
    std::array<double, 3> x{};
    g.point(i, x);
    bool edge = false;
    for (int a = 0; a < g.d; ++a)
      if (std::abs(x[static_cast<std::size_t>(a)]) > thresh) edge = true;
    return edge ? std::norm(psi.v[static_cast<std::size_t>(i)]) : 0.0;
  });
  return total > 0.0 ? outer / total : 0.0;
}

double mean_coord(const WaveFunction& psi, int axis) {
  const Grid& g = psi.grid;
  const double w = parallel_sum(g.size(), [&](std::int64_t i) {
    std::array<double, 3> x{};
    g.point(i, x);
    return x[static_cast<std::size_t>(axis)] * std::norm(psi.v[static_cast<std::size_t>(i)]);
  });
  const double total = parallel_sum(g.size(), [&](std::int64_t i) {
    return std::norm(psi.v[static_cast<std::size_t>(i)]);
  });
  return w / total;
}

double mean_r2(const WaveFunction& psi) {
  const Grid& g = psi.grid;
  const double w = parallel_sum(g.size(), [&](std::int64_t i) {
    std::array<double, 3> x{};
    g.point(i, x);
    double r2 = 0.0;
    for (int a = 0; a < g.d; ++a) r2 += x[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
    return r2 * std::norm(psi.v[static_cast<std::size_t>(i)]);
  });
  const double total = parallel_sum(g.size(), [&](std::int64_t i) {
    return std::norm(psi.v[static_cast<std::size_t>(i)]);
  });
  return w / total;
}

static double smootherstep01(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

ScalarField smooth_window(const Grid& g) {
  ScalarField w(g);
  if (g.domain == Domain::Torus) {
    parallel_for(g.size(), [&](std::int64_t i) { w.v[static_cast<std::size_t>(i)] = 1.0; });
    return w;
  }
  parallel_for(g.size(), [&](std::int64_t i) {
    std::array<double, 3> x{};
    g.point(i, x);
    double val = 1.0;
    for (int a = 0; a < g.d; ++a) {
      const double t = (0.95 * g.L - std::abs(x[static_cast<std::size_t>(a)])) / (0.05 * g.L);
      val *= smootherstep01(t);
    }
    w.v[static_cast<std::size_t>(i)] = val;
  });
  return w;
}

// ---- trigonometric interpolation ----

TrigInterp::TrigInterp(const WaveFunction& psi) : grid_(psi.grid) {
  fft_forward(grid_, psi.v, spec_);
  const double inv = 1.0 / static_cast<double>(grid_.size());
  for (auto& c : spec_) c *= inv;
}

namespace {
// per-axis phase table e^{i * base_freq(k) * (x - origin)} for all bins
void fill_axis_table(const Grid& g, int axis, double x, std::vector<cplx>& tab) {
  const int N = g.n[static_cast<std::size_t>(axis)];
  tab.resize(static_cast<std::size_t>(N));
  const double base = g.domain == Domain::Torus ? 1.0 : 3.141592653589793238 / g.L;
  const double dx = x - g.origin(axis);
  const cplx w = std::exp(cplx(0.0, base * dx));
  const cplx winv = std::conj(w) / std::norm(w);  // exact-ish inverse
  tab[0] = 1.0;
  for (int k = 1; k <= (N - 1) / 2; ++k) tab[static_cast<std::size_t>(k)] = tab[static_cast<std::size_t>(k - 1)] * w;
  // negative bins stored at indices N-1 downward
  cplx cur = 1.0;
  for (int k = 1; k <= N / 2; ++k) {
    cur *= winv;
    tab[static_cast<std::size_t>(N - k)] = cur;
  }
}
}  // namespace

cplx TrigInterp::eval(const std::array<double, 3>& x) const {
  std::vector<cplx> tabs[3];
  for (int a = 0; a < grid_.d; ++a) fill_axis_table(grid_, a, x[static_cast<std::size_t>(a)], tabs[a]);
  cplx s = 0.0;
  std::array<int, 3> idx{};
  const std::int64_t n = grid_.size();
  for (std::int64_t i = 0; i < n; ++i) {
    grid_.unravel(i, idx);
    cplx ph = spec_[static_cast<std::size_t>(i)];
    for (int a = 0; a < grid_.d; ++a) ph *= tabs[a][static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
    s += ph;
  }
  return s;
}

void TrigInterp::eval_many(const std::vector<std::array<double, 3>>& pts, std::vector<cplx>& out) const {
  out.resize(pts.size());
  const std::int64_t np = static_cast<std::int64_t>(pts.size());
  const std::int64_t block = 64;
  const std::int64_t nb = (np + block - 1) / block;
  parallel_for(nb, [&](std::int64_t b) {
    std::vector<cplx> tabs[3];
    std::array<int, 3> idx{};
    const std::int64_t lo = b * block, hi = std::min(np, lo + block);
    for (std::int64_t p = lo; p < hi; ++p) {
      for (int a = 0; a < grid_.d; ++a)
        fill_axis_table(grid_, a, pts[static_cast<std::size_t>(p)][static_cast<std::size_t>(a)], tabs[a]);
      cplx s = 0.0;
      const std::int64_t n = grid_.size();
      for (std::int64_t i = 0; i < n; ++i) {
        grid_.unravel(i, idx);
        cplx ph = spec_[static_cast<std::size_t>(i)];
        for (int a = 0; a < grid_.d; ++a) ph *= tabs[a][static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
        s += ph;
      }
      out[static_cast<std::size_t>(p)] = s;
    }
  });
}

void TrigInterp::eval_many_serial_ref(const std::vector<std::array<double, 3>>& pts,
                                      std::vector<cplx>& out) const {
  out.resize(pts.size());
  for (std::size_t p = 0; p < pts.size(); ++p) out[p] = eval(pts[p]);
}

// ---- snapshots ----

namespace {
void put_u32(FILE* f, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  std::fwrite(b, 1, 4, f);
}
std::uint32_t get_u32(FILE* f) {
  unsigned char b[4];
  if (std::fread(b, 1, 4, f) != 4) throw std::runtime_error("snapshot: truncated");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}
void put_f64(FILE* f, double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
  std::fwrite(b, 1, 8, f);
}
double get_f64(FILE* f) {
  unsigned char b[8];
  if (std::fread(b, 1, 8, f) != 8) throw std::runtime_error("snapshot: truncated");
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}
}  // namespace

void write_snapshot(const std::string& path, const WaveFunction& psi) {
  FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("snapshot: cannot open " + path);
  std::fwrite("MSWF1", 1, 5, f);
  const unsigned char dom = psi.grid.domain == Domain::Torus ? 0 : 1;
  const unsigned char d = static_cast<unsigned char>(psi.grid.d);
  std::fwrite(&dom, 1, 1, f);
  std::fwrite(&d, 1, 1, f);
  for (int a = 0; a < psi.grid.d; ++a) put_u32(f, static_cast<std::uint32_t>(psi.grid.n[static_cast<std::size_t>(a)]));
  put_f64(f, psi.grid.L);
  for (const cplx& c : psi.v) {
    put_f64(f, c.real());
    put_f64(f, c.imag());
  }
  std::fclose(f);
}

WaveFunction read_snapshot(const std::string& path) {
  FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("snapshot: cannot open " + path);
  char magic[5];
  if (std::fread(magic, 1, 5, f) != 5 || std::memcmp(magic, "MSWF1", 5) != 0) {
    std::fclose(f);
    throw std::runtime_error("snapshot: bad magic");
  }
  unsigned char dom, d;
  if (std::fread(&dom, 1, 1, f) != 1 || std::fread(&d, 1, 1, f) != 1) {
    std::fclose(f);
    throw std::runtime_error("snapshot: truncated header");
  }
  Grid g;
  g.domain = dom == 0 ? Domain::Torus : Domain::Line;
  g.d = d;
  try {
    for (int a = 0; a < g.d; ++a) g.n[static_cast<std::size_t>(a)] = static_cast<int>(get_u32(f));
    g.L = get_f64(f);
    WaveFunction psi(g);
    for (auto& c : psi.v) {
      const double re = get_f64(f);
      const double im = get_f64(f);
      c = cplx(re, im);
    }
    std::fclose(f);
    return psi;
  } catch (...) {
    std::fclose(f);
    throw;
  }
}

}  // namespace magctrl
