#pragma once
#include <array>
#include <functional>
#include <string>

#include "magctrl/grid.hpp"

namespace magctrl {

// ---- L2 structure (cell-volume weighted) ----
cplx inner_product(const WaveFunction& a, const WaveFunction& b);
double norm(const WaveFunction& a);
void normalize(WaveFunction& a);
// min over global phase of ||a - e^{i t} b||, both assumed unit
double projective_distance(const WaveFunction& a, const WaveFunction& b);
double l2_distance(const WaveFunction& a, const WaveFunction& b);

// ---- pointwise kernels (OpenMP; serial twins in magctrl::ref) ----
void phase_multiply(WaveFunction& psi, const ScalarField& phase, double scale);
void cmul(std::vector<cplx>& x, const std::vector<cplx>& factor);
void axpy(std::vector<cplx>& y, cplx alpha, const std::vector<cplx>& x);
namespace ref {
void phase_multiply(WaveFunction& psi, const ScalarField& phase, double scale);
void cmul(std::vector<cplx>& x, const std::vector<cplx>& factor);
void axpy(std::vector<cplx>& y, cplx alpha, const std::vector<cplx>& x);
cplx inner_product(const WaveFunction& a, const WaveFunction& b);
}  // namespace ref

// ---- spectral calculus (Nyquist-zeroed multipliers, see grid.hpp) ----
VectorField spectral_gradient(const ScalarField& f);
ScalarField spectral_divergence(const VectorField& f);
ScalarField spectral_laplacian(const ScalarField& f);
void spectral_gradient(const WaveFunction& psi, std::array<WaveFunction, 3>& out);
WaveFunction spectral_laplacian(const WaveFunction& psi);
WaveFunction spectral_partial(const WaveFunction& psi, int axis);

// ---- sampling ----
ScalarField sample(const Grid& g, const std::function<double(const std::array<double, 3>&)>& f);
WaveFunction sample_c(const Grid& g, const std::function<cplx(const std::array<double, 3>&)>& f);

// ---- Gaussian family (Line grids, centered) ----
struct GaussianParams {
  double a = 1.0;   // modulus width, > 0
  double b = 0.0;   // quadratic chirp
  double theta = 0.0;
};
// normalized sample of e^{i theta} e^{-(a+ib)|x|^2}; throws if a <= 0 or the
// boundary mass exceeds tol
WaveFunction gaussian_state(const Grid& g, const GaussianParams& p, double tol = 1e-8);

// mass fraction within frac of the box edge (any axis); 0 on the torus
double boundary_mass(const WaveFunction& psi, double frac = 0.05);

double mean_coord(const WaveFunction& psi, int axis);
double mean_r2(const WaveFunction& psi);

// smooth cutoff: 1 inside 90% of the box, 0 beyond 95% (Line); 1 on the torus
ScalarField smooth_window(const Grid& g);

// ---- trigonometric interpolation ----
// Evaluates the band-limited interpolant anywhere; grid points reproduce the
// stored values to roundoff (true FFT bin frequencies, including Nyquist).
class TrigInterp {
 public:
  explicit TrigInterp(const WaveFunction& psi);
  cplx eval(const std::array<double, 3>& x) const;
  void eval_many(const std::vector<std::array<double, 3>>& pts, std::vector<cplx>& out) const;
  void eval_many_serial_ref(const std::vector<std::array<double, 3>>& pts, std::vector<cplx>& out) const;
  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  std::vector<cplx> spec_;  // forward FFT / prod(N)
};

// ---- snapshot file format ----
// "MSWF1" | u8 domain | u8 d | u32 N per axis | f64 L | prod(N) (re,im) f64
// pairs, row-major, little-endian.
void write_snapshot(const std::string& path, const WaveFunction& psi);
WaveFunction read_snapshot(const std::string& path);

}  // namespace magctrl
