#pragma once
#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace magctrl {

using cplx = std::complex<double>;

enum class Domain : std::uint8_t { Torus = 0, Line = 1 };

// Uniform periodic grid. Torus: [0,2pi)^d, spacing 2pi/N. Line: the box
// [-L,L)^d treated periodically; states must keep negligible boundary mass.
// Storage is row-major, axis 0 slowest. Frequencies use standard FFT bin
// ordering; the Nyquist bin is treated as frequency zero in every derivative
// multiplier so that first derivatives of real fields stay real and
// laplacian == divergence(gradient) exactly.
struct Grid {
  Domain domain = Domain::Torus;
  int d = 1;
  std::array<int, 3> n = {1, 1, 1};
  double L = 0.0;  // Line half-width; unused for Torus

  static Grid torus(int d, int n_per_axis);
  static Grid line(int d, int n_per_axis, double L);

  std::int64_t size() const {
    std::int64_t s = 1;
    for (int a = 0; a < d; ++a) s *= n[static_cast<std::size_t>(a)];
    return s;
  }
  double spacing(int axis) const {
    const double period = domain == Domain::Torus ? 6.283185307179586477 : 2.0 * L;
    return period / n[static_cast<std::size_t>(axis)];
  }
  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < d; ++a) v *= spacing(a);
    return v;
  }
  double min_spacing() const {
    double v = spacing(0);
    for (int a = 1; a < d; ++a) v = std::min(v, spacing(a));
    return v;
  }
  double origin(int) const { return domain == Domain::Torus ? 0.0 : -L; }
  double period() const { return domain == Domain::Torus ? 6.283185307179586477 : 2.0 * L; }

  double coord(int axis, int idx) const { return origin(axis) + spacing(axis) * idx; }

  // signed FFT bin frequency: {0,1,...,N/2-1, -N/2,...,-1}
  int bin_freq(int axis, int idx) const {
    const int N = n[static_cast<std::size_t>(axis)];
    return idx <= (N - 1) / 2 ? idx : idx - N;
  }
  // derivative multiplier (the Nyquist bin is zeroed)
  double kappa(int axis, int idx) const {
    const int N = n[static_cast<std::size_t>(axis)];
    if (N % 2 == 0 && idx == N / 2) return 0.0;
    const double base = domain == Domain::Torus ? 1.0 : 3.141592653589793238 / L;
    return base * bin_freq(axis, idx);
  }
  double kappa_max(int axis) const {
    const int N = n[static_cast<std::size_t>(axis)];
    const double base = domain == Domain::Torus ? 1.0 : 3.141592653589793238 / L;
    return base * (N / 2);
  }

  void unravel(std::int64_t flat, std::array<int, 3>& idx) const {
    for (int a = d - 1; a >= 0; --a) {
      const int N = n[static_cast<std::size_t>(a)];
      idx[static_cast<std::size_t>(a)] = static_cast<int>(flat % N);
      flat /= N;
    }
  }
  std::int64_t ravel(const std::array<int, 3>& idx) const {
    std::int64_t f = 0;
    for (int a = 0; a < d; ++a) f = f * n[static_cast<std::size_t>(a)] + idx[static_cast<std::size_t>(a)];
    return f;
  }
  void point(std::int64_t flat, std::array<double, 3>& x) const {
    std::array<int, 3> idx{};
    unravel(flat, idx);
    for (int a = 0; a < d; ++a) x[static_cast<std::size_t>(a)] = coord(a, idx[static_cast<std::size_t>(a)]);
  }

  bool operator==(const Grid& o) const {
    return domain == o.domain && d == o.d && n == o.n && L == o.L;
  }
  std::string describe() const;
};

struct ScalarField {
  Grid grid;
  std::vector<double> v;
  ScalarField() = default;
  explicit ScalarField(const Grid& g) : grid(g), v(static_cast<std::size_t>(g.size()), 0.0) {}
  double& operator[](std::int64_t i) { return v[static_cast<std::size_t>(i)]; }
  double operator[](std::int64_t i) const { return v[static_cast<std::size_t>(i)]; }
};

struct VectorField {
  Grid grid;
  std::array<ScalarField, 3> comp;  // comp[0..d-1]
  VectorField() = default;
  explicit VectorField(const Grid& g) : grid(g) {
    for (int a = 0; a < g.d; ++a) comp[static_cast<std::size_t>(a)] = ScalarField(g);
  }
};

struct WaveFunction {
  Grid grid;
  std::vector<cplx> v;
  WaveFunction() = default;
  explicit WaveFunction(const Grid& g) : grid(g), v(static_cast<std::size_t>(g.size()), cplx{}) {}
  cplx& operator[](std::int64_t i) { return v[static_cast<std::size_t>(i)]; }
  cplx operator[](std::int64_t i) const { return v[static_cast<std::size_t>(i)]; }
};

}  // namespace magctrl
