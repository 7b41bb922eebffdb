#pragma once
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "magctrl/grid.hpp"

namespace magctrl {

// H(u) = -laplacian_A + V + sum_j u_j W_j, with
// -laplacian_A = (-i grad - A)^2 applied as the minimal-coupling composition.
enum class SystemKind { TorusTrig, LineDipole, QuadraticR, Custom };

struct ControlSystem {
  SystemKind kind = SystemKind::Custom;
  Grid grid;

  VectorField A;
  ScalarField divA;  // analytic override when given, else spectral
  ScalarField A2;    // |A|^2 pointwise
  bool has_A = false;

  ScalarField V;
  bool has_V = false;

  std::vector<ScalarField> W;

  // closed-form descriptors for serialization and reports ("" = zero)
  std::array<std::string, 3> A_expr = {"", "", ""};
  std::string V_expr;
  std::vector<std::string> W_expr;

  std::uint64_t id = 0;  // unique per constructed system; eigencache key

  int m() const { return static_cast<int>(W.size()); }
};

// Torus controls: W = (sin<b_1,x>, cos<b_1,x>, ..., sin<b_d,x>, cos<b_d,x>),
// m = 2d. Base frequencies: unit vectors e_1..e_{d-1} plus the all-ones
// vector.
std::vector<std::array<int, 3>> torus_base_freqs(int d);
ControlSystem make_torus_trig(int d, int n_per_axis,
                              const std::array<std::string, 3>& A_expr = {"", "", ""},
                              const std::string& V_expr = "");

// Line controls: W_j = x_j for j = 1..d plus W_{d+1} = exp(-|x|^2/2), m = d+1.
ControlSystem make_line_dipole(int d, int n_per_axis, double L,
                               const std::array<std::string, 3>& A_expr = {"", "", ""},
                               const std::string& V_expr = "");

// Line controls: W_1 = |x|^2 plus an optional bounded W_2; m = 2 (1 when the
// second expression is empty).
ControlSystem make_quadratic_r(int d, int n_per_axis, double L,
                               const std::string& W2_expr = "",
                               const std::array<std::string, 3>& A_expr = {"", "", ""},
                               const std::string& V_expr = "");

ControlSystem make_custom(const Grid& g,
                          const std::array<std::string, 3>& A_expr,
                          const std::string& V_expr,
                          const std::vector<std::string>& W_expr);

// From pre-sampled fields; pass an empty-grid field to mean zero.
ControlSystem make_custom_fields(const Grid& g, const VectorField& A,
                                 const ScalarField& V,
                                 const std::vector<ScalarField>& W,
                                 const std::string& divA_expr = "");

// Replaces the spectrally computed divergence (needed when A has sawtooth
// periodic extension on a line grid).
void set_analytic_divA(ControlSystem& sys, const std::string& expr);

WaveFunction apply_hamiltonian(const ControlSystem& sys,
                               const std::vector<double>& u,
                               const WaveFunction& psi);
// Expanded form -lap + |A|^2 + i divA + 2i<A,grad .> + V + sum u W, kept as a
// cross-check of the minimal-coupling path.
WaveFunction apply_hamiltonian_expanded(const ControlSystem& sys,
                                        const std::vector<double>& u,
                                        const WaveFunction& psi);

// Spectral-radius style bound on the spread of H(u); drives substep choice.
double hamiltonian_spread_bound(const ControlSystem& sys,
                                const std::vector<double>& u);

struct TangencyReport {
  bool tangent = true;
  double max_abs = 0.0;  // max over the grid of |<A(x), x>|
};
TangencyReport validate_tangency(const ControlSystem& sys, double tol = 1e-10);

}  // namespace magctrl
