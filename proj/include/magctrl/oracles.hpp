#pragma once
#include "magctrl/system.hpp"

namespace magctrl {

// Reference actions of the target operators, used as ground truth in the
// convergence studies. Each preserves the L2 norm up to discretization.

// psi <- e^{i scale phi} psi
WaveFunction apply_phase(const WaveFunction& psi, const ScalarField& phi,
                         double scale = 1.0);

// e^{i delta |x|^2}
WaveFunction apply_quadratic_phase(const WaveFunction& psi, double delta);

// (D_alpha psi)(x) = alpha^{d/2} psi(alpha x), alpha > 0; line grids only
WaveFunction apply_dilation(const WaveFunction& psi, double alpha);

// e^{i sigma laplacian}: spectral multiplier e^{-i sigma kappa^2}
WaveFunction apply_free_evolution(const WaveFunction& psi, double sigma);

// e^{-i sigma (-laplacian + |x|^2)} by dense eigendecomposition (cached per
// grid); line grids with at most 4096 points
WaveFunction apply_harmonic_evolution(const WaveFunction& psi, double sigma);

// psi(x + u e_axis): spectral multiplier e^{i kappa_axis u}
WaveFunction apply_translation(const WaveFunction& psi, int axis, double u);

// e^{t T_f} with T_f = <f, grad> + (1/2) div f and f = 2 grad phi:
// (e^{t T_f} psi)(x) = psi(y(t)) exp((1/2) int_0^t div f(y(s)) ds) along the
// characteristic y' = f(y), y(0) = x. Fourth-order Runge-Kutta per grid
// point; substeps = 0 picks ceil(64 t max|f| / min_spacing), at least 8.
WaveFunction apply_transport(const WaveFunction& psi, const ScalarField& phi,
                             double t, int substeps = 0);

// Same flow with the extra line-integral factor
// exp(-2i int_0^t <A, grad phi>(y(s)) ds).
WaveFunction apply_twisted_transport(const ControlSystem& sys,
                                     const WaveFunction& psi,
                                     const ScalarField& phi, double t,
                                     int substeps = 0);

}  // namespace magctrl
