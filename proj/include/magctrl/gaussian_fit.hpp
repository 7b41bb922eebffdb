#pragma once
#include "magctrl/state.hpp"

namespace magctrl {

struct GaussianFit {
  GaussianParams params;
  double residual = 0.0;   // projective distance to the fitted Gaussian
  int iterations = 0;
  bool converged = false;
};

// Nearest centered Gaussian e^{i theta} e^{-(a+ib)|x|^2} in projective
// distance. Moment initialization (<|x|^2> = d/(4a), chirp from the phase
// current), then damped Newton on (a,b); max 200 iterations, step tol 1e-12.
GaussianFit fit_gaussian(const WaveFunction& psi);

}  // namespace magctrl
