#pragma once
#include "magctrl/schedule.hpp"
#include "magctrl/system.hpp"

namespace magctrl {

enum class Method { Auto, DenseEig, Krylov };
enum class KickMode { Ideal, Pulsed };

struct EvolveInfo {
  int substeps = 0;
  int max_dim = 0;          // largest Krylov subspace used
  double err_estimate = 0;  // summed a-posteriori estimates
  bool used_dense = false;
};

// psi <- e^{-i tau H(u)} psi. Auto picks the dense path when the grid has at
// most 1024 points (eigendecompositions are cached per (system, u) with u
// rounded to 12 significant digits), Lanczos with full reorthogonalization
// otherwise; per-segment tolerance 1e-9.
void evolve_constant(const ControlSystem& sys, const std::vector<double>& u,
                     double tau, WaveFunction& psi, Method method = Method::Auto,
                     EvolveInfo* info = nullptr);

void clear_eig_cache();
std::size_t eig_cache_entries();

struct ExecOptions {
  Method method = Method::Auto;
  KickMode kick_mode = KickMode::Ideal;
  double eps_kick = 1e-3;  // pulse length per kick in pulsed mode
};

struct ExecInfo {
  double norm_drift_max = 0.0;   // max over segments of | ||psi|| - 1 |
  double evolve_time = 0.0;      // physical time actually integrated
  double global_phase = 0.0;     // accumulated explicit global phase
  int segments = 0;
};

// Runs the schedule left to right. Ideal mode applies kicks as exact phase
// multiplications; pulsed mode replaces each kick with a burst
// e^{-i eps H(-c/eps)} and refuses kicks that carry no span coefficients.
WaveFunction execute(const ControlSystem& sys, const Schedule& sched,
                     const WaveFunction& psi0, const ExecOptions& opts = {},
                     ExecInfo* info = nullptr);

}  // namespace magctrl
