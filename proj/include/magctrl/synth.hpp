#pragma once
#include "magctrl/schedule.hpp"
#include "magctrl/system.hpp"
#include "magctrl/target.hpp"

namespace magctrl {

// Budget knobs for schedule compilation. tau is the short-time budget of a
// single primitive block and the main convergence knob: every compiled
// schedule approaches its target as tau -> 0. n is the splitting resolution
// of the Trotterized constructions; split contracts the budget handed to
// nested sub-schedules so their error stays subordinate. eps_kick only
// enters the reported duration of a pulsed-kick realization.
struct SynthParams {
  double tau = 1e-3;
  int n = 8;
  double split = 0.1;
  double eps_kick = 1e-3;
  // Compression factor of the free-evolution route, in (0,1). It stays fixed
  // while tau refines the realization: the two limits are separate knobs.
  double squeeze = 0.5;

  SynthParams scaled(double f) const {
    SynthParams q = *this;
    q.tau *= f;
    return q;
  }
};

// e^{i delta |x|^2} by one resonant burst of the quadratic control
Schedule synth_quadratic_phase(const ControlSystem& sys, double delta,
                               const SynthParams& p);
// (D_alpha psi)(x) = alpha^{d/2} psi(alpha x): inverted-oscillator sandwich
Schedule synth_dilation(const ControlSystem& sys, double alpha,
                        const SynthParams& p);
// e^{i sigma laplacian}, sigma > 0: a flight of length sigma runs in physical
// time sigma*squeeze by conjugating with dilations; the kinetic spreading
// accumulated during the dilation sandwiches is absorbed into the commanded
// flight length
Schedule synth_free_evolution(const ControlSystem& sys, double sigma,
                              const SynthParams& p);
// e^{-i sigma (-laplacian + |x|^2)}, sigma > 0: split into quadratic phases
// and free flights
Schedule synth_harmonic_evolution(const ControlSystem& sys, double sigma,
                                  const SynthParams& p);
// psi(x + u e_axis): momentum kick sandwich; with strip_field the residual
// field factor picked up per step is cancelled by windowed kicks
Schedule synth_translation(const ControlSystem& sys, int axis, double u,
                           const SynthParams& p, bool strip_field = true);
// e^{-i |grad phi|^2} from phases growing like 1/sqrt(tau)
Schedule synth_grad_square(const ControlSystem& sys, const std::string& phi_expr,
                           const SynthParams& p);
// e^{-i d_axis phi} by conjugating a short translation with phases ~ 1/tau.
// The inner flight runs on a split*tau^2 budget: the conjugation squares the
// 1/tau phase against any second-order exposure, so the budget must shrink
// faster than tau^2 times constants for the residue to vanish; the one
// amplified term that survives is a pure |grad phi|^2 phase, cancelled by a
// closing kick. The momentum kick grows like 1/(split*tau), which bounds how
// far a ladder can refine tau on a fixed grid.
Schedule synth_partial_phase(const ControlSystem& sys, int axis,
                             const PhaseSpec& spec, const SynthParams& p);
// e^{t T_f}, f = 2 grad phi. Without stripping the schedule carries the
// field line-integral factor and approximates the twisted flow instead.
Schedule synth_gradient_flow(const ControlSystem& sys, const PhaseSpec& spec,
                             double t, const SynthParams& p, bool strip_field);

// Compiles any admissible target into a control schedule; composition
// children are emitted so the last-listed child acts first.
Schedule compile(const TargetPtr& target, const ControlSystem& sys,
                 const SynthParams& p);

}  // namespace magctrl
