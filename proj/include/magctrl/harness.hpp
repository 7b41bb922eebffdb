#pragma once
#include "magctrl/config.hpp"
#include "magctrl/emit.hpp"

namespace magctrl {

// Each runner builds a Report from the configuration, recomputes its pass
// flags from the rows it just produced, echoes the effective configuration,
// and writes the formats requested by run.formats into run.out (skipped when
// run.out is empty). Failures inside a sweep land in the row's note; domain
// errors in the setup throw.

// Compile -> execute -> compare-to-oracle sweep over sweep.tau (optionally
// zipped with sweep.n); fits the order in tau. run.kick_mode=pulsed:tau ties
// the pulse length of every kick to the row's tau.
Report run_convergence(const ExperimentConfig& cfg);

// Dual-path generator identities evaluated on random smooth states at the
// discrete level: chirp conjugation of the drift against the expanded
// generator, the translation conjugation with and without a field, the
// dilation conjugation with tangent and non-tangent fields, and the
// compressed-flight residual slope.
Report run_identity_checks(const ExperimentConfig& cfg);

// Product-formula order in 1/n on exact factors: quadratic-phase/free-flight
// splitting against the harmonic evolution, and field-factor stripping
// against the flat translation; n in sweep.n.
Report run_trotter(const ExperimentConfig& cfg);

// Seeded random quadratic-control schedules on the uniform-field system must
// keep the state on the Gaussian manifold; a bounded non-quadratic pulse
// must push it off. Rows: per-seed fit residuals plus the zero-duration and
// contrast cases.
Report run_obstruction(const ExperimentConfig& cfg);

// Composite target compiled at a ladder of budgets eps with the schedule's
// physical time arranged to equal eps exactly; rows are (eps, T_total,
// error) plus an identity-target control row.
Report run_small_time_demo(const ExperimentConfig& cfg);

// Certificate coverage: every low-frequency trigonometric target and every
// Hermite profile up to the configured degree must certify within the depth
// cap and agree with its certificate on the grid.
Report run_saturate_suite(const ExperimentConfig& cfg);

}  // namespace magctrl
