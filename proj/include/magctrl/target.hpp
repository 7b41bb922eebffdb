#pragma once
#include <memory>
#include <string>
#include <vector>

#include "magctrl/hermite.hpp"
#include "magctrl/oracles.hpp"
#include "magctrl/system.hpp"
#include "magctrl/trigpoly.hpp"

namespace magctrl {

// Phase functions carried by target operators come in three forms. The two
// structured forms keep an exact symbolic representation used for synthesis;
// the sampled form is an arbitrary expression realized as a single kick.
enum class PhaseForm { Trig, Hermite, Sampled };

struct PhaseSpec {
  PhaseForm form = PhaseForm::Sampled;
  int d = 1;
  TrigPoly trig;
  GaussHermite herm;
  std::string text;  // source expression, kept for round trips and reports

  static PhaseSpec from_trig(const std::string& expr, int d);
  static PhaseSpec from_hermite(const std::string& expr, int d);
  static PhaseSpec from_sampled(const std::string& expr, int d);
};

ScalarField sample_phase(const Grid& g, const PhaseSpec& spec);
// d/dx_axis of the phase; exact for the structured forms, spectral otherwise
ScalarField sample_phase_partial(const Grid& g, const PhaseSpec& spec, int axis);
// |grad phi|^2, from the partials above
ScalarField sample_phase_grad_square(const Grid& g, const PhaseSpec& spec);

enum class TargetKind {
  Phase,           // e^{i phi}
  QuadraticPhase,  // e^{i delta |x|^2}
  Dilation,        // (D_alpha psi)(x) = alpha^{d/2} psi(alpha x)
  FreeEvo,         // e^{i sigma laplacian}
  HarmonicEvo,     // e^{-i sigma (-laplacian + |x|^2)}
  Translation,     // psi(x + u e_axis)
  GradSquarePhase, // e^{-i |grad phi|^2}
  PartialPhase,    // e^{-i d_axis phi}
  GradientFlow,    // e^{t T_f}, f = 2 grad phi
  TwistedGradientFlow,  // same flow with the field line-integral factor
  Compose,         // children compose; the last-listed child acts first
};

struct TargetOp;
using TargetPtr = std::shared_ptr<const TargetOp>;

struct TargetOp {
  TargetKind kind = TargetKind::Compose;
  PhaseSpec phase;
  double value = 0.0;  // delta | alpha | sigma | u | t, by kind
  int axis = 0;
  std::vector<TargetPtr> children;

  static TargetPtr make_phase(PhaseSpec spec);
  static TargetPtr quadratic_phase(double delta);
  static TargetPtr dilation(double alpha);
  static TargetPtr free_evo(double sigma);
  static TargetPtr harmonic_evo(double sigma);
  static TargetPtr translation(int axis, double u);
  static TargetPtr grad_square_phase(PhaseSpec spec);
  static TargetPtr partial_phase(int axis, PhaseSpec spec);
  static TargetPtr gradient_flow(PhaseSpec spec, double t);
  static TargetPtr twisted_gradient_flow(PhaseSpec spec, double t);
  static TargetPtr compose(std::vector<TargetPtr> children);
};

// Grammar:  op := name '(' arg {',' arg} ')'
//           arg := op | number | form ':' '"' expression '"'
// with names compose, phase, qphase, dilation, freeevo, harmonic, translate,
// gradsq, partial, flow, twistedflow and forms trig, hermite, expr.
// Axis arguments are 1-based in the text.
TargetPtr parse_target(const std::string& text, int d);
std::string target_to_string(const TargetOp& op);

// Throws with a reason when the operator cannot be compiled for the system
// (wrong domain, wrong control family, axis out of range).
void check_admissible(const TargetOp& op, const ControlSystem& sys);

// Ground-truth action used by the convergence studies.
WaveFunction apply_target_oracle(const TargetOp& op, const ControlSystem& sys,
                                 const WaveFunction& psi);

}  // namespace magctrl
