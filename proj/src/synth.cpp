#include "magctrl/synth.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "magctrl/expr.hpp"
#include "magctrl/parallel.hpp"
#include "magctrl/saturate.hpp"
#include "magctrl/state.hpp"

namespace magctrl {

namespace {

std::vector<double> zeros(const ControlSystem& sys) {
  return std::vector<double>(static_cast<std::size_t>(sys.m()), 0.0);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string scale_expr(double c, const std::string& e) {
  return fmt(c) + "*(" + e + ")";
}

// Builds the kick exactly the way a schedule reload does, so a round trip
// through the on-disk format reproduces the samples bit for bit.
Segment expr_kick(const ControlSystem& sys, const std::string& expr, bool windowed) {
  ScalarField phase = sample_expr(sys.grid, expr);
  if (windowed) {
    ScalarField w = smooth_window(sys.grid);
    parallel_for(sys.grid.size(), [&](std::int64_t i) {
      phase.v[static_cast<std::size_t>(i)] *= w.v[static_cast<std::size_t>(i)];
    });
  }
  return Segment::kick(std::move(phase), expr, windowed);
}

Segment sampled_kick(const Grid& g, const ScalarField& field, double scale, bool windowed) {
  ScalarField phase(g);
  if (windowed) {
    ScalarField w = smooth_window(g);
    parallel_for(g.size(), [&](std::int64_t i) {
      phase.v[static_cast<std::size_t>(i)] =
          scale * field.v[static_cast<std::size_t>(i)] * w.v[static_cast<std::size_t>(i)];
    });
  } else {
    parallel_for(g.size(), [&](std::int64_t i) {
      phase.v[static_cast<std::size_t>(i)] = scale * field.v[static_cast<std::size_t>(i)];
    });
  }
  return Segment::kick(std::move(phase));
}

void require_kind(const ControlSystem& sys, SystemKind kind, const char* what) {
  if (sys.kind != kind)
    throw std::invalid_argument(std::string("synth: ") + what +
                                " needs a different control family");
}

std::vector<double> span_coeffs(const ControlSystem& sys, int index, double c) {
  std::vector<double> v(static_cast<std::size_t>(sys.m()), 0.0);
  v[static_cast<std::size_t>(index)] = c;
  return v;
}

}  // namespace

Schedule synth_quadratic_phase(const ControlSystem& sys, double delta,
                               const SynthParams& p) {
  require_kind(sys, SystemKind::QuadraticR, "quadratic phase");
  Schedule s;
  if (delta == 0.0) return s;
  auto u = zeros(sys);
  u[0] = -delta / p.tau;
  s.append(Segment::evolve(p.tau, std::move(u)));
  return s;
}

Schedule synth_dilation(const ControlSystem& sys, double alpha,
                        const SynthParams& p) {
  require_kind(sys, SystemKind::QuadraticR, "dilation");
  if (!(alpha > 0.0)) throw std::invalid_argument("synth: dilation factor must be positive");
  Schedule s;
  if (alpha == 1.0) return s;
  const double lg = std::log(alpha);
  const double beta = lg / (4.0 * p.tau);
  auto u = zeros(sys);
  u[0] = -lg * lg / (4.0 * p.tau * p.tau);
  s.append(Segment::kick_span(sys, span_coeffs(sys, 0, -beta)));
  s.append(Segment::evolve(p.tau, std::move(u)));
  s.append(Segment::kick_span(sys, span_coeffs(sys, 0, beta)));
  return s;
}

Schedule synth_free_evolution(const ControlSystem& sys, double sigma,
                              const SynthParams& p) {
  require_kind(sys, SystemKind::QuadraticR, "free evolution");
  Schedule s;
  if (sigma == 0.0) return s;
  if (sigma < 0.0)
    throw std::invalid_argument(
        "synth: free evolution needs a nonnegative duration; this route only "
        "compresses forward flights");
  const double t = p.squeeze;
  if (!(t > 0.0 && t < 1.0))
    throw std::invalid_argument("synth: squeeze factor must lie in (0,1)");
  // Each dilation sandwich spends physical time tau, during which kinetic
  // spreading equivalent to an extra free flight of length 2*tau*(1/t-1)/|log t|
  // leaks into the product; shorten the commanded flight to absorb it.
  const double leak = 2.0 * p.tau * (1.0 / t - 1.0) / std::fabs(std::log(t));
  const double flight = std::max(sigma - leak, 0.05 * sigma);
  s.append(synth_dilation(sys, 1.0 / std::sqrt(t), p));
  s.append(Segment::evolve(flight * t, zeros(sys)));
  s.append(synth_dilation(sys, std::sqrt(t), p));
  return s;
}

Schedule synth_harmonic_evolution(const ControlSystem& sys, double sigma,
                                  const SynthParams& p) {
  require_kind(sys, SystemKind::QuadraticR, "harmonic evolution");
  Schedule s;
  if (sigma == 0.0) return s;
  if (sigma < 0.0)
    throw std::invalid_argument("synth: harmonic evolution needs sigma >= 0");
  const int n = p.n;
  const SynthParams inner = p.scaled(p.split / n);
  Schedule period = concat(synth_quadratic_phase(sys, -sigma / n, inner),
                           synth_free_evolution(sys, sigma / n, inner));
  return repeat(period, n);
}

Schedule synth_translation(const ControlSystem& sys, int axis, double u,
                           const SynthParams& p, bool strip_field) {
  require_kind(sys, SystemKind::LineDipole, "translation");
  if (axis < 0 || axis >= sys.grid.d)
    throw std::invalid_argument("synth: translation axis out of range");
  Schedule s;
  if (u == 0.0) return s;
  const bool strip = strip_field && sys.has_A;
  const int n = strip ? p.n : 1;
  const double step = u / n;
  const double tc = p.tau / n;

  Schedule period;
  period.append(Segment::kick_span(sys, span_coeffs(sys, axis, -step / (2.0 * tc))));
  period.append(Segment::evolve(tc, zeros(sys)));
  period.append(Segment::kick_span(sys, span_coeffs(sys, axis, step / (2.0 * tc))));
  period.append(Segment::global_phase(step * step / (4.0 * tc)));
  if (strip) {
    const bool windowed = sys.grid.domain == Domain::Line;
    const std::string& ax = sys.A_expr[static_cast<std::size_t>(axis)];
    if (!ax.empty())
      period.append(expr_kick(sys, scale_expr(step, ax), windowed));
    else
      period.append(sampled_kick(sys.grid, sys.A.comp[static_cast<std::size_t>(axis)],
                                 step, windowed));
  }
  return repeat(period, n);
}

Schedule synth_grad_square(const ControlSystem& sys, const std::string& phi_expr,
                           const SynthParams& p) {
  Schedule s;
  const double lam = 1.0 / std::sqrt(p.tau);
  s.append(expr_kick(sys, scale_expr(-lam, phi_expr), false));
  s.append(Segment::evolve(p.tau, zeros(sys)));
  s.append(expr_kick(sys, scale_expr(lam, phi_expr), false));
  return s;
}

namespace {

// Shared flow emission. All closed forms are carried as expression strings
// so reloaded schedules resample identically; only a sampled phase with no
// closed form for |grad phi|^2 falls back to raw samples.
struct FlowForms {
  const ControlSystem& sys;
  const PhaseSpec& spec;
  double t;  // flow time, absorbed into the phase

  Segment phi_kick(double c) const {
    switch (spec.form) {
      case PhaseForm::Trig:
        return expr_kick(sys, trig_to_expr(spec.trig * (c * t)), false);
      case PhaseForm::Hermite:
        return expr_kick(sys, hermite_to_expr(spec.herm * (c * t)), false);
      case PhaseForm::Sampled:
        return expr_kick(sys, scale_expr(c * t, spec.text), false);
    }
    throw std::logic_error("synth: bad phase form");
  }

  Segment gs_kick(double c) const {
    switch (spec.form) {
      case PhaseForm::Trig:
        return expr_kick(sys, trig_to_expr(grad_square(spec.trig) * (c * t * t)), false);
      case PhaseForm::Hermite: {
        std::string sum;
        for (int a = 0; a < sys.grid.d; ++a) {
          if (a) sum += "+";
          sum += "(" + hermite_to_expr(d_partial(spec.herm, a)) + ")^2";
        }
        return expr_kick(sys, scale_expr(c * t * t, sum), false);
      }
      case PhaseForm::Sampled: {
        ScalarField gs = sample_phase_grad_square(sys.grid, spec);
        return sampled_kick(sys.grid, gs, c * t * t, false);
      }
    }
    throw std::logic_error("synth: bad phase form");
  }

  // c * 2 <A, grad phi~>, windowed on line grids
  Segment strip_kick(double c) const {
    const bool windowed = sys.grid.domain == Domain::Line;
    bool have_exprs = spec.form != PhaseForm::Sampled;
    for (int a = 0; a < sys.grid.d && have_exprs; ++a)
      have_exprs = !sys.A_expr[static_cast<std::size_t>(a)].empty();
    if (have_exprs) {
      std::string sum;
      for (int a = 0; a < sys.grid.d; ++a) {
        std::string dphi = spec.form == PhaseForm::Trig
                               ? trig_to_expr(spec.trig.deriv(a))
                               : hermite_to_expr(d_partial(spec.herm, a));
        if (a) sum += "+";
        sum += "(" + sys.A_expr[static_cast<std::size_t>(a)] + ")*(" + dphi + ")";
      }
      return expr_kick(sys, scale_expr(2.0 * c * t, sum), windowed);
    }
    ScalarField q(sys.grid);
    for (int a = 0; a < sys.grid.d; ++a) {
      ScalarField da = sample_phase_partial(sys.grid, spec, a);
      const auto& Aa = sys.A.comp[static_cast<std::size_t>(a)].v;
      parallel_for(sys.grid.size(), [&](std::int64_t i) {
        q.v[static_cast<std::size_t>(i)] += Aa[static_cast<std::size_t>(i)] * da.v[static_cast<std::size_t>(i)];
      });
    }
    return sampled_kick(sys.grid, q, 2.0 * c * t, windowed);
  }
};

// One unstripped block: n splitting periods realizing the full flow of the
// scale * t phase, the diverging |grad phi|^2 phase cancelled per period.
Schedule flow_inner(const FlowForms& f, double scale, const SynthParams& p) {
  const int n = p.n;
  const double tauh = p.tau;
  Schedule period;
  period.append(f.phi_kick(-scale / tauh));
  period.append(Segment::evolve(tauh / n, zeros(f.sys)));
  period.append(f.phi_kick(scale / tauh));
  period.append(f.gs_kick(scale * scale / (n * tauh)));
  return repeat(period, n);
}

}  // namespace

Schedule synth_gradient_flow(const ControlSystem& sys, const PhaseSpec& spec,
                             double t, const SynthParams& p, bool strip_field) {
  Schedule s;
  if (t == 0.0) return s;
  FlowForms f{sys, spec, t};
  const bool strip = strip_field && sys.has_A;
  if (!strip) return flow_inner(f, 1.0, p);
  const int np = p.n;
  Schedule rep = flow_inner(f, 1.0 / np, p.scaled(1.0 / np));
  rep.append(f.strip_kick(1.0 / np));
  return repeat(rep, np);
}

Schedule synth_partial_phase(const ControlSystem& sys, int axis,
                             const PhaseSpec& spec, const SynthParams& p) {
  require_kind(sys, SystemKind::LineDipole, "partial phase");
  // The 1/tau conjugating phase turns the inner flight's kinetic exposure
  // into |grad phi|^2/tau^2 noise, so the flight budget is subordinated to
  // split*tau^2: what survives amplification is the constant phase
  // split*|grad phi|^2, removed exactly by the closing kick, and every other
  // residual carries at least one factor of tau. The flight's momentum kick
  // 1/(2*split*tau) is what caps refinement on a fixed grid.
  Schedule s;
  FlowForms f{sys, spec, 1.0};
  SynthParams inner = p;
  inner.tau = p.split * p.tau * p.tau;
  s.append(f.phi_kick(-1.0 / p.tau));
  s.append(synth_translation(sys, axis, p.tau, inner, false));
  s.append(f.phi_kick(1.0 / p.tau));
  s.append(f.gs_kick(p.split));
  return s;
}

namespace {

Schedule compile_trig_phase(const ControlSystem& sys, const PhaseSpec& spec,
                            const SynthParams& p) {
  const auto base_freqs = torus_base_freqs(sys.grid.d);
  SaturateResult res = saturate_trig(spec.trig, base_freqs);
  if (!res.ok) throw std::runtime_error("synth: phase not certified: " + res.message);
  const auto base_vals = trig_base_values(sys.grid.d, base_freqs);

  std::vector<std::pair<double, DerivPtr>> parts;
  if (res.derivation->kind == Derivation::Kind::Span) {
    for (std::size_t i = 0; i < res.derivation->children.size(); ++i)
      parts.emplace_back(res.derivation->coeffs[i], res.derivation->children[i]);
  } else {
    parts.emplace_back(1.0, res.derivation);
  }

  Schedule s;
  std::vector<double> span(static_cast<std::size_t>(sys.m()), 0.0);
  bool any_span = false;
  for (const auto& [c, node] : parts) {
    if (node->kind == Derivation::Kind::Base) {
      span[static_cast<std::size_t>(node->index)] += c;
      any_span = true;
    } else if (node->kind == Derivation::Kind::GradSq) {
      if (c < 0.0) throw std::logic_error("synth: negative drift weight");
      if (c == 0.0) continue;
      TrigPoly arg = evaluate_trig(node->children[0], base_vals) * std::sqrt(c);
      s.append(synth_grad_square(sys, trig_to_expr(arg), p));
    } else {
      throw std::logic_error("synth: unexpected certificate node");
    }
  }
  Schedule out;
  if (any_span) out.append(Segment::kick_span(sys, std::move(span)));
  out.append(s);
  if (res.offset != 0.0) out.append(Segment::global_phase(res.offset));
  return out;
}

Schedule compile_hermite_phase(const ControlSystem& sys, const PhaseSpec& spec,
                               const SynthParams& p) {
  SaturateResult res = saturate_hermite(spec.herm, {});
  if (!res.ok) throw std::runtime_error("synth: phase not certified: " + res.message);
  const auto base_vals = hermite_base_values(sys.grid.d);

  std::vector<std::pair<double, DerivPtr>> parts;
  if (res.derivation->kind == Derivation::Kind::Span) {
    for (std::size_t i = 0; i < res.derivation->children.size(); ++i)
      parts.emplace_back(res.derivation->coeffs[i], res.derivation->children[i]);
  } else {
    parts.emplace_back(1.0, res.derivation);
  }

  Schedule s;
  std::vector<double> span(static_cast<std::size_t>(sys.m()), 0.0);
  bool any_span = false;
  for (const auto& [c, node] : parts) {
    if (node->kind == Derivation::Kind::Base) {
      span[static_cast<std::size_t>(node->index)] += c;  // x_a or the gaussian
      any_span = true;
    } else if (node->kind == Derivation::Kind::Partial) {
      // e^{i c (-d_axis v)} realized as one conjugated short translation
      PhaseSpec ps;
      ps.form = PhaseForm::Hermite;
      ps.d = sys.grid.d;
      ps.herm = evaluate_hermite(node->children[0], base_vals) * c;
      ps.text = hermite_to_expr(ps.herm);
      s.append(synth_partial_phase(sys, node->axis, ps, p));
    } else {
      throw std::logic_error("synth: unexpected certificate node");
    }
  }
  Schedule out;
  if (any_span) out.append(Segment::kick_span(sys, std::move(span)));
  out.append(s);
  if (res.offset != 0.0) out.append(Segment::global_phase(res.offset));
  return out;
}

std::string phase_closed_form(const PhaseSpec& spec) {
  switch (spec.form) {
    case PhaseForm::Trig:
      return trig_to_expr(spec.trig);
    case PhaseForm::Hermite:
      return hermite_to_expr(spec.herm);
    case PhaseForm::Sampled:
      return spec.text;
  }
  throw std::logic_error("synth: bad phase form");
}

Schedule compile_node(const TargetOp& op, const ControlSystem& sys,
                      const SynthParams& p) {
  switch (op.kind) {
    case TargetKind::Phase:
      switch (op.phase.form) {
        case PhaseForm::Trig:
          return compile_trig_phase(sys, op.phase, p);
        case PhaseForm::Hermite:
          return compile_hermite_phase(sys, op.phase, p);
        case PhaseForm::Sampled: {
          Schedule s;
          s.append(expr_kick(sys, op.phase.text, false));
          return s;
        }
      }
      throw std::logic_error("synth: bad phase form");
    case TargetKind::QuadraticPhase:
      return synth_quadratic_phase(sys, op.value, p);
    case TargetKind::Dilation:
      return synth_dilation(sys, op.value, p);
    case TargetKind::FreeEvo:
      return synth_free_evolution(sys, op.value, p);
    case TargetKind::HarmonicEvo:
      return synth_harmonic_evolution(sys, op.value, p);
    case TargetKind::Translation:
      return synth_translation(sys, op.axis, op.value, p, true);
    case TargetKind::GradSquarePhase:
      return synth_grad_square(sys, phase_closed_form(op.phase), p);
    case TargetKind::PartialPhase:
      return synth_partial_phase(sys, op.axis, op.phase, p);
    case TargetKind::GradientFlow:
      return synth_gradient_flow(sys, op.phase, op.value, p, true);
    case TargetKind::TwistedGradientFlow:
      return synth_gradient_flow(sys, op.phase, op.value, p, false);
    case TargetKind::Compose: {
      Schedule s;
      for (auto it = op.children.rbegin(); it != op.children.rend(); ++it)
        s.append(compile_node(**it, sys, p));
      return s;
    }
  }
  throw std::logic_error("synth: bad target kind");
}

}  // namespace

Schedule compile(const TargetPtr& target, const ControlSystem& sys,
                 const SynthParams& p) {
  if (!target) throw std::invalid_argument("synth: null target");
  if (!(p.tau > 0.0) || p.n < 1 || !(p.split > 0.0))
    throw std::invalid_argument("synth: bad parameters");
  check_admissible(*target, sys);
  Schedule s = compile_node(*target, sys, p);
  s.meta["target"] = target_to_string(*target);
  s.meta["tau"] = p.tau;
  s.meta["n"] = p.n;
  s.meta["split"] = p.split;
  s.meta["eps_kick"] = p.eps_kick;
  s.meta["squeeze"] = p.squeeze;
  s.meta["kicks"] = s.kick_count();
  s.meta["evolves"] = s.evolve_count();
  s.meta["evolve_time"] = s.evolve_time();
  s.meta["kicked_time"] = s.total_time(p.eps_kick);
  return s;
}

}  // namespace magctrl
