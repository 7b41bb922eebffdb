#include "magctrl/target.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "magctrl/expr.hpp"
#include "magctrl/state.hpp"

namespace magctrl {

PhaseSpec PhaseSpec::from_trig(const std::string& expr, int d) {
  PhaseSpec s;
  s.form = PhaseForm::Trig;
  s.d = d;
  s.trig = parse_trig(expr, d);
  s.text = expr;
  return s;
}

PhaseSpec PhaseSpec::from_hermite(const std::string& expr, int d) {
  PhaseSpec s;
  s.form = PhaseForm::Hermite;
  s.d = d;
  s.herm = parse_hermite(expr, d);
  s.text = expr;
  return s;
}

PhaseSpec PhaseSpec::from_sampled(const std::string& expr, int d) {
  PhaseSpec s;
  s.form = PhaseForm::Sampled;
  s.d = d;
  parse_expr(expr);  // reject malformed input up front
  s.text = expr;
  return s;
}

ScalarField sample_phase(const Grid& g, const PhaseSpec& spec) {
  switch (spec.form) {
    case PhaseForm::Trig:
      return sample_trig(g, spec.trig);
    case PhaseForm::Hermite:
      return sample_hermite(g, spec.herm);
    case PhaseForm::Sampled:
      return sample_expr(g, spec.text);
  }
  throw std::logic_error("phase: bad form");
}

ScalarField sample_phase_partial(const Grid& g, const PhaseSpec& spec, int axis) {
  if (axis < 0 || axis >= g.d) throw std::invalid_argument("phase: axis out of range");
  switch (spec.form) {
    case PhaseForm::Trig:
      return sample_trig(g, spec.trig.deriv(axis));
    case PhaseForm::Hermite:
      return sample_hermite(g, d_partial(spec.herm, axis));
    case PhaseForm::Sampled: {
      VectorField grad = spectral_gradient(sample_expr(g, spec.text));
      return std::move(grad.comp[static_cast<std::size_t>(axis)]);
    }
  }
  throw std::logic_error("phase: bad form");
}

ScalarField sample_phase_grad_square(const Grid& g, const PhaseSpec& spec) {
  ScalarField out(g);
  for (int a = 0; a < g.d; ++a) {
    ScalarField da = sample_phase_partial(g, spec, a);
    for (std::int64_t i = 0; i < g.size(); ++i) out.v[static_cast<std::size_t>(i)] += da.v[static_cast<std::size_t>(i)] * da.v[static_cast<std::size_t>(i)];
  }
  return out;
}

namespace {

TargetPtr make(TargetKind kind) {
  auto op = std::make_shared<TargetOp>();
  op->kind = kind;
  return op;
}

TargetOp& mut(const TargetPtr& p) { return const_cast<TargetOp&>(*p); }

}  // namespace

TargetPtr TargetOp::make_phase(PhaseSpec spec) {
  auto op = make(TargetKind::Phase);
  mut(op).phase = std::move(spec);
  return op;
}

TargetPtr TargetOp::quadratic_phase(double delta) {
  auto op = make(TargetKind::QuadraticPhase);
  mut(op).value = delta;
  return op;
}

TargetPtr TargetOp::dilation(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("target: dilation factor must be positive");
  auto op = make(TargetKind::Dilation);
  mut(op).value = alpha;
  return op;
}

TargetPtr TargetOp::free_evo(double sigma) {
  auto op = make(TargetKind::FreeEvo);
  mut(op).value = sigma;
  return op;
}

TargetPtr TargetOp::harmonic_evo(double sigma) {
  auto op = make(TargetKind::HarmonicEvo);
  mut(op).value = sigma;
  return op;
}

TargetPtr TargetOp::translation(int axis, double u) {
  auto op = make(TargetKind::Translation);
  mut(op).axis = axis;
  mut(op).value = u;
  return op;
}

TargetPtr TargetOp::grad_square_phase(PhaseSpec spec) {
  auto op = make(TargetKind::GradSquarePhase);
  mut(op).phase = std::move(spec);
  return op;
}

TargetPtr TargetOp::partial_phase(int axis, PhaseSpec spec) {
  auto op = make(TargetKind::PartialPhase);
  mut(op).axis = axis;
  mut(op).phase = std::move(spec);
  return op;
}

TargetPtr TargetOp::gradient_flow(PhaseSpec spec, double t) {
  auto op = make(TargetKind::GradientFlow);
  mut(op).phase = std::move(spec);
  mut(op).value = t;
  return op;
}

TargetPtr TargetOp::twisted_gradient_flow(PhaseSpec spec, double t) {
  auto op = make(TargetKind::TwistedGradientFlow);
  mut(op).phase = std::move(spec);
  mut(op).value = t;
  return op;
}

TargetPtr TargetOp::compose(std::vector<TargetPtr> children) {
  if (children.empty()) throw std::invalid_argument("target: compose needs children");
  auto op = make(TargetKind::Compose);
  mut(op).children = std::move(children);
  return op;
}

namespace {

class TargetParser {
 public:
  TargetParser(const std::string& text, int d) : s_(text), d_(d) {}

  TargetPtr parse() {
    TargetPtr op = parse_op();
    skip_ws();
    if (i_ != s_.size()) fail("trailing input");
    return op;
  }

 private:
  const std::string& s_;
  std::size_t i_ = 0;
  int d_;

  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream os;
    os << "target parse error at " << i_ << ": " << what;
    throw std::invalid_argument(os.str());
  }

  void skip_ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }

  bool peek(char c) {
    skip_ws();
    return i_ < s_.size() && s_[i_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++i_;
  }

  std::string ident() {
    skip_ws();
    std::size_t start = i_;
    while (i_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_'))
      ++i_;
    if (i_ == start) fail("expected a name");
    return s_.substr(start, i_ - start);
  }

  double number() {
    skip_ws();
    const char* begin = s_.c_str() + i_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("expected a number");
    i_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  int axis_arg() {
    double v = number();
    int a = static_cast<int>(v);
    if (a != v || a < 1 || a > d_) fail("axis must be 1.." + std::to_string(d_));
    return a - 1;
  }

  std::string quoted() {
    skip_ws();
    if (i_ >= s_.size() || s_[i_] != '"') fail("expected '\"'");
    ++i_;
    std::size_t start = i_;
    while (i_ < s_.size() && s_[i_] != '"') ++i_;
    if (i_ >= s_.size()) fail("unterminated string");
    std::string out = s_.substr(start, i_ - start);
    ++i_;
    return out;
  }

  PhaseSpec tagged_phase() {
    const std::string form = ident();
    expect(':');
    const std::string expr = quoted();
    if (form == "trig") return PhaseSpec::from_trig(expr, d_);
    if (form == "hermite") return PhaseSpec::from_hermite(expr, d_);
    if (form == "expr") return PhaseSpec::from_sampled(expr, d_);
    fail("unknown phase form '" + form + "' (trig, hermite, expr)");
  }

  TargetPtr parse_op() {
    const std::string name = ident();
    expect('(');
    TargetPtr op;
    if (name == "compose") {
      std::vector<TargetPtr> children;
      children.push_back(parse_op());
      while (peek(',')) {
        ++i_;
        children.push_back(parse_op());
      }
      op = TargetOp::compose(std::move(children));
    } else if (name == "phase") {
      op = TargetOp::make_phase(tagged_phase());
    } else if (name == "qphase") {
      op = TargetOp::quadratic_phase(number());
    } else if (name == "dilation") {
      op = TargetOp::dilation(number());
    } else if (name == "freeevo") {
      op = TargetOp::free_evo(number());
    } else if (name == "harmonic") {
      op = TargetOp::harmonic_evo(number());
    } else if (name == "translate") {
      int a = axis_arg();
      expect(',');
      op = TargetOp::translation(a, number());
    } else if (name == "gradsq") {
      op = TargetOp::grad_square_phase(tagged_phase());
    } else if (name == "partial") {
      int a = axis_arg();
      expect(',');
      op = TargetOp::partial_phase(a, tagged_phase());
    } else if (name == "flow") {
      PhaseSpec spec = tagged_phase();
      expect(',');
      op = TargetOp::gradient_flow(std::move(spec), number());
    } else if (name == "twistedflow") {
      PhaseSpec spec = tagged_phase();
      expect(',');
      op = TargetOp::twisted_gradient_flow(std::move(spec), number());
    } else {
      fail("unknown operator '" + name + "'");
    }
    expect(')');
    return op;
  }
};

const char* form_name(PhaseForm f) {
  switch (f) {
    case PhaseForm::Trig:
      return "trig";
    case PhaseForm::Hermite:
      return "hermite";
    case PhaseForm::Sampled:
      return "expr";
  }
  return "?";
}

std::string num_str(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string phase_str(const PhaseSpec& spec) {
  return std::string(form_name(spec.form)) + ":\"" + spec.text + "\"";
}

}  // namespace

TargetPtr parse_target(const std::string& text, int d) {
  return TargetParser(text, d).parse();
}

std::string target_to_string(const TargetOp& op) {
  switch (op.kind) {
    case TargetKind::Phase:
      return "phase(" + phase_str(op.phase) + ")";
    case TargetKind::QuadraticPhase:
      return "qphase(" + num_str(op.value) + ")";
    case TargetKind::Dilation:
      return "dilation(" + num_str(op.value) + ")";
    case TargetKind::FreeEvo:
      return "freeevo(" + num_str(op.value) + ")";
    case TargetKind::HarmonicEvo:
      return "harmonic(" + num_str(op.value) + ")";
    case TargetKind::Translation:
      return "translate(" + std::to_string(op.axis + 1) + ", " + num_str(op.value) + ")";
    case TargetKind::GradSquarePhase:
      return "gradsq(" + phase_str(op.phase) + ")";
    case TargetKind::PartialPhase:
      return "partial(" + std::to_string(op.axis + 1) + ", " + phase_str(op.phase) + ")";
    case TargetKind::GradientFlow:
      return "flow(" + phase_str(op.phase) + ", " + num_str(op.value) + ")";
    case TargetKind::TwistedGradientFlow:
      return "twistedflow(" + phase_str(op.phase) + ", " + num_str(op.value) + ")";
    case TargetKind::Compose: {
      std::string out = "compose(";
      for (std::size_t i = 0; i < op.children.size(); ++i) {
        if (i) out += ", ";
        out += target_to_string(*op.children[i]);
      }
      return out + ")";
    }
  }
  throw std::logic_error("target: bad kind");
}

namespace {

[[noreturn]] void reject(const TargetOp& op, const std::string& why) {
  throw std::invalid_argument("target '" + target_to_string(op) + "': " + why);
}

void check_phase_domain(const TargetOp& op, const ControlSystem& sys) {
  if (op.phase.d != sys.grid.d) reject(op, "phase dimension mismatch");
  if (op.phase.form == PhaseForm::Trig && sys.grid.domain != Domain::Torus)
    reject(op, "trig phases need a torus grid");
  if (op.phase.form == PhaseForm::Hermite && sys.grid.domain != Domain::Line)
    reject(op, "hermite phases need a line grid");
}

}  // namespace

void check_admissible(const TargetOp& op, const ControlSystem& sys) {
  switch (op.kind) {
    case TargetKind::Phase:
      check_phase_domain(op, sys);
      if (op.phase.form == PhaseForm::Trig && sys.kind != SystemKind::TorusTrig)
        reject(op, "trig phase synthesis needs the torus control family");
      if (op.phase.form == PhaseForm::Hermite && sys.kind != SystemKind::LineDipole)
        reject(op, "hermite phase synthesis needs the dipole control family");
      break;
    case TargetKind::QuadraticPhase:
    case TargetKind::Dilation:
    case TargetKind::FreeEvo:
    case TargetKind::HarmonicEvo:
      if (sys.kind != SystemKind::QuadraticR || sys.grid.domain != Domain::Line)
        reject(op, "needs the quadratic control family on a line grid");
      break;
    case TargetKind::Translation:
      if (sys.kind != SystemKind::LineDipole)
        reject(op, "needs the dipole control family");
      if (op.axis < 0 || op.axis >= sys.grid.d) reject(op, "axis out of range");
      break;
    case TargetKind::PartialPhase:
      if (sys.kind != SystemKind::LineDipole)
        reject(op, "needs the dipole control family");
      if (op.axis < 0 || op.axis >= sys.grid.d) reject(op, "axis out of range");
      if (op.phase.form == PhaseForm::Trig) reject(op, "trig phase on a line operator");
      check_phase_domain(op, sys);
      break;
    case TargetKind::GradSquarePhase:
    case TargetKind::GradientFlow:
    case TargetKind::TwistedGradientFlow:
      check_phase_domain(op, sys);
      break;
    case TargetKind::Compose:
      for (const auto& ch : op.children) check_admissible(*ch, sys);
      break;
  }
}

WaveFunction apply_target_oracle(const TargetOp& op, const ControlSystem& sys,
                                 const WaveFunction& psi) {
  const Grid& g = sys.grid;
  switch (op.kind) {
    case TargetKind::Phase:
      return apply_phase(psi, sample_phase(g, op.phase), 1.0);
    case TargetKind::QuadraticPhase:
      return apply_quadratic_phase(psi, op.value);
    case TargetKind::Dilation:
      return apply_dilation(psi, op.value);
    case TargetKind::FreeEvo:
      return apply_free_evolution(psi, op.value);
    case TargetKind::HarmonicEvo:
      return apply_harmonic_evolution(psi, op.value);
    case TargetKind::Translation:
      return apply_translation(psi, op.axis, op.value);
    case TargetKind::GradSquarePhase:
      return apply_phase(psi, sample_phase_grad_square(g, op.phase), -1.0);
    case TargetKind::PartialPhase:
      return apply_phase(psi, sample_phase_partial(g, op.phase, op.axis), -1.0);
    case TargetKind::GradientFlow:
      return apply_transport(psi, sample_phase(g, op.phase), op.value);
    case TargetKind::TwistedGradientFlow:
      return apply_twisted_transport(sys, psi, sample_phase(g, op.phase), op.value);
    case TargetKind::Compose: {
      WaveFunction cur = psi;
      for (auto it = op.children.rbegin(); it != op.children.rend(); ++it)
        cur = apply_target_oracle(**it, sys, cur);
      return cur;
    }
  }
  throw std::logic_error("target: bad kind");
}

}  // namespace magctrl
