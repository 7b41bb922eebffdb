#include "magctrl/schedule.hpp"

#include <fstream>
#include <stdexcept>

#include "magctrl/expr.hpp"
#include "magctrl/parallel.hpp"
#include "magctrl/state.hpp"

namespace magctrl {

Segment Segment::evolve(double tau, std::vector<double> ctrl) {
  if (!(tau > 0.0)) throw std::invalid_argument("segment: evolve duration must be positive");
  Segment s;
  s.kind = SegmentKind::Evolve;
  s.duration = tau;
  s.u = std::move(ctrl);
  return s;
}

Segment Segment::kick(ScalarField phase_field, std::string expr, bool windowed) {
  Segment s;
  s.kind = SegmentKind::Kick;
  s.kick_phase = std::move(phase_field);
  s.kick_expr = std::move(expr);
  s.windowed = windowed;
  return s;
}

Segment Segment::kick_span(const ControlSystem& sys, std::vector<double> coeffs) {
  if (coeffs.size() != static_cast<std::size_t>(sys.m()))
    throw std::invalid_argument("segment: kick coefficient count must match m");
  Segment s;
  s.kind = SegmentKind::Kick;
  s.kick_phase = ScalarField(sys.grid);
  parallel_for(sys.grid.size(), [&](std::int64_t i) {
    double v = 0.0;
    for (int j = 0; j < sys.m(); ++j)
      v += coeffs[static_cast<std::size_t>(j)] * sys.W[static_cast<std::size_t>(j)].v[static_cast<std::size_t>(i)];
    s.kick_phase.v[static_cast<std::size_t>(i)] = v;
  });
  s.kick_coeffs = std::move(coeffs);
  s.has_coeffs = true;
  return s;
}

Segment Segment::global_phase(double phi) {
  Segment s;
  s.kind = SegmentKind::GlobalPhase;
  s.phase = phi;
  return s;
}

int Schedule::kick_count() const {
  int c = 0;
  for (const auto& s : segments) c += s.kind == SegmentKind::Kick;
  return c;
}

int Schedule::evolve_count() const {
  int c = 0;
  for (const auto& s : segments) c += s.kind == SegmentKind::Evolve;
  return c;
}

double Schedule::evolve_time() const {
  double t = 0.0;
  for (const auto& s : segments)
    if (s.kind == SegmentKind::Evolve) t += s.duration;
  return t;
}

double Schedule::total_time(double eps_kick) const {
  return evolve_time() + eps_kick * kick_count();
}

void Schedule::append(const Schedule& other) {
  segments.insert(segments.end(), other.segments.begin(), other.segments.end());
}

Schedule concat(const Schedule& a, const Schedule& b) {
  Schedule s = a;
  s.append(b);
  return s;
}

Schedule repeat(const Schedule& s, int n) {
  if (n < 1) throw std::invalid_argument("repeat: n must be at least 1");
  Schedule out;
  out.meta = s.meta;
  for (int i = 0; i < n; ++i) out.append(s);
  return out;
}

Schedule trotter_pair(const Schedule& a, const Schedule& b, int n) {
  return repeat(concat(a, b), n);
}

nlohmann::json schedule_to_json(const Schedule& s) {
  nlohmann::json j;
  j["format"] = "MSCHED1";
  j["meta"] = s.meta.is_null() ? nlohmann::json::object() : s.meta;
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& seg : s.segments) {
    nlohmann::json e;
    switch (seg.kind) {
      case SegmentKind::Evolve:
        e["kind"] = "evolve";
        e["duration"] = seg.duration;
        e["u"] = seg.u;
        break;
      case SegmentKind::Kick:
        e["kind"] = "kick";
        if (seg.has_coeffs) {
          e["coeffs"] = seg.kick_coeffs;
        } else if (!seg.kick_expr.empty()) {
          e["expr"] = seg.kick_expr;
          e["windowed"] = seg.windowed;
        } else {
          e["samples"] = seg.kick_phase.v;
        }
        break;
      case SegmentKind::GlobalPhase:
        e["kind"] = "global_phase";
        e["phase"] = seg.phase;
        break;
    }
    segs.push_back(std::move(e));
  }
  j["segments"] = std::move(segs);
  return j;
}

Schedule schedule_from_json(const nlohmann::json& j, const ControlSystem& sys) {
  if (!j.contains("format") || j["format"] != "MSCHED1")
    throw std::invalid_argument("schedule: missing or unknown format tag");
  Schedule s;
  if (j.contains("meta")) s.meta = j["meta"];
  for (const auto& e : j.at("segments")) {
    const std::string kind = e.at("kind");
    if (kind == "evolve") {
      s.append(Segment::evolve(e.at("duration").get<double>(),
                               e.at("u").get<std::vector<double>>()));
    } else if (kind == "kick") {
      if (e.contains("coeffs")) {
        s.append(Segment::kick_span(sys, e.at("coeffs").get<std::vector<double>>()));
      } else if (e.contains("expr")) {
        const bool windowed = e.value("windowed", false);
        ScalarField phase = sample_expr(sys.grid, e.at("expr").get<std::string>());
        if (windowed) {
          ScalarField w = smooth_window(sys.grid);
          parallel_for(sys.grid.size(), [&](std::int64_t i) {
            phase.v[static_cast<std::size_t>(i)] *= w.v[static_cast<std::size_t>(i)];
          });
        }
        s.append(Segment::kick(std::move(phase), e.at("expr").get<std::string>(), windowed));
      } else {
        ScalarField phase(sys.grid);
        const auto samples = e.at("samples").get<std::vector<double>>();
        if (samples.size() != phase.v.size())
          throw std::invalid_argument("schedule: kick sample count mismatch");
        phase.v = samples;
        s.append(Segment::kick(std::move(phase)));
      }
    } else if (kind == "global_phase") {
      s.append(Segment::global_phase(e.at("phase").get<double>()));
    } else {
      throw std::invalid_argument("schedule: unknown segment kind " + kind);
    }
  }
  return s;
}

void save_schedule(const std::string& path, const Schedule& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_schedule: cannot open " + path);
  out << schedule_to_json(s).dump(2) << "\n";
}

Schedule load_schedule(const std::string& path, const ControlSystem& sys) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_schedule: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return schedule_from_json(j, sys);
}

}  // namespace magctrl
