#pragma once
#include <string>
#include <vector>

#include <json.hpp>

#include "magctrl/system.hpp"

namespace magctrl {

// Piecewise-constant control program. Segments are stored in execution
// order: segments[0] acts on the state first.
enum class SegmentKind { Evolve, Kick, GlobalPhase };

struct Segment {
  SegmentKind kind = SegmentKind::Evolve;

  // Evolve: e^{-i duration H(u)}
  double duration = 0.0;
  std::vector<double> u;

  // Kick: e^{i kick_phase}. kick_coeffs, when present, express the phase as
  // sum_j c_j W_j so a pulsed run can realize it with a short control burst.
  // kick_expr is a closed form of the phase ("" = samples only); windowed
  // multiplies the sampled expression by the boundary cutoff.
  ScalarField kick_phase;
  std::vector<double> kick_coeffs;
  bool has_coeffs = false;
  std::string kick_expr;
  bool windowed = false;

  // GlobalPhase: multiply by e^{i phase}
  double phase = 0.0;

  static Segment evolve(double tau, std::vector<double> ctrl);
  static Segment kick(ScalarField phase_field, std::string expr = "",
                      bool windowed = false);
  static Segment kick_span(const ControlSystem& sys, std::vector<double> coeffs);
  static Segment global_phase(double phi);
};

struct Schedule {
  std::vector<Segment> segments;
  nlohmann::json meta;

  int kick_count() const;
  int evolve_count() const;
  double evolve_time() const;                      // sum of Evolve durations
  double total_time(double eps_kick = 0.0) const;  // + eps per kick

  void append(Segment s) { segments.push_back(std::move(s)); }
  void append(const Schedule& other);
};

Schedule concat(const Schedule& a, const Schedule& b);
Schedule repeat(const Schedule& s, int n);
// n repetitions of [a then b]; the standard splitting combinator
Schedule trotter_pair(const Schedule& a, const Schedule& b, int n);

nlohmann::json schedule_to_json(const Schedule& s);
Schedule schedule_from_json(const nlohmann::json& j, const ControlSystem& sys);
void save_schedule(const std::string& path, const Schedule& s);
Schedule load_schedule(const std::string& path, const ControlSystem& sys);

}  // namespace magctrl
