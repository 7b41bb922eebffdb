#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "magctrl/propagator.hpp"
#include "magctrl/synth.hpp"
#include "magctrl/system.hpp"

namespace magctrl {

// Experiment description: flat key=value text, '#' comments, one entry per
// line. Values run to the end of the line, so expression strings need no
// quoting beyond what the target grammar itself uses. Unknown keys are
// errors; the full schema is listed in the README. Defaults installed by a
// subcommand and the file contents end up in the same map, so the emitted
// config echo is the complete effective configuration.
class ExperimentConfig {
 public:
  ExperimentConfig() = default;

  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_text(const std::string& text);

  // set wins over set_default regardless of call order
  void set(const std::string& key, const std::string& value);
  void set_default(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;
  std::string str(const std::string& key, const std::string& fallback = "") const;
  double num(const std::string& key, double fallback) const;
  int integer(const std::string& key, int fallback) const;
  std::uint64_t u64(const std::string& key, std::uint64_t fallback) const;
  // comma-separated numeric lists
  std::vector<double> list(const std::string& key) const;
  std::vector<int> int_list(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }
  // explicit entries over defaults: the complete effective configuration,
  // echoed into every report
  std::map<std::string, std::string> effective() const;

 private:
  std::map<std::string, std::string> kv_;       // explicit entries
  std::map<std::string, std::string> defaults_;  // subcommand defaults

  friend ControlSystem system_from_config(const ExperimentConfig&);
};

// Reads system.* keys (kind, d, N, L, A1..A3, V, W2, divA).
ControlSystem system_from_config(const ExperimentConfig& cfg);

// Reads state.* keys; gaussian parameters or a closed-form expression,
// normalized on the grid.
WaveFunction state_from_config(const ExperimentConfig& cfg, const Grid& g);

// Reads run.kick_mode ("ideal" | "pulsed:<eps>" | "pulsed:tau") and
// run.method. In the "pulsed:tau" form the pulse length follows the row's
// tau; eps_follows_tau reports that choice.
ExecOptions exec_from_config(const ExperimentConfig& cfg, bool* eps_follows_tau = nullptr);

// Reads synth.* knobs.
SynthParams synth_from_config(const ExperimentConfig& cfg);

}  // namespace magctrl
