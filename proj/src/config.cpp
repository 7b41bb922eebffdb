#include "magctrl/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "magctrl/state.hpp"

namespace magctrl {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "system.kind", "system.d", "system.N", "system.L",
      "system.A1", "system.A2", "system.A3", "system.V", "system.W2",
      "system.divA",
      "state.kind", "state.a", "state.b", "state.theta", "state.expr",
      "target",
      "sweep.tau", "sweep.n", "sweep.eps",
      "run.kick_mode", "run.method", "run.seed", "run.out", "run.formats",
      "run.timing", "run.name",
      "synth.tau", "synth.n", "synth.split", "synth.squeeze", "synth.eps_kick",
      "tol.final_error", "tol.order", "tol.order_tol", "tol.monotone",
      "tol.residual", "tol.floor", "tol.ratio",
      "ident.tau", "ident.alpha",
      "trotter.sigma", "trotter.u",
      "obstruction.count", "obstruction.max_segments", "obstruction.umax",
      "obstruction.dur_lo", "obstruction.dur_hi", "obstruction.field",
      "obstruction.contrast_amp", "obstruction.contrast_dur",
      "saturate.max_freq", "saturate.depth", "saturate.degree",
  };
  return keys;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_num(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw std::runtime_error("config: key " + key + " is not a number: " + v);
  return x;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

ExperimentConfig ExperimentConfig::from_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: line " + std::to_string(lineno) +
                               " is not key = value: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_keys().count(key))
      throw std::runtime_error("config: unknown key " + key);
    if (cfg.kv_.count(key))
      throw std::runtime_error("config: duplicate key " + key);
    cfg.kv_[key] = value;
  }
  return cfg;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (!known_keys().count(key))
    throw std::runtime_error("config: unknown key " + key);
  kv_[key] = value;
}

void ExperimentConfig::set_default(const std::string& key, const std::string& value) {
  if (!known_keys().count(key))
    throw std::runtime_error("config: unknown key " + key);
  defaults_[key] = value;
}

bool ExperimentConfig::has(const std::string& key) const {
  return kv_.count(key) || defaults_.count(key);
}

std::map<std::string, std::string> ExperimentConfig::effective() const {
  std::map<std::string, std::string> out = defaults_;
  for (const auto& [k, v] : kv_) out[k] = v;
  return out;
}

std::string ExperimentConfig::str(const std::string& key, const std::string& fallback) const {
  auto it = kv_.find(key);
  if (it != kv_.end()) return it->second;
  it = defaults_.find(key);
  if (it != defaults_.end()) return it->second;
  return fallback;
}

double ExperimentConfig::num(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  return to_num(key, str(key));
}

int ExperimentConfig::integer(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  const double x = to_num(key, str(key));
  return static_cast<int>(x);
}

std::uint64_t ExperimentConfig::u64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string v = str(key);
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw std::runtime_error("config: key " + key + " is not an unsigned integer: " + v);
  }
}

std::vector<double> ExperimentConfig::list(const std::string& key) const {
  std::vector<double> out;
  if (!has(key)) return out;
  std::istringstream in(str(key));
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(to_num(key, item));
  }
  return out;
}

std::vector<int> ExperimentConfig::int_list(const std::string& key) const {
  std::vector<int> out;
  for (double x : list(key)) out.push_back(static_cast<int>(x));
  return out;
}

ControlSystem system_from_config(const ExperimentConfig& cfg) {
  const std::string kind = cfg.str("system.kind", "torus_trig");
  const int d = cfg.integer("system.d", 1);
  const int N = cfg.integer("system.N", 256);
  const double L = cfg.num("system.L", 12.0);
  const std::array<std::string, 3> A = {cfg.str("system.A1"), cfg.str("system.A2"),
                                        cfg.str("system.A3")};
  const std::string V = cfg.str("system.V");

  ControlSystem sys;
  if (kind == "torus_trig") {
    sys = make_torus_trig(d, N, A, V);
  } else if (kind == "line_dipole") {
    sys = make_line_dipole(d, N, L, A, V);
  } else if (kind == "quadratic_r") {
    sys = make_quadratic_r(d, N, L, cfg.str("system.W2"), A, V);
  } else {
    throw std::runtime_error("config: unknown system.kind " + kind);
  }
  if (cfg.has("system.divA")) set_analytic_divA(sys, cfg.str("system.divA"));
  return sys;
}

WaveFunction state_from_config(const ExperimentConfig& cfg, const Grid& g) {
  const std::string kind = cfg.str("state.kind", "gaussian");
  if (kind == "gaussian") {
    GaussianParams p;
    p.a = cfg.num("state.a", 1.0);
    p.b = cfg.num("state.b", 0.0);
    p.theta = cfg.num("state.theta", 0.0);
    return gaussian_state(g, p);
  }
  if (kind == "expr") {
    ScalarField f = sample_expr(g, cfg.str("state.expr", "G"));
    WaveFunction psi(g);
    for (std::size_t i = 0; i < psi.v.size(); ++i) psi.v[i] = cplx(f.v[i], 0.0);
    normalize(psi);
    return psi;
  }
  throw std::runtime_error("config: unknown state.kind " + kind);
}

ExecOptions exec_from_config(const ExperimentConfig& cfg, bool* eps_follows_tau) {
  ExecOptions opts;
  if (eps_follows_tau) *eps_follows_tau = false;

  const std::string method = cfg.str("run.method", "auto");
  if (method == "auto")
    opts.method = Method::Auto;
  else if (method == "dense")
    opts.method = Method::DenseEig;
  else if (method == "krylov")
    opts.method = Method::Krylov;
  else
    throw std::runtime_error("config: unknown run.method " + method);

  const std::string mode = cfg.str("run.kick_mode", "ideal");
  if (mode == "ideal") {
    opts.kick_mode = KickMode::Ideal;
  } else if (mode.rfind("pulsed:", 0) == 0) {
    opts.kick_mode = KickMode::Pulsed;
    const std::string arg = mode.substr(7);
    if (arg == "tau") {
      if (eps_follows_tau) *eps_follows_tau = true;
    } else {
      opts.eps_kick = to_num("run.kick_mode", arg);
      if (!(opts.eps_kick > 0.0))
        throw std::runtime_error("config: pulsed kick length must be positive");
    }
  } else {
    throw std::runtime_error("config: unknown run.kick_mode " + mode +
                             " (want ideal or pulsed:<eps>)");
  }
  return opts;
}

SynthParams synth_from_config(const ExperimentConfig& cfg) {
  SynthParams p;
  p.tau = cfg.num("synth.tau", p.tau);
  p.n = cfg.integer("synth.n", p.n);
  p.split = cfg.num("synth.split", p.split);
  p.squeeze = cfg.num("synth.squeeze", p.squeeze);
  p.eps_kick = cfg.num("synth.eps_kick", p.eps_kick);
  return p;
}

}  // namespace magctrl
