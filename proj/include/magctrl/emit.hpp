#pragma once
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace magctrl {

// Least-squares slope of log(y) against log(x); stderr from the residual
// variance (0 when only two points).
struct OrderFit {
  double order = 0.0;
  double stderr_ = 0.0;
  int points = 0;
  bool ok = false;  // at least two positive (x, y) pairs
};
OrderFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys);

// One experiment's outcome. Rows are kept in refinement order (coarsest
// first); `error` is the projective error or residual the study measures, and
// `note` carries a per-row label or a recorded failure. All pass flags are
// recomputed from rows by the runner that fills them; nothing here is state.
struct Report {
  struct Row {
    std::vector<double> params;
    double T_total = 0.0;
    double error = 0.0;
    double wall_ms = 0.0;
    std::string note;
  };

  std::string name;
  std::vector<std::string> param_names;
  std::vector<Row> rows;
  OrderFit fit;
  std::map<std::string, std::string> info;    // extra scalars, deterministic text
  std::map<std::string, bool> passes;
  std::map<std::string, std::string> config_echo;

  bool pass() const;
  // column of the i-th parameter / of errors, for fitting and checks
  std::vector<double> param_column(std::size_t i) const;
  std::vector<double> error_column() const;
};

// Serialized forms. CSV columns: param names, T_total, error, wall_ms, note;
// numbers use %.12g. With live_timing false (the default run.timing=zero)
// the wall_ms column is written as 0 so identical configurations produce
// identical bytes; measured times always reach the JSON report.
std::string report_csv(const Report& r, bool live_timing);
nlohmann::json report_json(const Report& r);
Report report_from_json(const nlohmann::json& j);
// Hand-rolled log-log scatter of error against the first parameter.
std::string report_svg(const Report& r);

// Writes <out_dir>/<name>.<ext> for each format in the comma list
// "csv,json,svg"; creates out_dir. Returns the paths written.
std::vector<std::string> emit_report(const Report& r, const std::string& out_dir,
                                     const std::string& formats, bool live_timing);

}  // namespace magctrl
