#include "magctrl/emit.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace magctrl {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

}  // namespace

OrderFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
  OrderFit f;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i) {
    if (xs[i] > 0.0 && ys[i] > 0.0 && std::isfinite(xs[i]) && std::isfinite(ys[i])) {
      lx.push_back(std::log(xs[i]));
      ly.push_back(std::log(ys[i]));
    }
  }
  const std::size_t n = lx.size();
  f.points = static_cast<int>(n);
  if (n < 2) return f;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) { mx += lx[i]; my += ly[i]; }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) return f;
  f.order = sxy / sxx;
  if (n > 2) {
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = ly[i] - my - f.order * (lx[i] - mx);
      ss += r * r;
    }
    f.stderr_ = std::sqrt(ss / (static_cast<double>(n) - 2.0) / sxx);
  }
  f.ok = true;
  return f;
}

bool Report::pass() const {
  for (const auto& [k, v] : passes)
    if (!v) return false;
  return true;
}

std::vector<double> Report::param_column(std::size_t i) const {
  std::vector<double> out;
  for (const auto& r : rows)
    out.push_back(i < r.params.size() ? r.params[i] : 0.0);
  return out;
}

std::vector<double> Report::error_column() const {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r.error);
  return out;
}

std::string report_csv(const Report& r, bool live_timing) {
  std::string out;
  for (const auto& p : r.param_names) out += p + ",";
  out += "T_total,error,wall_ms,note\n";
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < r.param_names.size(); ++i)
      out += fmt(i < row.params.size() ? row.params[i] : 0.0) + ",";
    out += fmt(row.T_total) + "," + fmt(row.error) + ",";
    out += fmt(live_timing ? row.wall_ms : 0.0) + ",";
    out += csv_escape(row.note) + "\n";
  }
  return out;
}

nlohmann::json report_json(const Report& r) {
  nlohmann::json j;
  j["format"] = "MGREP1";
  j["name"] = r.name;
  j["params"] = r.param_names;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    nlohmann::json jr;
    jr["params"] = row.params;
    jr["T_total"] = row.T_total;
    jr["error"] = row.error;
    jr["wall_ms"] = row.wall_ms;
    jr["note"] = row.note;
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  if (r.fit.ok) {
    j["fit"]["order"] = r.fit.order;
    j["fit"]["stderr"] = r.fit.stderr_;
    j["fit"]["points"] = r.fit.points;
  }
  j["info"] = r.info;
  j["passes"] = r.passes;
  j["pass"] = r.pass();
  j["config"] = r.config_echo;
  return j;
}

Report report_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "MGREP1")
    throw std::runtime_error("report: not an MGREP1 document");
  Report r;
  r.name = j.at("name").get<std::string>();
  r.param_names = j.at("params").get<std::vector<std::string>>();
  for (const auto& jr : j.at("rows")) {
    Report::Row row;
    row.params = jr.at("params").get<std::vector<double>>();
    row.T_total = jr.at("T_total").get<double>();
    row.error = jr.at("error").get<double>();
    row.wall_ms = jr.at("wall_ms").get<double>();
    row.note = jr.at("note").get<std::string>();
    r.rows.push_back(std::move(row));
  }
  if (j.contains("fit")) {
    r.fit.ok = true;
    r.fit.order = j["fit"].at("order").get<double>();
    r.fit.stderr_ = j["fit"].at("stderr").get<double>();
    r.fit.points = j["fit"].at("points").get<int>();
  }
  if (j.contains("info"))
    r.info = j["info"].get<std::map<std::string, std::string>>();
  if (j.contains("passes"))
    r.passes = j["passes"].get<std::map<std::string, bool>>();
  if (j.contains("config"))
    r.config_echo = j["config"].get<std::map<std::string, std::string>>();
  return r;
}

std::string report_svg(const Report& r) {
  const int W = 640, H = 480;
  const int ml = 70, mr = 20, mt = 40, mb = 50;
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(W) +
       "\" height=\"" + std::to_string(H) + "\" viewBox=\"0 0 " + std::to_string(W) +
       " " + std::to_string(H) + "\">\n";
  s += "<rect width=\"" + std::to_string(W) + "\" height=\"" + std::to_string(H) +
       "\" fill=\"white\"/>\n";
  s += "<text x=\"" + std::to_string(W / 2) + "\" y=\"24\" text-anchor=\"middle\" "
       "font-family=\"monospace\" font-size=\"16\">" + r.name + "</text>\n";

  std::vector<double> xs, ys;
  const auto px = r.param_column(0);
  const auto pe = r.error_column();
  for (std::size_t i = 0; i < pe.size(); ++i)
    if (px[i] > 0.0 && pe[i] > 0.0 && std::isfinite(pe[i])) {
      xs.push_back(std::log10(px[i]));
      ys.push_back(std::log10(pe[i]));
    }
  if (xs.size() < 2) {
    s += "<text x=\"" + std::to_string(W / 2) + "\" y=\"" + std::to_string(H / 2) +
         "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"14\">"
         "fewer than two positive data points</text>\n</svg>\n";
    return s;
  }
  double x0 = xs[0], x1 = xs[0], y0 = ys[0], y1 = ys[0];
  for (std::size_t i = 1; i < xs.size(); ++i) {
    x0 = std::min(x0, xs[i]); x1 = std::max(x1, xs[i]);
    y0 = std::min(y0, ys[i]); y1 = std::max(y1, ys[i]);
  }
  // pad degenerate ranges so the mapping stays finite
  if (x1 - x0 < 1e-12) { x0 -= 0.5; x1 += 0.5; }
  if (y1 - y0 < 1e-12) { y0 -= 0.5; y1 += 0.5; }
  const double pw = W - ml - mr, ph = H - mt - mb;
  auto X = [&](double lx) { return ml + (lx - x0) / (x1 - x0) * pw; };
  auto Y = [&](double ly) { return mt + (y1 - ly) / (y1 - y0) * ph; };

  // decade grid lines with labels
  char buf[64];
  for (int e = static_cast<int>(std::ceil(x0)); e <= static_cast<int>(std::floor(x1)); ++e) {
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.2f\" y1=\"%d\" x2=\"%.2f\" y2=\"%d\" "
                  "stroke=\"#cccccc\" stroke-width=\"1\"/>\n",
                  X(e), mt, X(e), H - mb);
    s += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.2f\" y=\"%d\" text-anchor=\"middle\" "
                  "font-family=\"monospace\" font-size=\"12\">1e%d</text>\n",
                  X(e), H - mb + 18, e);
    s += buf;
  }
  for (int e = static_cast<int>(std::ceil(y0)); e <= static_cast<int>(std::floor(y1)); ++e) {
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%d\" y1=\"%.2f\" x2=\"%d\" y2=\"%.2f\" "
                  "stroke=\"#cccccc\" stroke-width=\"1\"/>\n",
                  ml, Y(e), W - mr, Y(e));
    s += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%d\" y=\"%.2f\" text-anchor=\"end\" "
                  "font-family=\"monospace\" font-size=\"12\">1e%d</text>\n",
                  ml - 6, Y(e) + 4, e);
    s += buf;
  }
  std::snprintf(buf, sizeof(buf),
                "<rect x=\"%d\" y=\"%d\" width=\"%.0f\" height=\"%.0f\" "
                "fill=\"none\" stroke=\"black\"/>\n",
                ml, mt, pw, ph);
  s += buf;
  // axis captions
  s += "<text x=\"" + std::to_string(ml + static_cast<int>(pw) / 2) + "\" y=\"" +
       std::to_string(H - 12) + "\" text-anchor=\"middle\" font-family=\"monospace\" "
       "font-size=\"13\">" + (r.param_names.empty() ? "x" : r.param_names[0]) +
       "</text>\n";
  s += "<text x=\"16\" y=\"" + std::to_string(mt + static_cast<int>(ph) / 2) +
       "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\" "
       "transform=\"rotate(-90 16 " + std::to_string(mt + static_cast<int>(ph) / 2) +
       ")\">error</text>\n";

  std::string pts;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", X(xs[i]), Y(ys[i]));
    pts += buf;
  }
  s += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"#1f77b4\" "
       "stroke-width=\"2\"/>\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::snprintf(buf, sizeof(buf),
                  "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"4\" fill=\"#1f77b4\"/>\n",
                  X(xs[i]), Y(ys[i]));
    s += buf;
  }
  if (r.fit.ok) {
    std::snprintf(buf, sizeof(buf), "order %.3f (stderr %.3f)", r.fit.order, r.fit.stderr_);
    s += "<text x=\"" + std::to_string(W - mr - 8) + "\" y=\"" + std::to_string(mt + 18) +
         "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"13\">" +
         buf + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

std::vector<std::string> emit_report(const Report& r, const std::string& out_dir,
                                     const std::string& formats, bool live_timing) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> written;
  auto want = [&](const std::string& f) {
    return ("," + formats + ",").find("," + f + ",") != std::string::npos;
  };
  auto write = [&](const std::string& ext, const std::string& body) {
    const std::string path = out_dir + "/" + r.name + "." + ext;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit: cannot write " + path);
    out << body;
    written.push_back(path);
  };
  if (want("csv")) write("csv", report_csv(r, live_timing));
  if (want("json")) write("json", report_json(r).dump(2) + "\n");
  if (want("svg")) write("svg", report_svg(r));
  return written;
}

}  // namespace magctrl
