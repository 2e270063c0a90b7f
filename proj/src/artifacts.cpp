#include "srn/artifacts.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>


namespace srn {

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::vector<BoundRow> main_bounds(const ExperimentResult& r) {
  std::vector<BoundRow> rows;
  for (const auto& b : r.bounds) {
    if (b.filename.empty() || b.filename == "bounds.csv") rows.insert(rows.end(), b.rows.begin(), b.rows.end());
  }
  return rows;
}

nlohmann::json checks_json(const std::vector<Check>& checks) {
  auto arr = nlohmann::json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name}, {"pass", c.pass}, {"margin", std::isfinite(c.margin) ? nlohmann::json(c.margin) : nlohmann::json(nullptr)}});
  }
  return arr;
}

}  // namespace

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trajectory_csv(const ExperimentResult& r) {
  std::ostringstream o;
  o << "step_or_time,magnitude,angle,loss\n";
  const auto& t = r.trajectory;
  for (std::size_t i = 0; i < t.size(); ++i) {
    o << format_real(t.times[i]) << ',' << format_real(t.states[i].magnitude) << ','
      << format_real(t.states[i].angle) << ','
      << (i < t.losses.size() ? format_real(t.losses[i]) : std::string("nan")) << '\n';
  }
  return o.str();
}

std::string bounds_csv(const std::vector<BoundRow>& rows) {
  std::ostringstream o;
  o << "step_or_time,kind,lower,upper\n";
  for (const auto& b : rows) {
    o << format_real(b.x) << ',' << b.kind << ',' << format_real(b.lower) << ',' << format_real(b.upper) << '\n';
  }
  return o.str();
}

std::string report_json(const ExperimentResult& r) {
  nlohmann::json j;
  j["experiment"] = r.experiment;
  j["seed"] = r.seed;
  j["checks"] = checks_json(r.checks);
  j["runtime_seconds"] = r.runtime_seconds;
  j["advisory_checks"] = checks_json(r.advisory);
  j["flags"] = r.flags;
  j["warnings"] = r.warnings;
  j["pass"] = r.ok();
  return j.dump(2) + "\n";
}

std::string plot_script(const ExperimentResult& r) {
  std::ostringstream o;
  const std::string x = r.time_unit;
  o << "# gnuplot script; run from this directory: gnuplot plot.gp\n"
    << "set datafile separator ','\n"
    << "set terminal pngcairo size 1200,500\n"
    << "set output '" << r.experiment << ".png'\n"
    << "set key autotitle columnhead\n"
    << "set multiplot layout 1,2 title '" << r.experiment << " (seed " << r.seed << ")'\n";
  for (const char* kind : {"angle", "magnitude"}) {
    const int col = std::string(kind) == "angle" ? 3 : 2;
    o << "set title '" << kind << "'\nset xlabel '" << x << "'\n"
      << "plot 'trajectory.csv' using 1:" << col << " with lines lw 2 title '" << kind << "'";
    bool any = false;
    for (const auto& b : r.bounds) {
      for (const auto& row : b.rows) {
        if (row.kind == kind) {
          any = true;
          break;
        }
      }
    }
    if (any) {
      o << ", \\\n     'bounds.csv' using 1:(strcol(2) eq '" << kind
        << "' ? $3 : 1/0) with lines lc rgb 'orange' title 'lower'"
        << ", \\\n     'bounds.csv' using 1:(strcol(2) eq '" << kind
        << "' ? $4 : 1/0) with lines lc rgb 'forest-green' title 'upper'";
    }
    o << "\n";
  }
  o << "unset multiplot\n";
  return o.str();
}

void write_artifacts(const ExperimentResult& r, const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  fs::create_directories(root);
  write_file(root / "trajectory.csv", trajectory_csv(r));
  write_file(root / "bounds.csv", bounds_csv(main_bounds(r)));
  for (const auto& b : r.bounds) {
    if (!b.filename.empty() && b.filename != "bounds.csv") write_file(root / b.filename, bounds_csv(b.rows));
  }
  for (const auto& t : r.tables) {
    std::ostringstream o;
    for (std::size_t i = 0; i < t.header.size(); ++i) o << (i ? "," : "") << t.header[i];
    o << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) o << (i ? "," : "") << format_real(row[i]);
      o << '\n';
    }
    write_file(root / t.filename, o.str());
  }
  write_file(root / "config.cfg", r.config_text);
  write_file(root / "report.json", report_json(r));
  write_file(root / "plot.gp", plot_script(r));
}

}  // namespace srn
