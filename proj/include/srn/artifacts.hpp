#pragma once

#include <string>

#include "srn/experiments.hpp"

namespace srn {

/// %.17g rendering used by every CSV column.
std::string format_real(double x);

/// Writes trajectory.csv, bounds.csv (plus any per-anchor files and tables),
/// report.json, config.cfg and plot.gp into `dir`, creating it if needed.
void write_artifacts(const ExperimentResult& result, const std::string& dir);

std::string report_json(const ExperimentResult& result);
std::string trajectory_csv(const ExperimentResult& result);
std::string bounds_csv(const std::vector<BoundRow>& rows);
std::string plot_script(const ExperimentResult& result);

}  // namespace srn
