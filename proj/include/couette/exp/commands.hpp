#pragma once

#include "couette/exp/config.hpp"

#include <string>

namespace couette::exp {

/// Each command writes its data files, an SVG where applicable and
/// <command>.record.json into the configured output directory. Errors
/// propagate as couette::Error subclasses. config_path, when nonempty, is
/// hashed into the record as an input.
void cmd_resolvent_scan(const ScanConfig& c, const std::string& config_path = "");
void cmd_pressure_verify(const PressureConfig& c, const std::string& config_path = "");
/// Rows already present in a threshold_sweep.csv written for the same
/// configuration are reused.
void cmd_threshold_sweep(const ThresholdConfig& c, const std::string& config_path = "");
void cmd_norm_report(const NormReportConfig& c, const std::string& config_path = "");
void cmd_simulate(const SimulateConfig& c, const std::string& config_path = "");

/// Exit codes: 0 ok, 2 configuration or usage error, 3 numerical failure,
/// 4 I/O failure.
int run_cli(int argc, char** argv);

} // namespace couette::exp
