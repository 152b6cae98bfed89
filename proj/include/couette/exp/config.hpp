#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace couette::exp {

/// Command-line values that take precedence over the JSON document.
struct Overrides {
    std::optional<std::string> out;
    std::optional<int> jobs;
    std::optional<std::uint64_t> seed;
};

struct Common {
    std::string out_dir = ".";
    int jobs = 1;
};

struct GridSpec {
    int nx = 8;
    int ny = 33;
};

struct ScanConfig {
    Common common;
    GridSpec grid;
    std::vector<double> reynolds{100, 200, 400, 800};
    double omega_max = 0.0; ///< 0 selects 10 (1 + spectral radius)
    int n_points = 128;
};

struct PressureConfig {
    Common common;
    GridSpec grid;
    std::vector<double> reynolds{50, 500};
    std::uint64_t seed = 1; ///< first seed; seed 0 denotes the zero field
    int n_seeds = 100;
    int max_mode = 2;
    double smoothness = 4.0;
};

struct ThresholdConfig {
    Common common;
    GridSpec grid;
    std::vector<double> reynolds{100, 200, 400};
    std::string mode = "guaranteed"; ///< "guaranteed" or "search"
    std::uint64_t seed = 1;          ///< perturbation shape
    int max_mode = 2;
    double smoothness = 4.0;
    double T_end = 50.0;
    double dt = 0.02;
    bool check_dt_halving = true;
    std::optional<double> c;          ///< guaranteed-bound prefactor; calibrated when absent
    std::vector<double> calib_reynolds{100, 200, 400};
    int calib_fields = 100;
    double eps_hi_init = 1e-3;
    double tol_rel = 0.05;
};

struct NormReportConfig {
    Common common;
    std::string snapshot;
    std::optional<double> R; ///< defaults to the Reynolds number stored in the snapshot
};

struct SimulateConfig {
    Common common;
    GridSpec grid;
    double R = 100.0;
    double eps = 0.0;
    std::uint64_t seed = 1;
    int max_mode = 2;
    double smoothness = 4.0;
    double dt = 0.02;
    double T_end = 50.0;
    int sample_every = 10;
    bool dealias = true;
    std::string scheme = "etd1"; ///< "etd1" or "etd2"
    std::string form = "u";      ///< "u" or "v"
};

/// Parse a JSON document; unknown keys and out-of-range values throw
/// ArgumentError naming the offending field.
nlohmann::json load_json(const std::string& path);

ScanConfig parse_scan(const nlohmann::json& j, const Overrides& o);
PressureConfig parse_pressure(const nlohmann::json& j, const Overrides& o);
ThresholdConfig parse_threshold(const nlohmann::json& j, const Overrides& o);
NormReportConfig parse_norm_report(const nlohmann::json& j, const Overrides& o);
SimulateConfig parse_simulate(const nlohmann::json& j, const Overrides& o);

/// Result-affecting part of a resolved configuration (defaults filled in,
/// output directory and job count left out). Objects serialize with sorted
/// keys, so equal configurations hash equally.
nlohmann::json to_json(const ScanConfig& c);
nlohmann::json to_json(const PressureConfig& c);
nlohmann::json to_json(const ThresholdConfig& c);
nlohmann::json to_json(const NormReportConfig& c);
nlohmann::json to_json(const SimulateConfig& c);

} // namespace couette::exp
