#include "couette/exp/config.hpp"

#include "couette/error.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace couette::exp {

using nlohmann::json;

namespace {

/// Typed access to one JSON object that remembers which keys were read.
class Fields {
public:
    Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ArgumentError(where_ + ": expected a JSON object");
    }

    bool has(const std::string& k) {
        seen_.insert(k);
        return j_.contains(k);
    }

    double number(const std::string& k, double def) {
        if (!has(k)) return def;
        if (!j_[k].is_number()) fail(k, "must be a number");
        return j_[k].get<double>();
    }

    long integer(const std::string& k, long def) {
        if (!has(k)) return def;
        if (!j_[k].is_number_integer()) fail(k, "must be an integer");
        return j_[k].get<long>();
    }

    std::uint64_t u64(const std::string& k, std::uint64_t def) {
        if (!has(k)) return def;
        if (!j_[k].is_number_integer() || (j_[k].is_number_integer() && !j_[k].is_number_unsigned() && j_[k].get<long>() < 0))
            fail(k, "must be a nonnegative integer");
        return j_[k].get<std::uint64_t>();
    }

    bool boolean(const std::string& k, bool def) {
        if (!has(k)) return def;
        if (!j_[k].is_boolean()) fail(k, "must be true or false");
        return j_[k].get<bool>();
    }

    std::string string(const std::string& k, const std::string& def) {
        if (!has(k)) return def;
        if (!j_[k].is_string()) fail(k, "must be a string");
        return j_[k].get<std::string>();
    }

    std::vector<double> numbers(const std::string& k, const std::vector<double>& def) {
        if (!has(k)) return def;
        if (!j_[k].is_array()) fail(k, "must be an array of numbers");
        std::vector<double> v;
        for (const auto& e : j_[k]) {
            if (!e.is_number()) fail(k, "must be an array of numbers");
            v.push_back(e.get<double>());
        }
        return v;
    }

    const json& object(const std::string& k) {
        seen_.insert(k);
        return j_[k];
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ArgumentError(where_ + ": unknown key '" + it.key() + "'");
    }

    [[noreturn]] void fail(const std::string& k, const std::string& msg) const {
        throw ArgumentError(where_ + (where_.empty() ? "" : ".") + k + " " + msg);
    }

    const std::string& where() const { return where_; }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& msg) {
    if (!ok) throw ArgumentError("config field '" + field + "' " + msg);
}

Common read_common(Fields& f, const Overrides& o) {
    Common c;
    c.out_dir = f.string("out_dir", c.out_dir);
    c.jobs = static_cast<int>(f.integer("jobs", c.jobs));
    if (o.out) c.out_dir = *o.out;
    if (o.jobs) c.jobs = *o.jobs;
    require(c.jobs >= 1, "jobs", "must be at least 1");
    require(!c.out_dir.empty(), "out_dir", "must not be empty");
    return c;
}

GridSpec read_grid(Fields& f, GridSpec def) {
    if (!f.has("grid")) return def;
    Fields g(f.object("grid"), "grid");
    def.nx = static_cast<int>(g.integer("nx", def.nx));
    def.ny = static_cast<int>(g.integer("ny", def.ny));
    g.finish();
    require(def.nx > 0 && def.nx % 2 == 0, "grid.nx", "must be a positive even integer");
    require(def.ny >= 8, "grid.ny", "must be at least 8");
    return def;
}

void check_reynolds(const std::vector<double>& r, const std::string& name) {
    require(!r.empty(), name, "must list at least one Reynolds number");
    for (double v : r) require(v > 0.0, name, "entries must be positive");
}

void check_field_params(int max_mode, double smoothness, const GridSpec& g) {
    require(max_mode >= 1 && max_mode < g.nx / 2, "max_mode", "must be in 1 .. nx/2-1");
    require(smoothness >= 0.0, "smoothness", "must be nonnegative");
}

json grid_json(const GridSpec& g) { return {{"nx", g.nx}, {"ny", g.ny}}; }

} // namespace

json load_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ArgumentError("cannot read config file " + path);
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw ArgumentError("config file " + path + " is not valid JSON: " + e.what());
    }
}

ScanConfig parse_scan(const json& j, const Overrides& o) {
    Fields f(j, "config");
    ScanConfig c;
    c.common = read_common(f, o);
    c.grid = read_grid(f, c.grid);
    c.reynolds = f.numbers("reynolds", c.reynolds);
    c.omega_max = f.number("omega_max", c.omega_max);
    c.n_points = static_cast<int>(f.integer("n_points", c.n_points));
    f.finish();
    check_reynolds(c.reynolds, "reynolds");
    require(c.omega_max >= 0.0, "omega_max", "must be nonnegative (0 = automatic)");
    require(c.n_points >= 64, "n_points", "must be at least 64");
    return c;
}

PressureConfig parse_pressure(const json& j, const Overrides& o) {
    Fields f(j, "config");
    PressureConfig c;
    c.common = read_common(f, o);
    c.grid = read_grid(f, c.grid);
    c.reynolds = f.numbers("reynolds", c.reynolds);
    c.seed = f.u64("seed", c.seed);
    c.n_seeds = static_cast<int>(f.integer("n_seeds", c.n_seeds));
    c.max_mode = static_cast<int>(f.integer("max_mode", c.max_mode));
    c.smoothness = f.number("smoothness", c.smoothness);
    f.finish();
    if (o.seed) c.seed = *o.seed;
    check_reynolds(c.reynolds, "reynolds");
    require(c.n_seeds >= 1, "n_seeds", "must be at least 1");
    check_field_params(c.max_mode, c.smoothness, c.grid);
    return c;
}

ThresholdConfig parse_threshold(const json& j, const Overrides& o) {
    Fields f(j, "config");
    ThresholdConfig c;
    c.common = read_common(f, o);
    c.grid = read_grid(f, c.grid);
    c.reynolds = f.numbers("reynolds", c.reynolds);
    c.mode = f.string("mode", c.mode);
    c.seed = f.u64("seed", c.seed);
    c.max_mode = static_cast<int>(f.integer("max_mode", c.max_mode));
    c.smoothness = f.number("smoothness", c.smoothness);
    c.T_end = f.number("T_end", c.T_end);
    c.dt = f.number("dt", c.dt);
    c.check_dt_halving = f.boolean("check_dt_halving", c.check_dt_halving);
    if (f.has("c")) c.c = f.number("c", 0.0);
    c.calib_reynolds = f.numbers("calib_reynolds", c.calib_reynolds);
    c.calib_fields = static_cast<int>(f.integer("calib_fields", c.calib_fields));
    c.eps_hi_init = f.number("eps_hi_init", c.eps_hi_init);
    c.tol_rel = f.number("tol_rel", c.tol_rel);
    f.finish();
    if (o.seed) c.seed = *o.seed;
    check_reynolds(c.reynolds, "reynolds");
    require(c.mode == "guaranteed" || c.mode == "search", "mode", "must be \"guaranteed\" or \"search\"");
    if (c.mode == "search") require(c.reynolds.size() >= 4, "reynolds", "needs at least four entries in search mode");
    check_field_params(c.max_mode, c.smoothness, c.grid);
    require(c.dt > 0.0, "dt", "must be positive");
    require(c.T_end >= c.dt, "T_end", "must be at least dt");
    if (c.c) require(*c.c > 0.0, "c", "must be positive");
    check_reynolds(c.calib_reynolds, "calib_reynolds");
    require(c.calib_fields >= 1, "calib_fields", "must be at least 1");
    require(c.eps_hi_init > 0.0, "eps_hi_init", "must be positive");
    require(c.tol_rel > 0.0, "tol_rel", "must be positive");
    return c;
}

NormReportConfig parse_norm_report(const json& j, const Overrides& o) {
    Fields f(j, "config");
    NormReportConfig c;
    c.common = read_common(f, o);
    c.snapshot = f.string("snapshot", c.snapshot);
    if (f.has("R")) c.R = f.number("R", 0.0);
    f.finish();
    require(!c.snapshot.empty(), "snapshot", "must name a snapshot file");
    if (c.R) require(*c.R > 0.0, "R", "must be positive");
    return c;
}

SimulateConfig parse_simulate(const json& j, const Overrides& o) {
    Fields f(j, "config");
    SimulateConfig c;
    c.common = read_common(f, o);
    c.grid = read_grid(f, c.grid);
    c.R = f.number("R", c.R);
    c.eps = f.number("eps", c.eps);
    c.seed = f.u64("seed", c.seed);
    c.max_mode = static_cast<int>(f.integer("max_mode", c.max_mode));
    c.smoothness = f.number("smoothness", c.smoothness);
    c.dt = f.number("dt", c.dt);
    c.T_end = f.number("T_end", c.T_end);
    c.sample_every = static_cast<int>(f.integer("sample_every", c.sample_every));
    c.dealias = f.boolean("dealias", c.dealias);
    c.scheme = f.string("scheme", c.scheme);
    c.form = f.string("form", c.form);
    f.finish();
    if (o.seed) c.seed = *o.seed;
    require(c.R > 0.0, "R", "must be positive");
    require(c.eps >= 0.0, "eps", "must be nonnegative");
    check_field_params(c.max_mode, c.smoothness, c.grid);
    require(c.dt > 0.0, "dt", "must be positive");
    require(c.T_end >= c.dt, "T_end", "must be at least dt");
    require(c.sample_every >= 1, "sample_every", "must be at least 1");
    require(c.scheme == "etd1" || c.scheme == "etd2", "scheme", "must be \"etd1\" or \"etd2\"");
    require(c.form == "u" || c.form == "v", "form", "must be \"u\" or \"v\"");
    return c;
}

json to_json(const ScanConfig& c) {
    json j = json::object();
    j["grid"] = grid_json(c.grid);
    j["reynolds"] = c.reynolds;
    j["omega_max"] = c.omega_max;
    j["n_points"] = c.n_points;
    return j;
}

json to_json(const PressureConfig& c) {
    json j = json::object();
    j["grid"] = grid_json(c.grid);
    j["reynolds"] = c.reynolds;
    j["seed"] = c.seed;
    j["n_seeds"] = c.n_seeds;
    j["max_mode"] = c.max_mode;
    j["smoothness"] = c.smoothness;
    return j;
}

json to_json(const ThresholdConfig& c) {
    json j = json::object();
    j["grid"] = grid_json(c.grid);
    j["reynolds"] = c.reynolds;
    j["mode"] = c.mode;
    j["seed"] = c.seed;
    j["max_mode"] = c.max_mode;
    j["smoothness"] = c.smoothness;
    j["T_end"] = c.T_end;
    j["dt"] = c.dt;
    j["check_dt_halving"] = c.check_dt_halving;
    if (c.c) j["c"] = *c.c;
    j["calib_reynolds"] = c.calib_reynolds;
    j["calib_fields"] = c.calib_fields;
    j["eps_hi_init"] = c.eps_hi_init;
    j["tol_rel"] = c.tol_rel;
    return j;
}

json to_json(const NormReportConfig& c) {
    json j = json::object();
    j["snapshot"] = c.snapshot;
    if (c.R) j["R"] = *c.R;
    return j;
}

json to_json(const SimulateConfig& c) {
    json j = json::object();
    j["grid"] = grid_json(c.grid);
    j["R"] = c.R;
    j["eps"] = c.eps;
    j["seed"] = c.seed;
    j["max_mode"] = c.max_mode;
    j["smoothness"] = c.smoothness;
    j["dt"] = c.dt;
    j["T_end"] = c.T_end;
    j["sample_every"] = c.sample_every;
    j["dealias"] = c.dealias;
    j["scheme"] = c.scheme;
    j["form"] = c.form;
    return j;
}

} // namespace couette::exp
