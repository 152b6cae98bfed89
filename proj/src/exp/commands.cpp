#include "couette/exp/commands.hpp"

#include "couette/error.hpp"
#include "couette/exp/records.hpp"
#include "couette/exp/svg.hpp"
#include "couette/norms.hpp"
#include "couette/pressure.hpp"
#include "couette/simulate.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace couette::exp {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

/// Runs fn(0..n-1) on up to `jobs` threads; the first failure by index is
/// rethrown after all jobs finish.
template <class F>
void run_jobs(int n, int jobs, F&& fn) {
    std::vector<std::exception_ptr> errs(static_cast<std::size_t>(n));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int i = next++;
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                errs[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    const int nt = std::min(jobs, n);
    if (nt <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

std::string prepare_out(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir);
    return dir;
}

std::string out_path(const Common& c, const std::string& name) { return (fs::path(c.out_dir) / name).string(); }

ExperimentRecord start_record(const std::string& name, json cfg, const std::string& config_path) {
    ExperimentRecord r;
    r.experiment = name;
    r.config = std::move(cfg);
    r.started_utc = utc_now();
    if (!config_path.empty()) r.inputs.emplace_back("config", git_blob_sha1(read_file(config_path)));
    return r;
}

void finish_record(ExperimentRecord& r, const Common& c) {
    r.finished_utc = utc_now();
    r.extra["out_dir"] = c.out_dir;
    r.extra["jobs"] = c.jobs;
    write_atomic(out_path(c, r.experiment + ".record.json"), r.to_json().dump(2) + "\n");
}

std::string join(const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) s += ',';
        s += cells[i];
    }
    return s;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

VelocityField shape_field(const GridSpec& g, std::uint64_t seed, int max_mode, double smoothness) {
    return random_divfree_field(make_grid(g.nx, g.ny), seed, max_mode, smoothness);
}

void log_line(const std::string& s) {
    static std::mutex m;
    std::lock_guard<std::mutex> lk(m);
    std::cerr << s << std::endl;
}

} // namespace

// ---- resolvent-scan --------------------------------------------------------

void cmd_resolvent_scan(const ScanConfig& c, const std::string& config_path) {
    ExperimentRecord rec = start_record("resolvent_scan", to_json(c), config_path);
    prepare_out(c.common.out_dir);
    const GridPtr grid = make_grid(c.grid.nx, c.grid.ny);
    const BaseFlow U = couette_base(grid);
    const int n = static_cast<int>(c.reynolds.size());
    std::vector<ResolventScan> scans(static_cast<std::size_t>(n));
    run_jobs(n, c.common.jobs, [&](int i) {
        const double R = c.reynolds[static_cast<std::size_t>(i)];
        const OperatorAssembly A = assemble_L(grid, U, R);
        scans[static_cast<std::size_t>(i)] = resolvent_sup_scan(A, c.omega_max, c.n_points);
        log_line("resolvent-scan R=" + fmt(R) + " sup=" + fmt(scans[static_cast<std::size_t>(i)].sup));
    });

    std::string csv = csv_preamble() + "\nR,re_s,im_s,norm_l2,norm_htilde,is_sup\n";
    auto row = [&](double R, const ScanPoint& p, int sup) {
        csv += join({fmt(R), fmt(p.s.real()), fmt(p.s.imag()), fmt(p.norm_l2), fmt(p.norm_htilde), std::to_string(sup)}) + "\n";
    };
    std::vector<double> xs, ys;
    for (const auto& s : scans) {
        for (const auto& p : s.points) row(s.R, p, 0);
        const ScanPoint& best = s.points[static_cast<std::size_t>(s.argmax)];
        row(s.R, best, 1);
        xs.push_back(s.R);
        ys.push_back(s.sup);
        rec.rows.push_back({s.R, "sup_l2", s.sup});
        rec.rows.push_back({s.R, "sup_htilde", s.sup_htilde});
        rec.rows.push_back({s.R, "argmax_re_s", best.s.real()});
        rec.rows.push_back({s.R, "argmax_im_s", best.s.imag()});
        rec.rows.push_back({s.R, "edge_flag", s.edge_flag ? 1.0 : 0.0});
        if (s.edge_flag) log_line("warning: R=" + fmt(s.R) + " maximum on the outermost scan frequency");
    }
    write_atomic(out_path(c.common, "resolvent_scan.csv"), csv);

    if (xs.size() >= 2) {
        const LogLogFit fit = loglog_fit(xs, ys);
        LogLogPlot p;
        p.title = "sup resolvent norm vs R";
        p.xlabel = "R";
        p.ylabel = "sup ||(sI - L)^-1||";
        p.x = xs;
        p.y = ys;
        p.fit_slope = fit.slope;
        p.fit_intercept = fit.intercept;
        p.fit_label = "least-squares fit, slope " + fmt(std::round(fit.slope * 1e4) / 1e4);
        p.ref_slope = 1.0;
        p.ref_intercept = -std::log(std::numbers::pi * std::numbers::pi);
        p.ref_label = "R / pi^2";
        write_atomic(out_path(c.common, "resolvent_scan.svg"), render_svg(p));
        rec.extra["slope"] = fit.slope;
        rec.extra["slope_stderr"] = fit.slope_stderr;
        std::cout << "slope " << fmt(fit.slope) << " +- " << fmt(fit.slope_stderr) << "\n";
    }
    finish_record(rec, c.common);
}

// ---- pressure-verify -------------------------------------------------------

void cmd_pressure_verify(const PressureConfig& c, const std::string& config_path) {
    ExperimentRecord rec = start_record("pressure_verify", to_json(c), config_path);
    prepare_out(c.common.out_dir);
    const GridPtr grid = make_grid(c.grid.nx, c.grid.ny);
    const std::size_t nR = c.reynolds.size();
    const int n = c.n_seeds;
    std::vector<std::vector<PressureRatios>> res(static_cast<std::size_t>(n), std::vector<PressureRatios>(nR));
    run_jobs(n, c.common.jobs, [&](int i) {
        const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(i);
        if (seed == 0) return; // zero-field sentinel
        const VelocityField u = random_divfree_field(grid, seed, c.max_mode, c.smoothness);
        for (std::size_t r = 0; r < nR; ++r) res[static_cast<std::size_t>(i)][r] = verify_pressure_estimates(u, c.reynolds[r]);
    });

    std::string csv = csv_preamble() + "\nseed,R,r1_sq,r1_lin,r2\n";
    std::vector<double> max_r1sq(nR, 0.0), max_r1lin(nR, 0.0), max_r2(nR, 0.0);
    for (int i = 0; i < n; ++i) {
        const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(i);
        for (std::size_t r = 0; r < nR; ++r) {
            const PressureRatios& p = res[static_cast<std::size_t>(i)][r];
            csv += join({std::to_string(seed), fmt(c.reynolds[r]), fmt(p.r1_sq), fmt(p.r1_lin), fmt(p.r2)}) + "\n";
            max_r1sq[r] = std::max(max_r1sq[r], p.r1_sq);
            max_r1lin[r] = std::max(max_r1lin[r], p.r1_lin);
            max_r2[r] = std::max(max_r2[r], p.r2);
        }
    }
    write_atomic(out_path(c.common, "pressure_verify.csv"), csv);
    for (std::size_t r = 0; r < nR; ++r) {
        rec.rows.push_back({c.reynolds[r], "max_r1_sq", max_r1sq[r]});
        rec.rows.push_back({c.reynolds[r], "max_r1_lin", max_r1lin[r]});
        rec.rows.push_back({c.reynolds[r], "max_r2", max_r2[r]});
        std::cout << "R=" << fmt(c.reynolds[r]) << " max r1_sq=" << fmt(max_r1sq[r]) << " max r1_lin=" << fmt(max_r1lin[r])
                  << " max r2=" << fmt(max_r2[r]) << "\n";
    }
    finish_record(rec, c.common);
}

// ---- threshold-sweep -------------------------------------------------------

namespace {

const char* threshold_header = "R,eps_lo,eps_hi,eps_mid,verdict_T,n_bisections,eps_guaranteed,decay,decay_dt_half";

/// Completed rows of a previous run with the same configuration, keyed by
/// the formatted R.
std::map<std::string, std::string> resumable_rows(const std::string& path, const std::string& hash_line) {
    std::map<std::string, std::string> rows;
    if (!fs::exists(path)) return rows;
    std::stringstream ss(read_file(path));
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(ss, line)) lines.push_back(line);
    if (lines.size() < 3 || lines[1] != hash_line || lines[2] != threshold_header) return rows;
    for (std::size_t i = 3; i < lines.size(); ++i) {
        const auto cells = split(lines[i]);
        if (cells.size() != 9) continue;
        if (cells[7] != "0" && cells[7] != "1") continue; // gap row
        rows[cells[0]] = lines[i];
    }
    return rows;
}

Calibration calibrate_for(const ThresholdConfig& c, const GridPtr& grid, ExperimentRecord& rec) {
    if (c.c) {
        Calibration cal;
        cal.c = *c.c;
        cal.K = 1.0 / *c.c;
        rec.extra["calibration"] = {{"source", "config"}, {"c", cal.c}};
        return cal;
    }
    const BaseFlow U = couette_base(grid);
    const std::size_t nR = c.calib_reynolds.size();
    std::vector<ResolventScan> scans(nR);
    run_jobs(static_cast<int>(nR), c.common.jobs, [&](int i) {
        const OperatorAssembly A = assemble_L(grid, U, c.calib_reynolds[static_cast<std::size_t>(i)]);
        scans[static_cast<std::size_t>(i)] = resolvent_sup_scan(A, 0.0, 128);
    });
    std::vector<double> emb(static_cast<std::size_t>(c.calib_fields), 0.0);
    run_jobs(c.calib_fields, c.common.jobs, [&](int i) {
        const VelocityField f = random_divfree_field(grid, c.seed + static_cast<std::uint64_t>(i), c.max_mode, c.smoothness);
        double m = 0.0;
        for (double R : c.calib_reynolds) m = std::max(m, embedding_ratio(f, R));
        emb[static_cast<std::size_t>(i)] = m;
    });
    const Calibration cal = calibrate(scans, *std::max_element(emb.begin(), emb.end()));
    rec.extra["calibration"] = {{"source", "computed"}, {"C", cal.C}, {"Ctilde", cal.Ctilde}, {"K", cal.K}, {"c", cal.c}};
    log_line("calibration C=" + fmt(cal.C) + " Ctilde=" + fmt(cal.Ctilde) + " c=" + fmt(cal.c));
    return cal;
}

} // namespace

void cmd_threshold_sweep(const ThresholdConfig& c, const std::string& config_path) {
    ExperimentRecord rec = start_record("threshold_sweep", to_json(c), config_path);
    prepare_out(c.common.out_dir);
    const GridPtr grid = make_grid(c.grid.nx, c.grid.ny);
    const VelocityField shape = random_divfree_field(grid, c.seed, c.max_mode, c.smoothness);
    const Calibration cal = calibrate_for(c, grid, rec);

    const std::string path = out_path(c.common, "threshold_sweep.csv");
    const std::string hash_line = "# config_hash=" + rec.config_hash();
    const auto resumed = resumable_rows(path, hash_line);

    const std::size_t nR = c.reynolds.size();
    std::vector<std::string> rows(nR);
    std::vector<int> todo;
    std::string head = csv_preamble() + "\n" + hash_line + "\n" + threshold_header + "\n";
    std::string initial = head;
    for (std::size_t i = 0; i < nR; ++i) {
        const auto it = resumed.find(fmt(c.reynolds[i]));
        if (it != resumed.end()) {
            rows[i] = it->second;
            initial += rows[i] + "\n";
            log_line("threshold-sweep R=" + fmt(c.reynolds[i]) + " resumed from existing CSV");
        } else {
            todo.push_back(static_cast<int>(i));
        }
    }
    write_atomic(path, initial);

    ThresholdOptions opt;
    opt.T_end = c.T_end;
    opt.dt = c.dt;
    std::mutex collector;
    std::exception_ptr first_error;
    int first_error_index = std::numeric_limits<int>::max();

    run_jobs(static_cast<int>(todo.size()), c.common.jobs, [&](int t) {
        const std::size_t i = static_cast<std::size_t>(todo[static_cast<std::size_t>(t)]);
        const double R = c.reynolds[i];
        std::string line;
        try {
            const VelocityField f = normalize_h6m(shape, R);
            const double eps = cal.c / (R * R * R);
            auto run = [&](double dt) {
                SimConfig s;
                s.R = R;
                s.eps = eps;
                s.f = f;
                s.dt = dt;
                s.T_end = c.T_end;
                s.sample_every = std::max(1, static_cast<int>(std::lround(0.2 / dt)));
                try {
                    return simulate(s).decay;
                } catch (const NumericalError&) {
                    return false;
                }
            };
            const bool decay = run(c.dt);
            const double decay_half = c.check_dt_halving ? (run(0.5 * c.dt) ? 1.0 : 0.0) : nan_v;
            double lo = decay ? eps : nan_v, hi = decay ? nan_v : eps, mid = nan_v;
            int nb = 0;
            if (c.mode == "search") {
                const ThresholdResult tr = threshold_search(R, f, c.eps_hi_init, c.tol_rel, opt);
                lo = tr.eps_lo;
                hi = tr.found ? tr.eps_hi : std::numeric_limits<double>::infinity();
                mid = tr.found ? tr.eps_mid : nan_v;
                nb = tr.n_bisections;
            }
            line = join({fmt(R), fmt(lo), fmt(hi), fmt(mid), fmt(c.T_end), std::to_string(nb), fmt(eps), decay ? "1" : "0",
                         fmt(decay_half)});
            log_line("threshold-sweep R=" + fmt(R) + " eps=" + fmt(eps) + " decay=" + (decay ? "yes" : "no"));
        } catch (...) {
            line = join({fmt(R), "nan", "nan", "nan", "nan", "0", "nan", "nan", "nan"});
            std::lock_guard<std::mutex> lk(collector);
            if (static_cast<int>(i) < first_error_index) {
                first_error_index = static_cast<int>(i);
                first_error = std::current_exception();
            }
        }
        std::lock_guard<std::mutex> lk(collector);
        rows[i] = line;
        append_line(path, line);
    });

    std::string final_csv = head;
    for (const auto& r : rows) final_csv += r + "\n";
    write_atomic(path, final_csv);

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < nR; ++i) {
        const auto cells = split(rows[i]);
        const double R = std::stod(cells[0]);
        const double mid = std::stod(cells[3]);
        const double eps = std::stod(cells[6]);
        const double decay = std::stod(cells[7]);
        rec.rows.push_back({R, "eps_guaranteed", eps});
        rec.rows.push_back({R, "decay", decay});
        rec.rows.push_back({R, "decay_dt_half", std::stod(cells[8])});
        if (c.mode == "search") {
            rec.rows.push_back({R, "eps_mid", mid});
            if (std::isfinite(mid) && mid > 0.0) {
                xs.push_back(R);
                ys.push_back(mid);
            }
        } else if (decay == 1.0) {
            xs.push_back(R);
            ys.push_back(eps);
        }
    }
    if (xs.size() >= 2) {
        const LogLogFit fit = loglog_fit(xs, ys);
        LogLogPlot p;
        p.title = c.mode == "search" ? "threshold amplitude vs R" : "guaranteed amplitude vs R";
        p.xlabel = "R";
        p.ylabel = "eps";
        p.x = xs;
        p.y = ys;
        p.fit_slope = fit.slope;
        p.fit_intercept = fit.intercept;
        p.fit_label = "least-squares fit, slope " + fmt(std::round(fit.slope * 1e4) / 1e4);
        p.ref_slope = -3.0;
        p.ref_intercept = std::log(cal.c);
        p.ref_label = "c R^-3, c = " + fmt(cal.c);
        write_atomic(out_path(c.common, "threshold_sweep.svg"), render_svg(p));
        rec.extra["slope"] = fit.slope;
        rec.extra["slope_stderr"] = fit.slope_stderr;
        std::cout << "slope " << fmt(fit.slope) << "\n";
    }
    finish_record(rec, c.common);
    if (first_error) std::rethrow_exception(first_error);
}

// ---- norm-report -----------------------------------------------------------

void cmd_norm_report(const NormReportConfig& c, const std::string& config_path) {
    ExperimentRecord rec = start_record("norm_report", to_json(c), config_path);
    prepare_out(c.common.out_dir);
    const Snapshot snap = read_snapshot(c.snapshot);
    rec.inputs.emplace_back("snapshot", git_blob_sha1(read_file(c.snapshot)));
    const double R = c.R ? *c.R : snap.R;
    if (!(R > 0.0)) throw ArgumentError("norm-report: R must be positive (snapshot stores R=" + fmt(snap.R) + ")");

    const NormReport rep = norm_report(snap.u, R);
    ScaleDecomposition dec;
    dec.R = R;
    if (rep.h6m.value > 0.0) dec = scale_decomposition(snap.u, R);

    static const char* names[6] = {"h2", "d3", "d4", "f2_xxyyy", "f2_yyyyy", "f2_yyyyyy"};
    json comp = json::object(), ratio = json::object();
    for (int i = 0; i < 6; ++i) {
        comp[names[i]] = dec.component[static_cast<std::size_t>(i)];
        ratio[names[i]] = dec.ratio[static_cast<std::size_t>(i)];
    }
    json j;
    j["R"] = R;
    j["t"] = snap.t;
    j["grid"] = {{"nx", snap.u.grid()->nx}, {"ny", snap.u.grid()->ny}};
    j["l2"] = rep.l2;
    j["h1_sq"] = rep.h_n[0];
    j["h2_sq"] = rep.h_n[1];
    j["htilde_sq"] = {{"value", rep.htilde.value}, {"summands", rep.htilde.summands}};
    j["h6m_sq"] = {{"value", rep.h6m.value}, {"summands", rep.h6m.summands}};
    j["max_norm"] = rep.max_norm;
    j["scale_decomposition"] = {{"h6m", dec.h6m}, {"components", comp}, {"ratios", ratio}};
    j["code_version"] = code_version;
    write_atomic(out_path(c.common, "norm_report.json"), j.dump(2) + "\n");

    rec.rows.push_back({R, "l2", rep.l2});
    rec.rows.push_back({R, "htilde_sq", rep.htilde.value});
    rec.rows.push_back({R, "h6m_sq", rep.h6m.value});
    rec.rows.push_back({R, "max_norm", rep.max_norm});
    finish_record(rec, c.common);
}

// ---- simulate --------------------------------------------------------------

void cmd_simulate(const SimulateConfig& c, const std::string& config_path) {
    ExperimentRecord rec = start_record("simulate", to_json(c), config_path);
    prepare_out(c.common.out_dir);
    SimConfig s;
    s.R = c.R;
    s.eps = c.eps;
    s.f = normalize_h6m(shape_field(c.grid, c.seed, c.max_mode, c.smoothness), c.R);
    s.dt = c.dt;
    s.T_end = c.T_end;
    s.sample_every = c.sample_every;
    s.dealias = c.dealias;
    s.scheme = c.scheme == "etd2" ? Scheme::etd2 : Scheme::etd1;
    write_snapshot(out_path(c.common, "simulate_initial.cfs"), s.f, c.R, 0.0);

    const Trajectory tr = c.form == "v" ? simulate_v(s) : simulate(s);
    std::string csv = csv_preamble() + "\nt,l2,htilde,h6m,maxnorm,div_resid,maxnorm_x\n";
    for (const auto& p : tr.samples)
        csv += join({fmt(p.t), fmt(p.l2), fmt(p.htilde), fmt(p.h6m), fmt(p.maxnorm), fmt(p.div_resid), fmt(p.maxnorm_x)}) + "\n";
    write_atomic(out_path(c.common, "simulate_trajectory.csv"), csv);

    rec.rows.push_back({c.R, "decay", tr.decay ? 1.0 : 0.0});
    rec.rows.push_back({c.R, "max_div_resid", tr.max_div_resid});
    rec.rows.push_back({c.R, "top_third_fraction", tr.top_third_fraction});
    rec.rows.push_back({c.R, "under_resolved", tr.under_resolved ? 1.0 : 0.0});
    rec.rows.push_back({c.R, "dt_final", tr.dt});
    rec.rows.push_back({c.R, "dt_halvings", static_cast<double>(tr.dt_halvings)});
    if (tr.under_resolved) log_line("warning: trajectory under-resolved (top-third spectral energy fraction " +
                                    fmt(tr.top_third_fraction) + ")");
    std::cout << "decay " << (tr.decay ? "yes" : "no") << ", steps " << tr.steps << ", max div residual "
              << fmt(tr.max_div_resid) << "\n";
    finish_record(rec, c.common);
}

// ---- CLI -------------------------------------------------------------------

int run_cli(int argc, char** argv) {
    CLI::App app{"couette-lab: resolvent-based stability experiments for plane Couette flow"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path, out;
    int jobs = 1;
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "JSON configuration file");
    auto* o_out = app.add_option("--out", out, "output directory");
    auto* o_jobs = app.add_option("--jobs", jobs, "concurrent jobs");
    auto* o_seed = app.add_option("--seed", seed, "random seed");

    auto* scan = app.add_subcommand("resolvent-scan", "sup of the resolvent norm over Re s >= 0, per R");
    auto* pres = app.add_subcommand("pressure-verify", "pressure estimate ratios over a field ensemble");
    auto* thr = app.add_subcommand("threshold-sweep", "decay at the guaranteed amplitude, optional threshold search");
    auto* norm = app.add_subcommand("norm-report", "norms and scale decomposition of a snapshot");
    std::string snap_arg;
    double R_arg = 0.0;
    auto* o_snap = norm->add_option("snapshot", snap_arg, "snapshot file");
    auto* o_R = norm->add_option("--R", R_arg, "Reynolds number (default: stored in snapshot)");
    auto* sim = app.add_subcommand("simulate", "one trajectory from a random perturbation");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        json j = config_path.empty() ? json::object() : load_json(config_path);
        Overrides o;
        if (o_out->count()) o.out = out;
        if (o_jobs->count()) o.jobs = jobs;
        if (o_seed->count()) o.seed = seed;
        if (scan->parsed()) cmd_resolvent_scan(parse_scan(j, o), config_path);
        if (pres->parsed()) cmd_pressure_verify(parse_pressure(j, o), config_path);
        if (thr->parsed()) cmd_threshold_sweep(parse_threshold(j, o), config_path);
        if (norm->parsed()) {
            if (!j.is_object()) throw ArgumentError("config: expected a JSON object");
            if (o_snap->count()) j["snapshot"] = snap_arg;
            if (o_R->count()) j["R"] = R_arg;
            cmd_norm_report(parse_norm_report(j, o), config_path);
        }
        if (sim->parsed()) cmd_simulate(parse_simulate(j, o), config_path);
        return 0;
    } catch (const ArgumentError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 4;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

} // namespace couette::exp
