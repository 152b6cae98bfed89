#include "couette/exp/records.hpp"
#include "couette/fields.hpp"
#include "couette/random.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

using namespace couette;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& tag) {
    std::random_device rd;
    fs::path p = fs::temp_directory_path() / ("couette_cli_" + tag + "_" + std::to_string(rd()));
    fs::create_directories(p);
    return p;
}

int lab(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(COUETTE_LAB) + " " + args + " > " + log.string() + " 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

void write_json(const fs::path& p, const json& j) { std::ofstream(p) << j.dump(); }

std::string slurp(const fs::path& p) { return exp::read_file(p.string()); }

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

std::vector<std::string> cells(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    for (std::string c; std::getline(is, c, ',');) out.push_back(c);
    return out;
}

std::size_t count(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
    return n;
}

} // namespace

TEST_CASE("cli: usage and configuration errors exit with 2") {
    const fs::path d = scratch_dir("usage");
    CHECK(lab("--help", d / "log") == 0);
    CHECK(lab("", d / "log") == 2);
    CHECK(lab("no-such-command", d / "log") == 2);
    write_json(d / "empty.json", json{{"reynolds", json::array()}});
    CHECK(lab("resolvent-scan --config " + (d / "empty.json").string() + " --out " + (d / "o").string(), d / "log") == 2);
    CHECK(slurp(d / "log").find("reynolds") != std::string::npos);
    write_json(d / "typo.json", json{{"reynold", {100}}});
    CHECK(lab("resolvent-scan --config " + (d / "typo.json").string(), d / "log") == 2);
    CHECK(lab("resolvent-scan --config " + (d / "missing.json").string(), d / "log") == 2);
    CHECK(lab("simulate --jobs 0", d / "log") == 2);
    CHECK(lab("norm-report", d / "log") == 2);
    fs::remove_all(d);
}

TEST_CASE("cli: resolvent scan is deterministic and plots one fit and one reference") {
    const fs::path d = scratch_dir("scan");
    write_json(d / "scan.json", json{{"grid", {{"nx", 4}, {"ny", 17}}}, {"reynolds", {100, 200}}, {"n_points", 64}});
    const std::string cfg = "--config " + (d / "scan.json").string();
    REQUIRE(lab("resolvent-scan " + cfg + " --out " + (d / "a").string(), d / "log") == 0);
    REQUIRE(lab("resolvent-scan " + cfg + " --jobs 2 --out " + (d / "b").string(), d / "log") == 0);
    const std::string a = slurp(d / "a" / "resolvent_scan.csv"), b = slurp(d / "b" / "resolvent_scan.csv");
    CHECK(a == b);
    const auto ls = lines(a);
    REQUIRE(ls.size() > 3);
    CHECK(ls[0].rfind("# ", 0) == 0);
    CHECK(ls[1] == "R,re_s,im_s,norm_l2,norm_htilde,is_sup");
    int sups = 0;
    for (std::size_t i = 2; i < ls.size(); ++i) sups += cells(ls[i]).back() == "1";
    CHECK(sups == 2);
    const std::string svg = slurp(d / "a" / "resolvent_scan.svg");
    CHECK(count(svg, "class=\"fit\"") == 1);
    CHECK(count(svg, "class=\"reference\"") == 1);
    const json rec = json::parse(slurp(d / "a" / "resolvent_scan.record.json"));
    const json rec_b = json::parse(slurp(d / "b" / "resolvent_scan.record.json"));
    CHECK(rec["config_hash"] == rec_b["config_hash"]);
    CHECK(rec["inputs"][0]["git_blob_sha1"] == exp::git_blob_sha1(slurp(d / "scan.json")));
    fs::remove_all(d);
}

TEST_CASE("cli: pressure verification table") {
    const fs::path d = scratch_dir("pressure");
    write_json(d / "p.json", json{{"seed", 0}, {"n_seeds", 3}, {"reynolds", {50, 500}}});
    REQUIRE(lab("pressure-verify --config " + (d / "p.json").string() + " --out " + d.string(), d / "log") == 0);
    const auto ls = lines(slurp(d / "pressure_verify.csv"));
    REQUIRE(ls.size() == 2 + 6);
    CHECK(ls[1] == "seed,R,r1_sq,r1_lin,r2");
    const auto zero = cells(ls[2]);
    CHECK(zero[0] == "0");
    for (std::size_t i = 2; i < zero.size(); ++i) CHECK(std::stod(zero[i]) == 0.0);
    for (std::size_t i = 4; i < ls.size(); ++i) {
        const auto r = cells(ls[i]);
        CHECK(std::stod(r[2]) > 0.0);
        CHECK(std::stod(r[4]) > 0.0);
    }
    fs::remove_all(d);
}

TEST_CASE("cli: threshold sweep resumes completed rows") {
    const fs::path d = scratch_dir("threshold");
    const json cfg{{"grid", {{"nx", 8}, {"ny", 33}}}, {"reynolds", {100, 200}}, {"c", 100.0}, {"T_end", 5.0},
                   {"check_dt_halving", false}};
    write_json(d / "t.json", cfg);
    const std::string args = "threshold-sweep --config " + (d / "t.json").string() + " --out " + d.string();
    REQUIRE(lab(args, d / "log") == 0);
    const fs::path csv = d / "threshold_sweep.csv";
    auto ls = lines(slurp(csv));
    REQUIRE(ls.size() == 5);
    CHECK(ls[0].rfind("# ", 0) == 0);
    CHECK(ls[1].rfind("# config_hash=", 0) == 0);
    CHECK(ls[2].rfind("R,eps_lo,eps_hi,eps_mid,verdict_T,n_bisections", 0) == 0);
    const auto row = cells(ls[3]);
    REQUIRE(row.size() == 9);
    CHECK(row[0] == "100");
    CHECK(std::stod(row[6]) == doctest::Approx(100.0 / 1e6));

    // a planted completed row must survive a rerun of the same configuration
    auto planted = row;
    planted[1] = "0.000123456789";
    std::string text;
    for (std::size_t i = 0; i < ls.size(); ++i) {
        std::string l = ls[i];
        if (i == 3) {
            l.clear();
            for (std::size_t k = 0; k < planted.size(); ++k) l += (k ? "," : "") + planted[k];
        }
        text += l + "\n";
    }
    std::ofstream(csv) << text;
    REQUIRE(lab(args, d / "log") == 0);
    ls = lines(slurp(csv));
    REQUIRE(ls.size() == 5);
    CHECK(cells(ls[3])[1] == "0.000123456789");
    CHECK(cells(ls[4])[0] == "200");

    // a different configuration starts afresh
    json cfg2 = cfg;
    cfg2["T_end"] = 6.0;
    write_json(d / "t.json", cfg2);
    REQUIRE(lab(args, d / "log") == 0);
    ls = lines(slurp(csv));
    REQUIRE(ls.size() == 5);
    CHECK(cells(ls[3])[1] != "0.000123456789");
    fs::remove_all(d);
}

TEST_CASE("cli: simulate and norm-report") {
    const fs::path d = scratch_dir("norms");
    write_json(d / "s.json", json{{"R", 100}, {"eps", 0}, {"T_end", 1.0}, {"dt", 0.05}});
    REQUIRE(lab("simulate --config " + (d / "s.json").string() + " --out " + d.string(), d / "log") == 0);
    const auto tl = lines(slurp(d / "simulate_trajectory.csv"));
    REQUIRE(tl.size() >= 4);
    CHECK(tl[0].rfind("# ", 0) == 0);
    CHECK(tl[1].rfind("t,l2,htilde,h6m,maxnorm,div_resid", 0) == 0);
    CHECK(std::stod(cells(tl[2])[3]) == doctest::Approx(1.0).epsilon(1e-10));

    const fs::path snap = d / "simulate_initial.cfs";
    REQUIRE(lab("norm-report " + snap.string() + " --out " + (d / "a").string(), d / "log") == 0);
    const json a = json::parse(slurp(d / "a" / "norm_report.json"));
    CHECK(a["R"].get<double>() == 100.0);
    CHECK(a["h6m_sq"]["value"].get<double>() == doctest::Approx(1.0).epsilon(1e-10));
    double sum = 0.0;
    for (const auto& s : a["h6m_sq"]["summands"]) sum += s.get<double>();
    CHECK(std::abs(sum - a["h6m_sq"]["value"].get<double>()) < 1e-13);
    for (const char* k : {"h2", "d3", "d4", "f2_xxyyy", "f2_yyyyy", "f2_yyyyyy"})
        CHECK(a["scale_decomposition"]["components"].contains(k));

    // doubled field: squared norms quadruple
    const Snapshot s = read_snapshot(snap.string());
    write_snapshot((d / "twice.cfs").string(), cplx(2.0) * s.u, s.R, 0.0);
    REQUIRE(lab("norm-report " + (d / "twice.cfs").string() + " --out " + (d / "b").string(), d / "log") == 0);
    const json b = json::parse(slurp(d / "b" / "norm_report.json"));
    for (const char* k : {"h1_sq", "h2_sq"})
        CHECK(std::abs(b[k].get<double>() - 4.0 * a[k].get<double>()) < 1e-12 * std::max(1.0, b[k].get<double>()));
    for (const char* k : {"htilde_sq", "h6m_sq"})
        CHECK(std::abs(b[k]["value"].get<double>() - 4.0 * a[k]["value"].get<double>()) <
              1e-12 * std::max(1.0, b[k]["value"].get<double>()));
    CHECK(b["l2"].get<double>() == doctest::Approx(2.0 * a["l2"].get<double>()).epsilon(1e-12));

    // R given on the command line overrides the stored value
    REQUIRE(lab("norm-report " + snap.string() + " --R 400 --out " + (d / "c").string(), d / "log") == 0);
    CHECK(json::parse(slurp(d / "c" / "norm_report.json"))["R"].get<double>() == 400.0);

    // zero field
    write_snapshot((d / "zero.cfs").string(), VelocityField::zeros(s.u.grid()), 100.0, 0.0);
    REQUIRE(lab("norm-report " + (d / "zero.cfs").string() + " --out " + (d / "z").string(), d / "log") == 0);
    const json z = json::parse(slurp(d / "z" / "norm_report.json"));
    for (const char* k : {"l2", "h1_sq", "h2_sq", "max_norm"}) CHECK(z[k].get<double>() == 0.0);
    CHECK(z["h6m_sq"]["value"].get<double>() == 0.0);
    for (const auto& [k, v] : z["scale_decomposition"]["components"].items()) CHECK(v.get<double>() == 0.0);
    fs::remove_all(d);
}

TEST_CASE("cli: unreadable snapshots exit with 4 and leave no report") {
    const fs::path d = scratch_dir("io");
    const GridPtr g = make_grid(8, 33);
    write_snapshot((d / "good.cfs").string(), random_divfree_field(g, 1, 2, 4.0), 100.0, 0.0);
    const std::string bytes = slurp(d / "good.cfs");
    std::ofstream(d / "cut.cfs", std::ios::binary) << bytes.substr(0, bytes.size() / 2);
    CHECK(lab("norm-report " + (d / "cut.cfs").string() + " --out " + (d / "o").string(), d / "log") == 4);
    CHECK_FALSE(fs::exists(d / "o" / "norm_report.json"));
    CHECK(lab("norm-report " + (d / "absent.cfs").string() + " --out " + (d / "o").string(), d / "log") == 4);
    CHECK_FALSE(fs::exists(d / "o" / "norm_report.json"));
    fs::remove_all(d);
}

TEST_CASE("cli: numerical failure exits with 3") {
    const fs::path d = scratch_dir("numeric");
    write_json(d / "s.json", json{{"eps", 1e7}, {"T_end", 1.0}});
    CHECK(lab("simulate --config " + (d / "s.json").string() + " --out " + d.string(), d / "log") == 3);
    CHECK(slurp(d / "log").find("numerical failure") != std::string::npos);
    CHECK_FALSE(fs::exists(d / "simulate_trajectory.csv"));
    fs::remove_all(d);
}
