#include "couette/exp/records.hpp"

#include "couette/error.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace couette::exp {

std::string csv_preamble() {
    return std::string("# wavenumber convention k = 2*pi*j (period-1 x); couette-lab ") + code_version;
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::string digest_hex(const EVP_MD* md, const std::string& bytes) {
    unsigned char out[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, md, nullptr) != 1 || EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx, out, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("hashing failed");
    }
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned int i = 0; i < len; ++i) {
        s.push_back(hex[out[i] >> 4]);
        s.push_back(hex[out[i] & 15]);
    }
    return s;
}

} // namespace

std::string sha256_hex(const std::string& bytes) { return digest_hex(EVP_sha256(), bytes); }

std::string git_blob_sha1(const std::string& bytes) {
    std::string blob = "blob " + std::to_string(bytes.size());
    blob.push_back('\0');
    blob += bytes;
    return digest_hex(EVP_sha1(), blob);
}

void write_atomic(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path p(path);
    const fs::path tmp = p.parent_path() / (p.filename().string() + ".tmp");
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
        os << contents;
        os.flush();
        if (!os) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, p, ec);
    if (ec) throw IoError("cannot move " + tmp.string() + " to " + p.string() + ": " + ec.message());
}

void append_line(const std::string& path, const std::string& line) {
    std::ofstream os(path, std::ios::app);
    if (!os) throw IoError("cannot open " + path + " for appending");
    os << line << "\n";
    os.flush();
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string ExperimentRecord::config_hash() const { return sha256_hex(config.dump()); }

nlohmann::json ExperimentRecord::to_json() const {
    nlohmann::json j;
    j["experiment"] = experiment;
    j["code_version"] = code_version;
    j["wavenumber_convention"] = "k = 2*pi*j";
    j["config"] = config;
    j["config_hash"] = config_hash();
    nlohmann::json in = nlohmann::json::array();
    for (const auto& [name, h] : inputs) in.push_back({{"name", name}, {"git_blob_sha1", h}});
    j["inputs"] = in;
    nlohmann::json rs = nlohmann::json::array();
    for (const auto& r : rows) rs.push_back({{"R", r.R}, {"quantity", r.quantity}, {"value", r.value}});
    j["rows"] = rs;
    j["extra"] = extra;
    j["started_utc"] = started_utc;
    j["finished_utc"] = finished_utc;
    return j;
}

} // namespace couette::exp
