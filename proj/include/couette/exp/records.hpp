#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace couette::exp {

inline constexpr const char* code_version = "1.0.0";

/// Comment line every CSV starts with.
std::string csv_preamble();

/// Shortest round-trip formatting of a double ("nan", "inf" for non-finite).
std::string fmt(double v);

std::string sha256_hex(const std::string& bytes);
/// Hash git assigns to a blob with these contents.
std::string git_blob_sha1(const std::string& bytes);

/// Write through a temporary file in the same directory and rename.
void write_atomic(const std::string& path, const std::string& contents);
void append_line(const std::string& path, const std::string& line);
std::string read_file(const std::string& path);

struct RecordRow {
    double R = 0.0;
    std::string quantity;
    double value = 0.0;
};

/// Provenance of one command run.
struct ExperimentRecord {
    std::string experiment;
    nlohmann::json config; ///< resolved configuration
    std::vector<std::pair<std::string, std::string>> inputs; ///< (name, git blob hash)
    std::vector<RecordRow> rows;
    nlohmann::json extra = nlohmann::json::object();
    std::string started_utc;
    std::string finished_utc;

    std::string config_hash() const;
    nlohmann::json to_json() const;
};

std::string utc_now();

} // namespace couette::exp
