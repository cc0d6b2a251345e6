#pragma once

// Output tables (CSV or JSON) and the per-run manifest.

#include <fftw3.h>

#include <Eigen/Core>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "ddspec/io.hpp"

namespace ddspec::cli {

inline constexpr const char* kVersion = "0.1.0";

enum class Format { Csv, Json };

/// Column-major numeric table with unit-suffixed column names.
struct Table {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
    std::vector<std::string> label_column;  // optional leading text column
    std::string label_name;

    std::size_t rows() const { return columns.empty() ? label_column.size() : columns.front().size(); }
};

inline std::string render(const Table& t, Format fmt) {
    std::ostringstream out;
    const bool labels = !t.label_name.empty();
    if (fmt == Format::Csv) {
        if (labels) out << t.label_name << (t.names.empty() ? "" : ",");
        for (std::size_t c = 0; c < t.names.size(); ++c) out << (c ? "," : "") << t.names[c];
        out << '\n';
        for (std::size_t r = 0; r < t.rows(); ++r) {
            if (labels) out << t.label_column[r] << (t.names.empty() ? "" : ",");
            for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << format_double(t.columns[c][r]);
            out << '\n';
        }
        return out.str();
    }
    // JSON: one array per column, numbers printed with full precision.
    out << "{\n";
    bool first = true;
    auto key = [&](const std::string& k) {
        out << (first ? "" : ",\n") << "  " << json(k).dump() << ": [";
        first = false;
    };
    if (labels) {
        key(t.label_name);
        for (std::size_t r = 0; r < t.rows(); ++r) out << (r ? ", " : "") << json(t.label_column[r]).dump();
        out << "]";
    }
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        key(t.names[c]);
        for (std::size_t r = 0; r < t.rows(); ++r) {
            const double v = t.columns[c][r];
            out << (r ? ", " : "") << (std::isfinite(v) ? format_double(v) : "null");
        }
        out << "]";
    }
    out << "\n}\n";
    return out.str();
}

struct OutputFile {
    std::string path;  // relative to the output directory
    std::string digest;
};

/// Collects the files written by one run.
class RunOutputs {
public:
    RunOutputs(std::filesystem::path dir, Format fmt) : dir_(std::move(dir)), fmt_(fmt) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw ConfigError("--out-dir: cannot create " + dir_.string() + ": " + ec.message());
    }

    Format format() const { return fmt_; }
    const std::filesystem::path& dir() const { return dir_; }
    const std::vector<OutputFile>& files() const { return files_; }

    /// Writes stem.csv or stem.json.
    void table(const std::string& stem, const Table& t) {
        bytes(stem + (fmt_ == Format::Csv ? ".csv" : ".json"), render(t, fmt_));
    }

    void bytes(const std::string& name, const std::string& data) {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw ConfigError("--out-dir: cannot write " + (dir_ / name).string());
        out << data;
        if (!out) throw ConfigError("--out-dir: write failed for " + (dir_ / name).string());
        files_.push_back({name, digest_string(data)});
    }

private:
    std::filesystem::path dir_;
    Format fmt_;
    std::vector<OutputFile> files_;
};

inline json versions() {
    return {{"ddspec", std::string(kVersion)},
            {"fftw", std::string(fftw_version)},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

struct ManifestInfo {
    std::string command;
    std::string config_path;
    std::string config_digest;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    Format format = Format::Csv;
    json summary = json::object();
    double wall_time_s = 0.0;
    int exit_code = 0;
};

inline void write_manifest(const std::filesystem::path& dir, const ManifestInfo& m,
                           const std::vector<OutputFile>& files) {
    nlohmann::ordered_json j;
    j["schema"] = "ddspec-manifest/1";
    j["command"] = m.command;
    j["config"] = m.config_path;
    j["config_digest"] = m.config_digest;
    j["seed"] = m.seed;
    j["threads"] = m.threads;
    j["format"] = m.format == Format::Csv ? "csv" : "json";
    j["versions"] = versions();
    j["outputs"] = nlohmann::ordered_json::array();
    for (const auto& f : files) j["outputs"].push_back({{"path", f.path}, {"digest", f.digest}});
    j["summary"] = m.summary;
    j["exit_code"] = m.exit_code;
    j["wall_time_s"] = m.wall_time_s;
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    out << j.dump(2) << '\n';
}

}  // namespace ddspec::cli
