#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "contpol/config.hpp"

namespace contpol {

// Shortest round-trip decimal form; identical inputs give identical bytes, so
// repeated runs of a command diff clean.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// Comment header carried by every output file: enough to re-run the command
// that produced it.
inline std::string provenance_line(const ExperimentConfig& cfg) {
    return "# seed=" + std::to_string(cfg.seed) +
           " config_hash=" + config_hash_hex(cfg);
}

class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> columns)
        : columns_(std::move(columns)) {}

    void comment(const std::string& line) { comments_.push_back(line); }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_.size())
            throw std::invalid_argument("CsvWriter: cell count mismatch");
        rows_.push_back(cells);
    }

    std::string str() const {
        std::string out;
        for (const auto& c : comments_) out += c + "\n";
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            if (i) out += ",";
            out += columns_[i];
        }
        out += "\n";
        for (const auto& r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (i) out += ",";
                out += r[i];
            }
            out += "\n";
        }
        return out;
    }

  private:
    std::vector<std::string> columns_;
    std::vector<std::string> comments_;
    std::vector<std::vector<std::string>> rows_;
};

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& content) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    std::string out((std::istreambuf_iterator<char>(f)),
                    std::istreambuf_iterator<char>());
    return out;
}

inline void write_json_file(const std::filesystem::path& path,
                            const nlohmann::json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace contpol
