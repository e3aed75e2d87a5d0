#pragma once

#include "ckelab/config.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace ckelab {

inline constexpr const char* kVersion = "0.1.0";

/// Deterministic CSV: fixed column order, %.12e cells, LF line endings, no
/// timestamps.  Identical config + seed reproduce identical bytes.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::string serialize() const;
};

struct CriterionVerdict {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string note;
};

struct RunReport {
    std::string command;
    std::uint64_t cfg_hash = 0;
    std::uint64_t seed = 0;
    std::vector<CriterionVerdict> verdicts;
    CsvTable table;
    nlohmann::json extra;   // per-epsilon records and observables

    bool all_pass() const;
    nlohmann::json summary_json() const;

    /// Writes <out>/<command>.csv and <out>/summary.json; creates the
    /// directory when missing.
    void write(const std::string& out_dir) const;
};

} // namespace ckelab
