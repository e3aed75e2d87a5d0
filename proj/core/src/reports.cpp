#include "ckelab/reports.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace ckelab {

std::string CsvTable::serialize() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        out += columns[i];
        out += (i + 1 < columns.size()) ? ',' : '\n';
    }
    char buf[32];
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.12e", row[i]);
            out += buf;
            out += (i + 1 < row.size()) ? ',' : '\n';
        }
    }
    return out;
}

bool RunReport::all_pass() const {
    for (const auto& v : verdicts)
        if (!v.pass) return false;
    return true;
}

nlohmann::json RunReport::summary_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["version"] = kVersion;
    j["config_hash"] = cfg_hash;
    j["seed"] = seed;
    nlohmann::json crit = nlohmann::json::array();
    for (const auto& v : verdicts) {
        crit.push_back({{"name", v.name},
                        {"pass", v.pass},
                        {"value", v.value},
                        {"threshold", v.threshold},
                        {"note", v.note}});
    }
    j["criteria"] = crit;
    j["all_pass"] = all_pass();
    if (!extra.is_null()) j["observables"] = extra;
    return j;
}

void RunReport::write(const std::string& out_dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    {
        std::ofstream csv(fs::path(out_dir) / (command + ".csv"), std::ios::binary);
        csv << table.serialize();
    }
    {
        std::ofstream js(fs::path(out_dir) / "summary.json", std::ios::binary);
        js << summary_json().dump(2) << "\n";
    }
}

} // namespace ckelab
