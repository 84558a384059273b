#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tabcheck/csv.hpp"
#include "tabcheck/dataset.hpp"
#include "tabcheck/rng.hpp"

namespace testing_support {

using Columns = std::vector<std::pair<std::string, std::vector<std::string>>>;

inline tabcheck::Dataset make_dataset(const Columns& cols, std::optional<std::string> label = std::nullopt,
                                      std::optional<tabcheck::Task> task = std::nullopt) {
    tabcheck::CsvTable table;
    const std::size_t n = cols.empty() ? 0 : cols.front().second.size();
    for (const auto& [name, values] : cols) table.header.push_back(name);
    table.rows.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& [name, values] : cols) table.rows[i].push_back(values.at(i));
    }
    tabcheck::SchemaOptions opts;
    opts.label = std::move(label);
    opts.task = task;
    return tabcheck::Dataset::from_table(table, opts);
}

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

/// Standard normal draw (Box-Muller) from the portable generator.
inline double normal(tabcheck::Rng& rng) {
    const double u1 = 1.0 - rng.uniform();
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

inline std::vector<std::string> normal_column(tabcheck::Rng& rng, std::size_t n, double mean = 0.0, double sd = 1.0) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(num(mean + sd * normal(rng)));
    return out;
}

inline std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "'\\''";
        else out += c;
    }
    return out + "'";
}

inline std::string stub_command(const std::string& args) {
    return shell_quote(STUB_ADAPTER_PATH) + " " + args;
}

inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("tabcheck_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream(path, std::ios::binary) << text;
}

inline std::string to_csv(const Columns& cols) {
    std::string out;
    std::vector<std::string> header;
    for (const auto& [name, values] : cols) header.push_back(name);
    tabcheck::append_csv_row(out, header);
    const std::size_t n = cols.empty() ? 0 : cols.front().second.size();
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::string> row;
        for (const auto& [name, values] : cols) row.push_back(values[i]);
        tabcheck::append_csv_row(out, row);
    }
    return out;
}

}  // namespace testing_support
