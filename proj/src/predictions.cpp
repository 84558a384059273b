#include "tabcheck/predictions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tabcheck/csv.hpp"
#include "tabcheck/error.hpp"
#include "tabcheck/stats.hpp"

namespace tabcheck {

std::string proba_column(std::string_view cls) { return "proba_" + std::string(cls); }

Predictions parse_predictions_csv(std::string_view text, Task task, std::vector<std::string> classes,
                                  const std::string& source) {
    if (task == Task::Unlabeled) {
        throw LoadError(source + ": predictions need a classification or regression task");
    }
    CsvTable table;
    try {
        table = parse_csv(text);
    } catch (const LoadError& e) {
        throw LoadError(source + ": " + e.what());
    }
    auto find_col = [&](std::string_view name) -> std::optional<std::size_t> {
        const auto it = std::find(table.header.begin(), table.header.end(), name);
        if (it == table.header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - table.header.begin());
    };
    const auto pred_col = find_col("prediction");
    if (!pred_col) {
        throw LoadError(source + ": missing 'prediction' column");
    }

    Predictions out;
    out.task = task;
    auto number_at = [&](std::size_t row, std::size_t col) {
        const auto v = parse_number(table.rows[row][col]);
        if (!v) {
            throw LoadError(source + ": non-finite or non-numeric value '" + table.rows[row][col] +
                            "' in column '" + table.header[col] + "' at data row " +
                            std::to_string(row + 1));
        }
        return *v;
    };

    if (task == Task::Regression) {
        out.values.reserve(table.rows.size());
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            out.values.push_back(number_at(r, *pred_col));
        }
        return out;
    }

    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    out.classes = classes;
    std::vector<std::size_t> proba_cols;
    std::vector<std::string> absent;
    for (const auto& c : classes) {
        if (const auto idx = find_col(proba_column(c))) {
            proba_cols.push_back(*idx);
        } else {
            absent.push_back(proba_column(c));
        }
    }
    if (!proba_cols.empty() && !absent.empty()) {
        throw LoadError(source + ": missing probability column '" + absent.front() + "'");
    }

    std::size_t mismatches = 0;
    std::size_t first_mismatch = 0;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& label = table.rows[r][*pred_col];
        if (!std::binary_search(classes.begin(), classes.end(), label)) {
            throw LoadError(source + ": predicted class '" + label + "' at data row " +
                            std::to_string(r + 1) + " is not a known class");
        }
        out.labels.push_back(label);
        if (proba_cols.empty()) continue;
        std::vector<double> p;
        double sum = 0.0;
        for (auto c : proba_cols) {
            const double v = number_at(r, c);
            if (v < 0.0 || v > 1.0) {
                throw LoadError(source + ": probability " + table.rows[r][c] + " outside [0, 1] at data row " +
                                std::to_string(r + 1));
            }
            p.push_back(v);
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-6) {
            throw LoadError(source + ": probabilities at data row " + std::to_string(r + 1) +
                            " sum to " + format_number(sum));
        }
        const auto argmax = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
        const auto predicted = static_cast<std::size_t>(
            std::lower_bound(classes.begin(), classes.end(), label) - classes.begin());
        if (p[predicted] < p[argmax]) {
            if (mismatches == 0) first_mismatch = r + 1;
            ++mismatches;
        }
        out.probabilities.push_back(std::move(p));
    }
    if (mismatches > 0) {
        std::ostringstream msg;
        msg << source << ": prediction differs from probability argmax on " << mismatches
            << " row(s), first at data row " << first_mismatch;
        out.warnings.push_back(msg.str());
    }
    return out;
}

Predictions load_predictions_csv(const std::filesystem::path& path, Task task,
                                 std::vector<std::string> classes) {
    return parse_predictions_csv(read_file(path), task, std::move(classes), path.string());
}

std::string predictions_to_csv(const Predictions& predictions) {
    std::string out;
    std::vector<std::string> header{"prediction"};
    if (predictions.task == Task::Classification && predictions.has_probabilities()) {
        for (const auto& c : predictions.classes) header.push_back(proba_column(c));
    }
    append_csv_row(out, header);
    std::vector<std::string> fields;
    for (std::size_t r = 0; r < predictions.size(); ++r) {
        fields.clear();
        if (predictions.task == Task::Classification) {
            fields.push_back(predictions.labels[r]);
            if (predictions.has_probabilities()) {
                for (double p : predictions.probabilities[r]) fields.push_back(format_number(p));
            }
        } else {
            fields.push_back(format_number(predictions.values[r]));
        }
        append_csv_row(out, fields);
    }
    return out;
}

void check_aligned(const Predictions& predictions, std::size_t n_rows, std::string_view what) {
    if (predictions.size() != n_rows) {
        throw ContractError(std::string(what) + ": " + std::to_string(predictions.size()) +
                            " prediction rows but dataset has " + std::to_string(n_rows) + " rows");
    }
}

}  // namespace tabcheck
