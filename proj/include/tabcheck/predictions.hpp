#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tabcheck/dataset.hpp"

namespace tabcheck {

/// Per-row model output. Classification rows carry a label and, when the
/// source provided them, probabilities over `classes` (sorted).
struct Predictions {
    Task task = Task::Regression;
    std::vector<std::string> labels;
    std::vector<double> values;
    std::vector<std::vector<double>> probabilities;
    std::vector<std::string> classes;
    std::vector<std::string> warnings;

    std::size_t size() const noexcept {
        return task == Task::Classification ? labels.size() : values.size();
    }
    bool has_probabilities() const noexcept { return !probabilities.empty(); }
};

/// Column name holding class c's probability.
std::string proba_column(std::string_view cls);

/// Parses the prediction CSV contract: a `prediction` column and, for
/// classification, `proba_<class>` for every class (all or none). Throws
/// LoadError on missing columns, non-finite numbers, a class outside
/// `classes`, or a probability row whose sum is off by more than 1e-6.
/// A row whose probability argmax differs from its prediction is kept and
/// recorded as a warning.
Predictions parse_predictions_csv(std::string_view text, Task task,
                                  std::vector<std::string> classes,
                                  const std::string& source = "<predictions>");

Predictions load_predictions_csv(const std::filesystem::path& path, Task task,
                                 std::vector<std::string> classes);

/// Inverse of parse_predictions_csv (shortest round-trip number text).
std::string predictions_to_csv(const Predictions& predictions);

/// Throws ContractError when the row count differs from the dataset's.
void check_aligned(const Predictions& predictions, std::size_t n_rows, std::string_view what);

}  // namespace tabcheck
