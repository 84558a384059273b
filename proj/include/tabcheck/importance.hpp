#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tabcheck/adapter.hpp"
#include "tabcheck/dataset.hpp"
#include "tabcheck/predictions.hpp"

namespace tabcheck {

struct FeatureImportance {
    std::string feature;
    /// Baseline metric minus the mean metric over shuffled repeats.
    double raw_drop = 0.0;
    /// max(raw_drop, 0) / sum of positive drops; all zero when none is positive.
    double normalized = 0.0;
    std::vector<double> repeat_metrics;
};

struct ImportanceReport {
    /// In dataset feature order.
    std::vector<FeatureImportance> features;
    std::size_t repeats = 0;
    std::uint64_t seed = 0;
    /// "accuracy" or "neg_rmse".
    std::string metric_name;
    double baseline_metric = 0.0;
};

struct ImportanceOptions {
    std::size_t repeats = 5;
    std::uint64_t seed = 42;
};

/// Accuracy (classification) or negative RMSE (regression) over labeled rows.
double importance_metric(const Dataset& data, const Predictions& predictions);

/// Permutation importance. Feature j (its rank among the name-sorted
/// features) in repeat r is shuffled with seed + 31 * j + r, so results do
/// not depend on column order. The baseline is predicted through the same
/// predictor unless supplied.
ImportanceReport permutation_importance(Predictor& predictor, const Dataset& data,
                                        std::span<const std::string> classes,
                                        const ImportanceOptions& options = {},
                                        const Predictions* baseline = nullptr);

}  // namespace tabcheck
