#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tabcheck/dataset.hpp"

namespace tabcheck {

struct ClassMetrics {
    std::string label;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

struct ClassificationMetrics {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    /// Support-weighted mean of per-class F1.
    double weighted_f1 = 0.0;
    std::vector<ClassMetrics> per_class;
    /// confusion[t][p]: rows are true classes, columns predicted, both in
    /// per_class order.
    std::vector<std::vector<std::size_t>> confusion;
    /// Multiclass-sum Brier score, when probabilities were supplied.
    std::optional<double> brier;
};

struct RegressionMetrics {
    double rmse = 0.0;
    double mae = 0.0;
    /// 1 - SS_res / SS_tot, defined as 0 when SS_tot is 0.
    double r2 = 0.0;
};

struct MetricSet {
    Task task = Task::Classification;
    std::optional<ClassificationMetrics> classification;
    std::optional<RegressionMetrics> regression;
};

/// Per-class figures are over `classes` when given, else the sorted union
/// of observed true and predicted labels. Any 0/0 ratio is 0.
ClassificationMetrics classification_metrics(std::span<const std::string> y_true,
                                             std::span<const std::string> y_pred,
                                             std::span<const std::string> classes = {});

RegressionMetrics regression_metrics(std::span<const double> y_true,
                                     std::span<const double> y_pred);

MetricSet compute_metrics(std::span<const std::string> y_true, std::span<const std::string> y_pred,
                          std::span<const std::vector<double>> probabilities = {},
                          std::span<const std::string> classes = {});
MetricSet compute_metrics(std::span<const double> y_true, std::span<const double> y_pred);

}  // namespace tabcheck
