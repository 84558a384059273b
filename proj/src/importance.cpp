#include "tabcheck/importance.hpp"

#include <algorithm>
#include <cmath>

#include "tabcheck/error.hpp"
#include "tabcheck/rng.hpp"

namespace tabcheck {

double importance_metric(const Dataset& data, const Predictions& predictions) {
    check_aligned(predictions, data.n_rows(), "permutation importance");
    const auto& label = data.label();
    double total = 0.0;
    std::size_t n = 0;
    if (data.task() == Task::Classification) {
        for (std::size_t i = 0; i < data.n_rows(); ++i) {
            if (label.is_missing(i)) continue;
            total += label.category(i) == predictions.labels[i] ? 1.0 : 0.0;
            ++n;
        }
        return n == 0 ? 0.0 : total / static_cast<double>(n);
    }
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        if (!label.cell(i).is_number()) continue;
        const double r = label.numeric(i) - predictions.values[i];
        total += r * r;
        ++n;
    }
    return n == 0 ? 0.0 : -std::sqrt(total / static_cast<double>(n));
}

ImportanceReport permutation_importance(Predictor& predictor, const Dataset& data,
                                        std::span<const std::string> classes,
                                        const ImportanceOptions& options,
                                        const Predictions* baseline) {
    if (!data.has_label()) {
        throw ContractError("permutation importance needs a labeled dataset");
    }
    if (options.repeats < 1) {
        throw ContractError("permutation importance needs repeats >= 1");
    }
    const Task task = data.task();
    ImportanceReport report;
    report.repeats = options.repeats;
    report.seed = options.seed;
    report.metric_name = task == Task::Classification ? "accuracy" : "neg_rmse";

    Predictions own_baseline;
    if (baseline == nullptr) {
        own_baseline = predictor.predict(data, task, classes);
        baseline = &own_baseline;
    }
    report.baseline_metric = importance_metric(data, *baseline);

    std::vector<std::string> by_name = data.feature_names();
    std::sort(by_name.begin(), by_name.end());

    double positive_total = 0.0;
    for (const auto& feature : data.feature_names()) {
        const auto rank = static_cast<std::uint64_t>(
            std::lower_bound(by_name.begin(), by_name.end(), feature) - by_name.begin());
        FeatureImportance fi;
        fi.feature = feature;
        double sum = 0.0;
        for (std::size_t r = 0; r < options.repeats; ++r) {
            Rng rng(options.seed + 31 * rank + r);
            const auto order = rng.permutation(data.n_rows());
            const Dataset shuffled = data.with_column_reordered(feature, order);
            const double metric = importance_metric(shuffled, predictor.predict(shuffled, task, classes));
            fi.repeat_metrics.push_back(metric);
            sum += report.baseline_metric - metric;
        }
        fi.raw_drop = sum / static_cast<double>(options.repeats);
        positive_total += std::max(fi.raw_drop, 0.0);
        report.features.push_back(std::move(fi));
    }
    for (auto& fi : report.features) {
        fi.normalized = positive_total > 0.0 ? std::max(fi.raw_drop, 0.0) / positive_total : 0.0;
    }
    return report;
}

}  // namespace tabcheck
