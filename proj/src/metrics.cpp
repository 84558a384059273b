#include "tabcheck/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tabcheck/error.hpp"
#include "tabcheck/stats.hpp"

namespace tabcheck {

namespace {

double safe_div(double a, double b) { return b == 0.0 ? 0.0 : a / b; }

}  // namespace

ClassificationMetrics classification_metrics(std::span<const std::string> y_true,
                                             std::span<const std::string> y_pred,
                                             std::span<const std::string> classes) {
    if (y_true.size() != y_pred.size()) {
        throw ContractError("compute_metrics: " + std::to_string(y_true.size()) + " labels vs " +
                            std::to_string(y_pred.size()) + " predictions");
    }
    if (y_true.empty()) {
        throw ContractError("compute_metrics: empty input");
    }
    std::vector<std::string> labels;
    if (!classes.empty()) {
        labels.assign(classes.begin(), classes.end());
    } else {
        std::set<std::string> u(y_true.begin(), y_true.end());
        u.insert(y_pred.begin(), y_pred.end());
        labels.assign(u.begin(), u.end());
    }
    auto index_of = [&](const std::string& v) {
        const auto it = std::lower_bound(labels.begin(), labels.end(), v);
        if (it != labels.end() && *it == v) {
            return static_cast<std::size_t>(it - labels.begin());
        }
        const auto lin = std::find(labels.begin(), labels.end(), v);
        if (lin == labels.end()) {
            throw ContractError("compute_metrics: label '" + v + "' not in class set");
        }
        return static_cast<std::size_t>(lin - labels.begin());
    };

    const std::size_t k = labels.size();
    ClassificationMetrics m;
    m.confusion.assign(k, std::vector<std::size_t>(k, 0));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const auto t = index_of(y_true[i]);
        const auto p = index_of(y_pred[i]);
        ++m.confusion[t][p];
        correct += (t == p);
    }
    const double n = static_cast<double>(y_true.size());
    m.accuracy = static_cast<double>(correct) / n;
    double f1_sum = 0.0;
    double weighted = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        double tp = static_cast<double>(m.confusion[c][c]);
        double support = 0.0;
        double predicted = 0.0;
        for (std::size_t o = 0; o < k; ++o) {
            support += static_cast<double>(m.confusion[c][o]);
            predicted += static_cast<double>(m.confusion[o][c]);
        }
        ClassMetrics cm;
        cm.label = labels[c];
        cm.precision = safe_div(tp, predicted);
        cm.recall = safe_div(tp, support);
        cm.f1 = safe_div(2.0 * tp, support + predicted);
        cm.support = static_cast<std::size_t>(support);
        f1_sum += cm.f1;
        weighted += cm.f1 * support;
        m.per_class.push_back(std::move(cm));
    }
    m.macro_f1 = f1_sum / static_cast<double>(k);
    m.weighted_f1 = weighted / n;
    return m;
}

RegressionMetrics regression_metrics(std::span<const double> y_true, std::span<const double> y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw ContractError("compute_metrics: " + std::to_string(y_true.size()) + " labels vs " +
                            std::to_string(y_pred.size()) + " predictions");
    }
    if (y_true.empty()) {
        throw ContractError("compute_metrics: empty input");
    }
    const double n = static_cast<double>(y_true.size());
    double mean = 0.0;
    for (double v : y_true) mean += v;
    mean /= n;
    double se = 0.0;
    double ae = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const double r = y_true[i] - y_pred[i];
        se += r * r;
        ae += std::abs(r);
        ss_tot += (y_true[i] - mean) * (y_true[i] - mean);
    }
    RegressionMetrics m;
    m.rmse = std::sqrt(se / n);
    m.mae = ae / n;
    m.r2 = ss_tot == 0.0 ? 0.0 : 1.0 - se / ss_tot;
    return m;
}

MetricSet compute_metrics(std::span<const std::string> y_true, std::span<const std::string> y_pred,
                          std::span<const std::vector<double>> probabilities,
                          std::span<const std::string> classes) {
    MetricSet out;
    out.task = Task::Classification;
    out.classification = classification_metrics(y_true, y_pred, classes);
    if (!probabilities.empty()) {
        out.classification->brier = brier_score(probabilities, y_true, classes);
    }
    return out;
}

MetricSet compute_metrics(std::span<const double> y_true, std::span<const double> y_pred) {
    MetricSet out;
    out.task = Task::Regression;
    out.regression = regression_metrics(y_true, y_pred);
    return out;
}

}  // namespace tabcheck
