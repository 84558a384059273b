#include "tabcheck/pps.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tabcheck/error.hpp"
#include "tabcheck/metrics.hpp"

namespace tabcheck {

namespace {

TreeInput single_feature(const Column& feature, const std::vector<std::size_t>& rows) {
    TreeFeature f;
    f.name = feature.name();
    f.categorical = feature.type() != ColumnType::Numeric;
    for (auto r : rows) {
        f.missing.push_back(0);
        if (f.categorical) {
            f.category.push_back(feature.category(r));
        } else {
            f.numeric.push_back(feature.numeric(r));
        }
    }
    TreeInput in;
    in.n_rows = rows.size();
    in.features.push_back(std::move(f));
    return in;
}

std::string most_frequent(const std::vector<std::string>& labels) {
    std::map<std::string, std::size_t> counts;
    for (const auto& l : labels) ++counts[l];
    std::string best;
    std::size_t best_n = 0;
    for (const auto& [l, n] : counts) {
        if (n > best_n) {
            best = l;
            best_n = n;
        }
    }
    return best;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace

PpsResult pps(const Column& feature, const Column& label, Task task, const TreeParams& params) {
    if (feature.size() != label.size()) {
        throw ContractError("pps: feature and label lengths differ");
    }
    if (task == Task::Unlabeled) {
        throw ContractError("pps: task must be classification or regression");
    }
    const bool numeric_feature = feature.type() == ColumnType::Numeric;
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < feature.size(); ++i) {
        if (label.is_missing(i) || feature.is_missing(i)) continue;
        if (numeric_feature && !feature.cell(i).is_number()) continue;
        if (task == Task::Regression && !label.cell(i).is_number()) continue;
        rows.push_back(i);
    }
    PpsResult out;
    out.n_rows = rows.size();
    if (rows.size() < kPpsMinRows) {
        out.skipped = true;
        out.note = "skipped: " + std::to_string(rows.size()) + " complete rows (< " +
                   std::to_string(kPpsMinRows) + ")";
        return out;
    }

    const std::size_t n = rows.size();

    if (task == Task::Classification) {
        std::vector<std::string> y(n);
        for (std::size_t k = 0; k < n; ++k) y[k] = label.category(rows[k]);
        std::vector<std::string> model_pred(n);
        std::vector<std::string> naive_pred(n);
        std::map<std::string, double> train_share;
        for (std::size_t fold = 0; fold < kPpsFolds; ++fold) {
            std::vector<std::size_t> train_idx;
            std::vector<std::size_t> test_idx;
            for (std::size_t k = 0; k < n; ++k) {
                (k % kPpsFolds == fold ? test_idx : train_idx).push_back(k);
            }
            std::vector<std::size_t> train_rows;
            std::vector<std::size_t> test_rows;
            std::vector<std::string> train_y;
            for (auto k : train_idx) {
                train_rows.push_back(rows[k]);
                train_y.push_back(y[k]);
            }
            for (auto k : test_idx) test_rows.push_back(rows[k]);
            const auto tree = fit_tree(single_feature(feature, train_rows),
                                       TreeTarget::classification(train_y), params);
            const auto pred = predict_tree(tree, single_feature(feature, test_rows));
            const std::string naive = most_frequent(train_y);
            for (const auto& l : train_y) {
                train_share[l] += 1.0 / static_cast<double>(train_y.size() * kPpsFolds);
            }
            for (std::size_t t = 0; t < test_idx.size(); ++t) {
                model_pred[test_idx[t]] = pred.labels[t];
                naive_pred[test_idx[t]] = naive;
            }
        }
        out.model_score = classification_metrics(y, model_pred).weighted_f1;
        // Expected weighted F1 of guessing labels at the training-fold rates.
        std::map<std::string, double> share;
        for (const auto& l : y) share[l] += 1.0 / static_cast<double>(n);
        double random_f1 = 0.0;
        for (const auto& [l, p] : share) {
            const double q = train_share[l];
            if (p + q > 0.0) random_f1 += p * 2.0 * p * q / (p + q);
        }
        out.naive_score = std::max(classification_metrics(y, naive_pred).weighted_f1, random_f1);
        if (out.naive_score >= 1.0) {
            out.score = 0.0;
        } else {
            out.score = std::clamp((out.model_score - out.naive_score) / (1.0 - out.naive_score),
                                   0.0, 1.0);
        }
        return out;
    }

    std::vector<double> y(n);
    for (std::size_t k = 0; k < n; ++k) y[k] = label.numeric(rows[k]);
    double model_abs = 0.0;
    double naive_abs = 0.0;
    for (std::size_t fold = 0; fold < kPpsFolds; ++fold) {
        std::vector<std::size_t> train_rows;
        std::vector<std::size_t> test_rows;
        std::vector<double> train_y;
        std::vector<double> test_y;
        for (std::size_t k = 0; k < n; ++k) {
            if (k % kPpsFolds == fold) {
                test_rows.push_back(rows[k]);
                test_y.push_back(y[k]);
            } else {
                train_rows.push_back(rows[k]);
                train_y.push_back(y[k]);
            }
        }
        const auto tree =
            fit_tree(single_feature(feature, train_rows), TreeTarget::regression(train_y), params);
        const auto pred = predict_tree(tree, single_feature(feature, test_rows));
        const double naive = median(train_y);
        for (std::size_t t = 0; t < test_y.size(); ++t) {
            model_abs += std::abs(test_y[t] - pred.values[t]);
            naive_abs += std::abs(test_y[t] - naive);
        }
    }
    out.model_score = model_abs / static_cast<double>(n);
    out.naive_score = naive_abs / static_cast<double>(n);
    out.score = out.naive_score == 0.0
                    ? 0.0
                    : std::clamp(1.0 - out.model_score / out.naive_score, 0.0, 1.0);
    return out;
}

}  // namespace tabcheck
