#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "common.hpp"
#include "tabcheck/rng.hpp"
#include "tabcheck/stats.hpp"
#include "tabcheck/trust_score.hpp"

namespace tabcheck::checks {

namespace {

struct DriftOutcome {
    std::optional<DriftScore> score;
    std::string skip_reason;
    std::optional<DisplayItem> display;
};

std::vector<double> proportions(const std::vector<double>& counts) {
    double total = 0.0;
    for (double c : counts) total += c;
    std::vector<double> out(counts.size(), 0.0);
    if (total > 0) {
        for (std::size_t i = 0; i < counts.size(); ++i) out[i] = counts[i] / total;
    }
    return out;
}

DriftOutcome numeric_drift(const std::string& name, const Column& ref, const Column& cur, std::size_t n_bins) {
    const auto a = ref.numeric_values();
    const auto b = cur.numeric_values();
    if (a.empty() || b.empty()) return {std::nullopt, "no non-missing values on one side", std::nullopt};
    const DriftScore score = emd_normalized(a, b);
    double lo = a.front();
    double hi = a.front();
    for (const auto* v : {&a, &b}) {
        for (double x : *v) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    }
    const std::size_t bins = hi > lo ? n_bins : 1;
    const double width = (hi - lo) / static_cast<double>(bins);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < bins; ++i) {
        const double l = lo + width * static_cast<double>(i);
        const double r = i + 1 == bins ? hi : lo + width * static_cast<double>(i + 1);
        labels.push_back("[" + brief(l) + ", " + brief(r) + (i + 1 == bins ? "]" : ")"));
    }
    auto count = [&](const std::vector<double>& v) {
        std::vector<double> c(bins, 0.0);
        for (double x : v) {
            std::size_t i = width > 0 ? static_cast<std::size_t>((x - lo) / width) : 0;
            c[std::min(i, bins - 1)] += 1.0;
        }
        return proportions(c);
    };
    return {score, {},
            DisplayItem::histogram_pair(name, labels, count(a), count(b), score.value,
                                        std::string(to_string(score.method)))};
}

DriftOutcome categorical_drift(const std::string& name, const Column& ref, const Column& cur,
                               std::size_t max_categories) {
    std::map<std::string, std::pair<double, double>> counts;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        if (ref.is_missing(i)) continue;
        counts[ref.category(i)].first += 1.0;
        na += 1.0;
    }
    for (std::size_t i = 0; i < cur.size(); ++i) {
        if (cur.is_missing(i)) continue;
        counts[cur.category(i)].second += 1.0;
        nb += 1.0;
    }
    if (na == 0.0 || nb == 0.0) return {std::nullopt, "no non-missing values on one side", std::nullopt};
    std::vector<std::pair<std::string, std::pair<double, double>>> ranked(counts.begin(), counts.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
        return x.second.first + x.second.second > y.second.first + y.second.second;
    });
    std::vector<std::string> labels;
    std::vector<double> ca;
    std::vector<double> cb;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (i < max_categories || ranked.size() == max_categories + 1) {
            labels.push_back(ranked[i].first);
            ca.push_back(ranked[i].second.first);
            cb.push_back(ranked[i].second.second);
        } else {
            if (labels.size() == max_categories) {
                labels.push_back("Other");
                ca.push_back(0.0);
                cb.push_back(0.0);
            }
            ca.back() += ranked[i].second.first;
            cb.back() += ranked[i].second.second;
        }
    }
    const DriftScore score = psi(Histogram::from_counts(labels, ca), Histogram::from_counts(labels, cb));
    return {score, {},
            DisplayItem::histogram_pair(name, labels, proportions(ca), proportions(cb), score.value,
                                        std::string(to_string(score.method)))};
}

DriftOutcome column_drift(const std::string& name, const Column& ref, const Column& cur, const Json& params) {
    const auto n_bins = params.at("n_bins").get<std::size_t>();
    const auto max_categories = params.at("max_categories").get<std::size_t>();
    if (ref.type() == ColumnType::Mixed || cur.type() == ColumnType::Mixed) {
        return {std::nullopt, "mixed-type column", std::nullopt};
    }
    if (ref.type() != cur.type()) {
        return {std::nullopt,
                std::string("type differs (") + std::string(to_string(ref.type())) + " vs " +
                    std::string(to_string(cur.type())) + ")",
                std::nullopt};
    }
    if (ref.type() == ColumnType::Numeric) return numeric_drift(name, ref, cur, n_bins);
    return categorical_drift(name, ref, cur, max_categories);
}

double threshold_for(const std::string& method, const Json& params) {
    return method == to_string(DriftMethod::PSI) ? params.at("psi_threshold").get<double>() : params.at("emd_threshold").get<double>();
}

std::vector<ParamSpec> drift_params() {
    return {{"emd_threshold", ParamKind::Real, 0.1, "largest acceptable normalized EMD", {}},
            {"psi_threshold", ParamKind::Real, 0.2, "largest acceptable PSI", {}},
            {"n_bins", ParamKind::Count, 20, "histogram bins for numeric displays", {}},
            {"max_categories", ParamKind::Count, 20, "categories kept before pooling into Other", {}}};
}

Condition drift_condition(const Json& params) {
    const double emd = params.at("emd_threshold").get<double>();
    const double psi_max = params.at("psi_threshold").get<double>();
    return Condition{"Drift score is at most " + brief(emd) + " (EMD) / " + brief(psi_max) + " (PSI)",
                     [params](const Json& v) {
                         std::vector<std::string> over;
                         for (const auto& [name, rec] : v.at("features").items()) {
                             const auto method = rec.at("method").get<std::string>();
                             const double s = rec.at("score").get<double>();
                             if (s > threshold_for(method, params)) {
                                 over.push_back(name + " (" + method + " " + brief(s) + ")");
                             }
                         }
                         if (!over.empty()) return fail("drift found in " + join_limited(over));
                         std::vector<std::string> skipped;
                         for (const auto& [name, why] : v.at("skipped").items()) {
                             skipped.push_back(name + ": " + why.get<std::string>());
                         }
                         if (!skipped.empty()) return warn("not assessed: " + join_limited(skipped));
                         if (v.at("max_feature").is_null()) return pass("no features compared");
                         return pass("max drift " + brief(v.at("max_score").get<double>()) + " in " +
                                     v.at("max_feature").get<std::string>());
                     }};
}

CheckPtr feature_drift() {
    auto c = std::make_shared<CheckDefinition>();
    c->id = "feature_drift";
    c->category = Category::Distribution;
    c->description = "Per-feature train/test drift: EMD for numeric, PSI for categorical features";
    c->params = drift_params();
    c->requirements.test = true;
    c->run = [](const CheckContext& ctx, const Json& params) {
        const Dataset* train = ctx.dataset(Split::Train);
        const Dataset* test = ctx.dataset(Split::Test);
        if (train == nullptr) throw SkipCheck("requires train dataset");
        Json features = Json::object();
        Json skipped = Json::object();
        Json max_feature = nullptr;
        double max_score = 0.0;
        CheckOutput out;
        for (const auto& f : shared_features(*train, *test)) {
            auto d = column_drift(f, train->column(f), test->column(f), params);
            if (!d.score) {
                skipped[f] = d.skip_reason;
                continue;
            }
            features[f] = Json{{"method", to_string(d.score->method)}, {"score", d.score->value}};
            if (max_feature.is_null() || d.score->value > max_score) {
                max_score = d.score->value;
                max_feature = f;
            }
            out.displays.push_back(std::move(*d.display));
        }
        out.value = Json{{"features", features}, {"skipped", skipped}, {"max_score", max_score}, {"max_feature", max_feature}};
        if (!skipped.empty()) out.note = std::to_string(skipped.size()) + " feature(s) not assessed";
        return out;
    };
    c->conditions = {{"drift_threshold", drift_condition}};
    c->default_conditions = {"drift_threshold"};
    return c;
}

CheckPtr label_drift() {
    auto c = std::make_shared<CheckDefinition>();
    c->id = "label_drift";
    c->category = Category::Distribution;
    c->description = "Train/test drift of the label: PSI for classification, EMD for regression";
    c->params = drift_params();
    c->requirements.test = true;
    c->requirements.label = true;
    c->requirements.test_label = true;
    c->run = [](const CheckContext& ctx, const Json& params) {
        const Dataset* train = ctx.dataset(Split::Train);
        const Dataset* test = ctx.dataset(Split::Test);
        if (train == nullptr) throw SkipCheck("requires train dataset");
        const std::string name = *train->label_name();
        auto d = column_drift(name, train->label(), test->label(), params);
        CheckOutput out;
        Json features = Json::object();
        Json skipped = Json::object();
        if (d.score) {
            features[name] = Json{{"method", to_string(d.score->method)}, {"score", d.score->value}};
            out.displays.push_back(std::move(*d.display));
        } else {
            skipped[name] = d.skip_reason;
        }
        out.value = Json{{"features", features},
                         {"skipped", skipped},
                         {"max_score", d.score ? d.score->value : 0.0},
                         {"max_feature", d.score ? Json(name) : Json(nullptr)}};
        return out;
    };
    c->conditions = {{"drift_threshold", drift_condition}};
    c->default_conditions = {"drift_threshold"};
    return c;
}

struct NumericRows {
    FeatureRows rows;
    std::vector<std::size_t> source;
};

NumericRows complete_rows(const Dataset& d, const std::vector<std::string>& features, std::size_t limit,
                          std::uint64_t seed) {
    std::vector<std::size_t> order(d.n_rows());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    if (order.size() > limit) {
        Rng rng(seed);
        rng.shuffle(order);
        order.resize(limit);
        std::sort(order.begin(), order.end());
    }
    NumericRows out;
    for (auto i : order) {
        std::vector<double> row;
        for (const auto& f : features) row.push_back(d.column(f).numeric(i));
        if (std::all_of(row.begin(), row.end(), [](double x) { return std::isfinite(x); })) {
            out.rows.push_back(std::move(row));
            out.source.push_back(i);
        }
    }
    return out;
}

double mean_capped(const std::vector<double>& v, double cap) {
    double s = 0.0;
    for (double x : v) s += std::min(x, cap);
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

CheckPtr trust_score_comparison() {
    auto c = std::make_shared<CheckDefinition>();
    c->id = "trust_score_comparison";
    c->category = Category::Distribution;
    c->description = "Mean model trust score on test relative to train";
    c->params = {{"k", ParamKind::Count, 2, "neighbor rank for density filtering", {}},
                 {"alpha", ParamKind::Fraction, 0.0, "low-density fraction dropped per class", {}},
                 {"min_ratio", ParamKind::Real, 0.8, "smallest acceptable test/train mean ratio", {}},
                 {"max_samples", ParamKind::Count, 5000, "rows sampled per split", {}},
                 {"score_cap", ParamKind::Real, 100.0, "per-row scores are clipped here before averaging", {}}};
    c->requirements.test = true;
    c->requirements.label = true;
    c->requirements.task = Task::Classification;
    c->requirements.train_predictions = true;
    c->requirements.test_predictions = true;
    c->run = [](const CheckContext& ctx, const Json& params) {
        const Dataset& train = *ctx.dataset(Split::Train);
        const Dataset& test = *ctx.dataset(Split::Test);
        std::vector<std::string> features;
        for (const auto& f : shared_features(train, test)) {
            if (train.column(f).type() == ColumnType::Numeric && test.column(f).type() == ColumnType::Numeric) {
                features.push_back(f);
            }
        }
        if (features.size() < 2) throw SkipCheck("requires at least 2 numeric features");
        const auto limit = params.at("max_samples").get<std::size_t>();
        const Predictions& ptrain = ctx.predictions(Split::Train);
        const Predictions& ptest = ctx.predictions(Split::Test);

        auto tr = complete_rows(train, features, limit, ctx.seed);
        FeatureRows reference;
        std::vector<std::string> labels;
        std::vector<std::size_t> ref_source;
        for (std::size_t i = 0; i < tr.rows.size(); ++i) {
            const auto row = tr.source[i];
            if (train.label().is_missing(row)) continue;
            reference.push_back(tr.rows[i]);
            labels.push_back(train.label().category(row));
            ref_source.push_back(row);
        }
        std::map<std::string, std::size_t> class_size;
        for (const auto& l : labels) ++class_size[l];
        if (class_size.size() < 2) throw SkipCheck("reference rows contain fewer than 2 classes");

        std::map<std::vector<double>, std::size_t> first_index;
        for (std::size_t i = 0; i < reference.size(); ++i) first_index.emplace(reference[i], i);

        std::size_t dropped = 0;
        auto eval_split = [&](const NumericRows& rows, const Predictions& preds, bool self) {
            FeatureRows eval;
            std::vector<std::string> predicted;
            std::vector<std::optional<std::size_t>> exclude;
            for (std::size_t i = 0; i < rows.rows.size(); ++i) {
                const auto& p = preds.labels[rows.source[i]];
                if (!class_size.count(p)) {
                    ++dropped;
                    continue;
                }
                eval.push_back(rows.rows[i]);
                predicted.push_back(p);
                std::optional<std::size_t> skip;
                if (self) {
                    auto it = std::lower_bound(ref_source.begin(), ref_source.end(), rows.source[i]);
                    if (it != ref_source.end() && *it == rows.source[i]) {
                        skip = static_cast<std::size_t>(it - ref_source.begin());
                    }
                } else if (auto it = first_index.find(rows.rows[i]); it != first_index.end()) {
                    skip = it->second;
                }
                exclude.push_back(skip);
            }
            if (eval.empty()) throw SkipCheck("no rows with a predicted class present in train");
            TrustParams tp;
            tp.k = params.at("k").get<std::size_t>();
            tp.alpha = params.at("alpha").get<double>();
            return trust_scores(reference, labels, eval, predicted, tp, exclude);
        };
        const auto s_train = eval_split(tr, ptrain, true);
        const auto s_test = eval_split(complete_rows(test, features, limit, ctx.seed), ptest, false);
        const double cap = params.at("score_cap").get<double>();
        const double mean_train = mean_capped(s_train, cap);
        const double mean_test = mean_capped(s_test, cap);
        CheckOutput out;
        out.value = Json{{"mean_train", mean_train},
                         {"mean_test", mean_test},
                         {"ratio", mean_train > 0 ? mean_test / mean_train : 0.0},
                         {"n_train", s_train.size()},
                         {"n_test", s_test.size()},
                         {"features", features}};
        if (dropped > 0) {
            out.note = std::to_string(dropped) + " row(s) predicted a class absent from train and were not scored";
        }

        const std::size_t bins = 10;
        double hi = 0.0;
        for (const auto* v : {&s_train, &s_test}) {
            for (double x : *v) hi = std::max(hi, std::min(x, cap));
        }
        std::vector<std::string> labels_out;
        const double width = hi > 0 ? hi / static_cast<double>(bins) : 1.0;
        for (std::size_t i = 0; i < bins; ++i) {
            labels_out.push_back("[" + brief(width * static_cast<double>(i)) + ", " +
                                 brief(width * static_cast<double>(i + 1)) + (i + 1 == bins ? "]" : ")"));
        }
        auto hist = [&](const std::vector<double>& v) {
            std::vector<double> h(bins, 0.0);
            for (double x : v) {
                const auto i = static_cast<std::size_t>(std::min(x, cap) / width);
                h[std::min(i, bins - 1)] += 1.0;
            }
            return proportions(h);
        };
        out.displays.push_back(DisplayItem::histogram_pair("Trust score distribution", labels_out, hist(s_train),
                                                           hist(s_test), out.value["ratio"].get<double>(),
                                                           "mean ratio"));
        return out;
    };
    c->conditions = {{"min_trust_ratio", [](const Json& params) {
                          const double limit = params.at("min_ratio").get<double>();
                          return Condition{"Test/train mean trust score ratio is at least " + brief(limit),
                                           [limit](const Json& v) {
                                               const double r = v.at("ratio").get<double>();
                                               const std::string detail = "ratio " + brief(r) + " (train mean " +
                                                                          brief(v.at("mean_train").get<double>()) +
                                                                          ", test mean " +
                                                                          brief(v.at("mean_test").get<double>()) + ")";
                                               return r < limit ? fail(detail) : pass(detail);
                                           }};
                      }}};
    c->default_conditions = {"min_trust_ratio"};
    return c;
}

}  // namespace

std::vector<CheckPtr> distribution_checks() { return {feature_drift(), label_drift(), trust_score_comparison()}; }

}  // namespace tabcheck::checks
