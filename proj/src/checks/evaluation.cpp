#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

#include "common.hpp"
#include "tabcheck/metrics.hpp"
#include "tabcheck/stats.hpp"
#include "tabcheck/tree.hpp"

namespace tabcheck::checks {

namespace {

/// Labeled rows of the evaluation split with their predictions.
struct EvalData {
    Split split = Split::Test;
    const Dataset* data = nullptr;
    const Predictions* predictions = nullptr;
    std::vector<std::size_t> rows;
    std::vector<std::string> true_labels;
    std::vector<std::string> pred_labels;
    std::vector<double> true_values;
    std::vector<double> pred_values;
    std::vector<std::vector<double>> probabilities;
};

EvalData eval_data(const CheckContext& ctx) {
    const auto split = ctx.evaluation_split();
    if (!split) throw SkipCheck("requires model predictions (prediction file or predict command)");
    EvalData e;
    e.split = *split;
    e.data = ctx.dataset(*split);
    if (!e.data->has_label()) throw SkipCheck("requires labeled " + std::string(to_string(*split)) + " dataset");
    e.predictions = &ctx.predictions(*split);
    const auto& label = e.data->label();
    const bool classification = e.data->task() == Task::Classification;
    for (std::size_t i = 0; i < e.data->n_rows(); ++i) {
        if (label.is_missing(i)) continue;
        e.rows.push_back(i);
        if (classification) {
            e.true_labels.push_back(label.category(i));
            e.pred_labels.push_back(e.predictions->labels[i]);
            if (e.predictions->has_probabilities()) e.probabilities.push_back(e.predictions->probabilities[i]);
        } else {
            e.true_values.push_back(label.numeric(i));
            e.pred_values.push_back(e.predictions->values[i]);
        }
    }
    if (e.rows.empty()) throw SkipCheck("no labeled rows");
    return e;
}

std::vector<std::string> eval_classes(const CheckContext& ctx, const EvalData& e) {
    return e.predictions->classes.empty() ? ctx.classes() : e.predictions->classes;
}

/// Condition on one metric that exists only when its threshold is set.
ConditionSpec metric_condition(const std::string& param, const std::string& metric, bool minimum) {
    return {param, [param, metric, minimum](const Json& params) {
                const Json& limit_json = params.at(param);
                if (limit_json.is_null()) return Condition{};
                const double limit = limit_json.get<double>();
                return Condition{metric + (minimum ? " is at least " : " is at most ") + brief(limit),
                                 [metric, minimum, limit](const Json& v) {
                                     const auto& m = v.at("metrics");
                                     if (!m.contains(metric) || !m.at(metric).is_number()) {
                                         return warn(metric + " not available for this task");
                                     }
                                     const double x = m.at(metric).get<double>();
                                     const std::string detail = metric + " = " + brief(x);
                                     const bool ok = minimum ? x >= limit : x <= limit;
                                     return ok ? pass(detail) : fail(detail);
                                 }};
            }};
}

CheckPtr performance_report() {
    auto c = std::make_shared<CheckDefinition>();
    c->id = "performance_report";
    c->category = Category::Evaluation;
    c->description = "Model performance metrics on the evaluation split";
    c->params = {{"min_accuracy", ParamKind::OptionalReal, nullptr, "fail below this accuracy", {}},
                 {"min_macro_f1", ParamKind::OptionalReal, nullptr, "fail below this macro F1", {}},
                 {"max_rmse", ParamKind::OptionalReal, nullptr, "fail above this RMSE", {}},
                 {"max_mae", ParamKind::OptionalReal, nullptr, "fail above this MAE", {}},
                 {"min_r2", ParamKind::OptionalReal, nullptr, "fail below this R2", {}}};
    c->requirements.label = true;
    c->requirements.predictions = true;
    c->run = [](const CheckContext& ctx, const Json&) {
        const EvalData e = eval_data(ctx);
        CheckOutput out;
        Json metrics = Json::object();
        if (e.data->task() == Task::Classification) {
            const auto classes = eval_classes(ctx, e);
            const auto m = compute_metrics(e.true_labels, e.pred_labels, e.probabilities, classes);
            const auto& cm = *m.classification;
            metrics["accuracy"] = cm.accuracy;
            metrics["macro_f1"] = cm.macro_f1;
            metrics["weighted_f1"] = cm.weighted_f1;
            metrics["brier"] = cm.brier ? Json(*cm.brier) : Json(nullptr);
            Json per_class = Json::object();
            std::vector<std::vector<Json>> rows;
            std::vector<std::string> names;
            for (const auto& pc : cm.per_class) {
                per_class[pc.label] = Json{{"precision", pc.precision}, {"recall", pc.recall}, {"f1", pc.f1}, {"support", pc.support}};
                rows.push_back({pc.label, pc.precision, pc.recall, pc.f1, pc.support});
                names.push_back(pc.label);
            }
            metrics["per_class"] = per_class;
            std::vector<std::vector<Json>> confusion;
            std::vector<std::string> columns{"true \\ predicted"};
            for (const auto& n : names) columns.push_back(n);
            for (std::size_t t = 0; t < names.size(); ++t) {
                std::vector<Json> row{names[t]};
                for (auto count : cm.confusion[t]) row.push_back(count);
                confusion.push_back(std::move(row));
            }
            metrics["confusion"] = cm.confusion;
            out.displays.push_back(DisplayItem::table("Per-class metrics", {"class", "precision", "recall", "f1", "support"}, rows));
            out.displays.push_back(DisplayItem::table("Confusion matrix", columns, confusion));
        } else {
            const auto m = compute_metrics(e.true_values, e.pred_values);
            metrics["rmse"] = m.regression->rmse;
            metrics["mae"] = m.regression->mae;
            metrics["r2"] = m.regression->r2;
            out.displays.push_back(DisplayItem::table("Regression metrics", {"metric", "value"},
                                                      {{"rmse", m.regression->rmse},
                                                       {"mae", m.regression->mae},
                                                       {"r2", m.regression->r2}}));
        }
        out.value = Json{{"split", to_string(e.split)},
                         {"task", to_string(e.data->task())},
                         {"n_rows", e.rows.size()},
                         {"metrics", metrics}};
        for (const auto& w : e.predictions->warnings) {
            if (!out.note.empty()) out.note += "; ";
            out.note += w;
        }
        return out;
    };
    c->conditions = {metric_condition("min_accuracy", "accuracy", true), metric_condition("min_macro_f1", "macro_f1", true),
                     metric_condition("max_rmse", "rmse", false), metric_condition("max_mae", "mae", false),
                     metric_condition("min_r2", "r2", true)};
    c->default_conditions = {"min_accuracy", "min_macro_f1", "max_rmse", "max_mae", "min_r2"};
    return c;
}

CheckPtr simple_model_comparison() {
    auto c = std::make_shared<CheckDefinition>();
    c->id = "simple_model_comparison";
    c->category = Category::Evaluation;
    c->description = "Model performance on test against a shallow decision tree trained on train";
    c->params = {{"max_depth", ParamKind::Count, 3, "depth of the simple tree", {}},
                 {"min_samples_leaf", ParamKind::Count, 5, "minimum rows per tree leaf", {}}};
    c->requirements.test = true;
    c->requirements.label = true;
    c->requirements.test_label = true;
    c->requirements.test_predictions = true;
    c->run = [](const CheckContext& ctx, const Json& params) {
        const Dataset& train = *ctx.dataset(Split::Train);
        const Dataset& test = *ctx.dataset(Split::Test);
        const auto features = shared_features(train, test);
        const Predictions& preds = ctx.predictions(Split::Test);
        const bool classification = train.task() == Task::Classification;

        std::vector<std::size_t> train_rows;
        for (std::size_t i = 0; i < train.n_rows(); ++i) {
            if (!train.label().is_missing(i)) train_rows.push_back(i);
        }
        std::vector<std::size_t> test_rows;
        for (std::size_t i = 0; i < test.n_rows(); ++i) {
            if (!test.label().is_missing(i)) test_rows.push_back(i);
        }
        if (train_rows.empty() || test_rows.empty()) throw SkipCheck("no labeled rows");

        std::vector<std::string> y_labels;
        std::vector<double> y_values;
        for (auto i : train_rows) {
            if (classification) y_labels.push_back(train.label().category(i));
            else y_values.push_back(train.label().numeric(i));
        }
        const TreeTarget target = classification ? TreeTarget::classification(y_labels) : TreeTarget::regression(y_values);
        TreeParams tp;
        tp.max_depth = params.at("max_depth").get<std::size_t>();
        tp.min_samples_leaf = params.at("min_samples_leaf").get<std::size_t>();

        std::string simple_kind = "decision tree (depth " + std::to_string(tp.max_depth) + ")";
        std::string note;
        TreePrediction simple;
        const TreeInput test_input = tree_input(test, features, test_rows);
        try {
            if (features.empty()) throw ContractError("no shared features");
            const auto tree = fit_tree(tree_input(train, features, train_rows), target, tp);
            simple = predict_tree(tree, test_input);
        } catch (const Error& err) {
            simple_kind = classification ? "constant (majority class)" : "constant (mean)";
            note = std::string("tree fit degenerate (") + err.what() + "), compared against a constant baseline";
            if (classification) {
                std::vector<std::size_t> counts(target.classes.size(), 0);
                for (auto k : target.class_index) ++counts[k];
                const auto best = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
                simple.labels.assign(test_rows.size(), target.classes[best]);
            } else {
                double s = 0.0;
                for (double v : y_values) s += v;
                simple.values.assign(test_rows.size(), s / static_cast<double>(y_values.size()));
            }
        }

        double model_metric = 0.0;
        double simple_metric = 0.0;
        double gain = 0.0;
        std::string metric;
        const double eps = 1e-12;
        if (classification) {
            std::vector<std::string> truth;
            std::vector<std::string> model;
            for (auto i : test_rows) {
                truth.push_back(test.label().category(i));
                model.push_back(preds.labels[i]);
            }
            metric = "accuracy";
            model_metric = classification_metrics(truth, model).accuracy;
            simple_metric = classification_metrics(truth, simple.labels).accuracy;
            gain = (model_metric - simple_metric) / std::max(std::abs(simple_metric), eps);
        } else {
            std::vector<double> truth;
            std::vector<double> model;
            for (auto i : test_rows) {
                truth.push_back(test.label().numeric(i));
                model.push_back(preds.values[i]);
            }
            metric = "rmse";
            model_metric = regression_metrics(truth, model).rmse;
            simple_metric = regression_metrics(truth, simple.values).rmse;
            gain = (simple_metric - model_metric) / std::max(simple_metric, eps);
        }
        CheckOutput out;
        out.value = Json{{"metric", metric},
                         {"model_metric", model_metric},
                         {"simple_metric", simple_metric},
                         {"gain", gain},
                         {"simple_model", simple_kind}};
        out.note = note;
        out.displays.push_back(DisplayItem::bars("Model vs simple model (" + metric + ")", {"model", "simple"},
                                                 {{metric, {model_metric, simple_metric}}}));
        return out;
    };
    c->conditions = {{"model_beats_simple", [](const Json&) {
                          return Condition{"Model outperforms the simple model", [](const Json& v) {
                                               const double m = v.at("model_metric").get<double>();
                                               const double s = v.at("simple_metric").get<double>();
                                               const auto metric = v.at("metric").get<std::string>();
                                               const bool better = metric == "rmse" ? m < s : m > s;
                                               const std::string detail = metric + " " + brief(m) + " vs simple " + brief(s) +
                                                                          " (gain " + brief(v.at("gain").get<double>()) + ")";
                                               return better ? pass(detail) : fail(detail);
                                           }};
                      }}};
    c->default_conditions = {"model_beats_simple"};
    return c;
}

CheckPtr calibration() {
    auto c = std::make_shared<CheckDefinition>();
    c->id = "calibration";
    c->category = Category::Evaluation;
    c->description = "Calibration curve and Brier score per class";
    c->params = {{"n_bins", ParamKind::Count, 10, "equal-width probability bins", {}},
                 {"max_brier", ParamKind::Real, 0.3, "largest acceptable overall Brier score", {}}};
    c->requirements.label = true;
    c->requirements.predictions = true;
    c->requirements.task = Task::Classification;
    c->run = [](const CheckContext& ctx, const Json& params) {
        const EvalData e = eval_data(ctx);
        if (e.probabilities.empty()) throw SkipCheck("requires predicted probabilities");
        const auto classes = eval_classes(ctx, e);
        const auto n_bins = params.at("n_bins").get<std::size_t>();
        if (n_bins < 2) throw ConfigError("checks.calibration.n_bins: expected at least 2");
        const std::size_t n = e.rows.size();
        Json per_class = Json::object();
        CheckOutput out;
        for (std::size_t k = 0; k < classes.size(); ++k) {
            std::vector<double> p(n);
            auto hit = std::make_unique<bool[]>(n);
            double sq = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                p[i] = e.probabilities[i][k];
                hit[i] = e.true_labels[i] == classes[k];
                const double d = p[i] - (hit[i] ? 1.0 : 0.0);
                sq += d * d;
            }
            per_class[classes[k]] = sq / static_cast<double>(n);
            const auto bins = calibration_bins(p, std::span<const bool>(hit.get(), n), n_bins);
            std::vector<double> x;
            std::vector<double> y;
            for (const auto& b : bins) {
                x.push_back(b.mean_predicted);
                y.push_back(b.fraction_positive);
            }
            out.displays.push_back(DisplayItem::lines("Calibration: " + classes[k], x,
                                                      {{"observed", y}, {"perfect", x}},
                                                      "mean predicted probability", "fraction of positives"));
        }
        out.value = Json{{"overall_brier", brier_score(e.probabilities, e.true_labels, classes)},
                         {"per_class", per_class},
                         {"split", to_string(e.split)}};
        return out;
    };
    c->conditions = {{"max_brier", [](const Json& params) {
                          const double limit = params.at("max_brier").get<double>();
                          return Condition{"Overall Brier score is at most " + brief(limit), [limit](const Json& v) {
                                               const double b = v.at("overall_brier").get<double>();
                                               const std::string detail = "Brier score " + brief(b);
                                               return b > limit ? warn(detail) : pass(detail);
                                           }};
                      }}};
    c->default_conditions = {"max_brier"};
    return c;
}

CheckPtr error_distribution() {
    auto c = std::make_shared<CheckDefinition>();
    c->id = "error_distribution";
    c->category = Category::Evaluation;
    c->description = "Residual distribution (regression) or per-class error rate (classification)";
    c->params = {{"max_abs_skewness", ParamKind::Real, 1.0, "largest acceptable residual skewness magnitude", {}},
                 {"n_bins", ParamKind::Count, 20, "residual histogram bins", {}}};
    c->requirements.label = true;
    c->requirements.predictions = true;
    c->run = [](const CheckContext& ctx, const Json& params) {
        const EvalData e = eval_data(ctx);
        CheckOutput out;
        if (e.data->task() == Task::Classification) {
            std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
            std::size_t wrong = 0;
            for (std::size_t i = 0; i < e.rows.size(); ++i) {
                auto& [errors, support] = counts[e.true_labels[i]];
                ++support;
                if (e.true_labels[i] != e.pred_labels[i]) {
                    ++errors;
                    ++wrong;
                }
            }
            Json per_class = Json::object();
            std::vector<std::vector<Json>> rows;
            for (const auto& [cls, ec] : counts) {
                const double rate = static_cast<double>(ec.first) / static_cast<double>(ec.second);
                per_class[cls] = Json{{"error_rate", rate}, {"support", ec.second}};
                rows.push_back({cls, rate, ec.second});
            }
            out.value = Json{{"task", "classification"},
                             {"overall_error", static_cast<double>(wrong) / static_cast<double>(e.rows.size())},
                             {"per_class", per_class}};
            out.displays.push_back(DisplayItem::table("Error rate per class", {"class", "error_rate", "support"}, rows));
            return out;
        }
        std::vector<double> residuals;
        for (std::size_t i = 0; i < e.rows.size(); ++i) residuals.push_back(e.true_values[i] - e.pred_values[i]);
        const auto m = moments(residuals);
        out.value = Json{{"task", "regression"}, {"mean", m.mean}, {"std", m.std_dev}, {"skewness", m.skewness}, {"n", residuals.size()}};
        const auto [lo_it, hi_it] = std::minmax_element(residuals.begin(), residuals.end());
        const double lo = *lo_it;
        const double hi = *hi_it;
        const std::size_t bins = hi > lo ? params.at("n_bins").get<std::size_t>() : 1;
        const double width = (hi - lo) / static_cast<double>(bins);
        std::vector<double> counts(bins, 0.0);
        for (double r : residuals) {
            const std::size_t b = width > 0 ? static_cast<std::size_t>((r - lo) / width) : 0;
            counts[std::min(b, bins - 1)] += 1.0;
        }
        std::vector<std::string> labels;
        for (std::size_t b = 0; b < bins; ++b) labels.push_back(brief(lo + width * (static_cast<double>(b) + 0.5)));
        out.displays.push_back(DisplayItem::bars("Residual distribution (y - prediction)", labels, {{"count", counts}}));
        return out;
    };
    c->conditions = {{"max_abs_skewness", [](const Json& params) {
                          const double limit = params.at("max_abs_skewness").get<double>();
                          return Condition{"Residual skewness magnitude is at most " + brief(limit), [limit](const Json& v) {
                                               if (!v.contains("skewness")) return pass("not applicable to classification");
                                               const double s = v.at("skewness").get<double>();
                                               const std::string detail = "skewness " + brief(s);
                                               return std::abs(s) > limit ? warn(detail) : pass(detail);
                                           }};
                      }}};
    c->default_conditions = {"max_abs_skewness"};
    return c;
}

struct Segment {
    std::string label;
    std::vector<std::size_t> members;
};

std::vector<Segment> feature_segments(const Column& col, const std::vector<std::size_t>& rows, std::size_t n_bins,
                                      std::size_t top_categories) {
    std::vector<Segment> out;
    if (col.type() == ColumnType::Numeric) {
        std::vector<double> values;
        std::vector<std::size_t> idx;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const double v = col.numeric(rows[k]);
            if (std::isnan(v)) continue;
            values.push_back(v);
            idx.push_back(k);
        }
        if (values.empty()) return out;
        const auto bins = quantile_bins(values, n_bins);
        out.resize(bins.n_bins());
        for (std::size_t b = 0; b < out.size(); ++b) out[b].label = bins.label(b);
        for (std::size_t j = 0; j < values.size(); ++j) out[bins.bin_of(values[j])].members.push_back(idx[j]);
        return out;
    }
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (!col.is_missing(rows[k])) groups[col.category(rows[k])].push_back(k);
    }
    std::vector<std::pair<std::string, std::vector<std::size_t>>> ranked(groups.begin(), groups.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second.size() > b.second.size(); });
    Segment other{"Other", {}};
    for (std::size_t g = 0; g < ranked.size(); ++g) {
        if (g < top_categories) {
            out.push_back({ranked[g].first, std::move(ranked[g].second)});
        } else {
            other.members.insert(other.members.end(), ranked[g].second.begin(), ranked[g].second.end());
        }
    }
    if (!other.members.empty()) {
        std::sort(other.members.begin(), other.members.end());
        out.push_back(std::move(other));
    }
    return out;
}

CheckPtr weak_segments() {
    auto c = std::make_shared<CheckDefinition>();
    c->id = "weak_segments";
    c->category = Category::Evaluation;
    c->description = "Feature segments where the model does markedly worse than overall";
    c->params = {{"n_bins", ParamKind::Count, 5, "quantile bins per numeric feature", {}},
                 {"top_categories", ParamKind::Count, 10, "categories kept before pooling into Other", {}},
                 {"min_segment_fraction", ParamKind::Fraction, 0.05, "smallest reported segment share", {}},
                 {"relative_margin", ParamKind::Fraction, 0.2, "relative metric gap that makes a segment weak", {}}};
    c->requirements.label = true;
    c->requirements.predictions = true;
    c->run = [](const CheckContext& ctx, const Json& params) {
        const EvalData e = eval_data(ctx);
        const bool classification = e.data->task() == Task::Classification;
        const std::size_t n = e.rows.size();
        std::vector<double> per_row(n);
        for (std::size_t k = 0; k < n; ++k) {
            per_row[k] = classification ? (e.true_labels[k] == e.pred_labels[k] ? 0.0 : 1.0)
                                        : std::abs(e.true_values[k] - e.pred_values[k]);
        }
        auto mean_of = [&](const std::vector<std::size_t>& members) {
            double s = 0.0;
            for (auto k : members) s += per_row[k];
            return s / static_cast<double>(members.size());
        };
        std::vector<std::size_t> all(n);
        for (std::size_t k = 0; k < n; ++k) all[k] = k;
        const double overall = mean_of(all);
        const double margin = params.at("relative_margin").get<double>();
        const double min_size = params.at("min_segment_fraction").get<double>() * static_cast<double>(n);

        struct Found {
            std::string feature;
            std::string segment;
            std::size_t size;
            double metric;
            double severity;
        };
        std::vector<Found> found;
        Json by_feature = Json::object();
        for (const auto& f : e.data->feature_names()) {
            const auto segments = feature_segments(e.data->column(f), e.rows, params.at("n_bins").get<std::size_t>(),
                                                   params.at("top_categories").get<std::size_t>());
            Json list = Json::array();
            for (const auto& s : segments) {
                if (s.members.empty()) continue;
                const double m = mean_of(s.members);
                list.push_back(Json{{"segment", s.label}, {"size", s.members.size()}, {"metric", m}});
                if (static_cast<double>(s.members.size()) < min_size) continue;
                if (!(m > (1.0 + margin) * overall)) continue;
                const double severity = (m - overall) / overall;
                found.push_back({f, s.label, s.members.size(), m, severity});
            }
            by_feature[f] = list;
        }
        std::stable_sort(found.begin(), found.end(), [](const Found& a, const Found& b) { return a.severity > b.severity; });
        Json reported = Json::array();
        std::vector<std::vector<Json>> rows;
        for (const auto& s : found) {
            reported.push_back(Json{{"feature", s.feature}, {"segment", s.segment}, {"size", s.size}, {"metric", s.metric}, {"overall", overall}});
            rows.push_back({s.feature, s.segment, s.size, s.metric, overall});
        }
        CheckOutput out;
        out.value = Json{{"metric", classification ? "error_rate" : "mae"},
                         {"overall", overall},
                         {"n_rows", n},
                         {"segments", reported},
                         {"all_segments", by_feature}};
        out.displays.push_back(DisplayItem::table("Weak segments", {"feature", "segment", "size", "metric", "overall"}, rows));
        return out;
    };
    c->conditions = {{"no_weak_segments", [](const Json&) {
                          return Condition{"No weak segments", [](const Json& v) {
                                               const auto& segs = v.at("segments");
                                               if (segs.empty()) return pass("no weak segments");
                                               std::vector<std::string> what;
                                               for (const auto& s : segs) {
                                                   what.push_back(s.at("feature").get<std::string>() + " = " +
                                                                  s.at("segment").get<std::string>() + " (" +
                                                                  v.at("metric").get<std::string>() + " " +
                                                                  brief(s.at("metric").get<double>()) + ")");
                                               }
                                               return warn(std::to_string(segs.size()) + " weak segment(s): " + join_limited(what, 3));
                                           }};
                      }}};
    c->default_conditions = {"no_weak_segments"};
    return c;
}

}  // namespace

std::vector<CheckPtr> evaluation_checks() {
    return {performance_report(), simple_model_comparison(), calibration(), error_distribution(), weak_segments()};
}

}  // namespace tabcheck::checks
