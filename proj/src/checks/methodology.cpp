#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "common.hpp"
#include "tabcheck/importance.hpp"
#include "tabcheck/pps.hpp"

namespace tabcheck::checks {

namespace {

CheckPtr train_test_leakage() {
    auto c = std::make_shared<CheckDefinition>();
    c->id = "train_test_leakage";
    c->category = Category::Methodology;
    c->description = "Fraction of test rows whose features exactly match a train row";
    c->params = {{"max_fraction", ParamKind::Fraction, 0.0, "largest acceptable leaked share", {}},
                 {"max_rows_shown", ParamKind::Count, 10, "leaked rows listed in the display", {}}};
    c->requirements.test = true;
    c->run = [](const CheckContext& ctx, const Json& params) {
        const Dataset* train = ctx.dataset(Split::Train);
        const Dataset* test = ctx.dataset(Split::Test);
        if (train == nullptr) throw SkipCheck("requires train dataset");
        const auto features = shared_features(*train, *test);
        if (features.empty()) throw SkipCheck("no shared features");
        std::unordered_map<std::string, std::size_t> seen;
        for (std::size_t i = 0; i < train->n_rows(); ++i) seen.emplace(train->row_key(i, features), i);
        std::vector<std::string> columns{"test_row", "train_row"};
        for (const auto& f : features) columns.push_back(f);
        std::vector<std::vector<Json>> rows;
        const auto limit = params.at("max_rows_shown").get<std::size_t>();
        std::size_t leaked = 0;
        for (std::size_t i = 0; i < test->n_rows(); ++i) {
            auto it = seen.find(test->row_key(i, features));
            if (it == seen.end()) continue;
            ++leaked;
            if (rows.size() < limit) {
                std::vector<Json> row{i, it->second};
                for (const auto& f : features) row.push_back(cell_json(test->column(f).cell(i)));
                rows.push_back(std::move(row));
            }
        }
        const std::size_t n = test->n_rows();
        CheckOutput out;
        out.value = Json{{"fraction", n == 0 ? 0.0 : static_cast<double>(leaked) / static_cast<double>(n)},
                         {"leaked_rows", leaked},
                         {"n_test_rows", n}};
        out.displays.push_back(DisplayItem::table("Test rows found in train", columns, rows));
        return out;
    };
    c->conditions = {{"max_leakage_fraction", [](const Json& params) {
                          const double limit = params.at("max_fraction").get<double>();
                          return Condition{"Share of test rows found in train is at most " + percent(limit),
                                           [limit](const Json& v) {
                                               const double f = v.at("fraction").get<double>();
                                               const std::string detail =
                                                   "found " + percent(f) + " of test rows in train (" +
                                                   std::to_string(v.at("leaked_rows").get<std::size_t>()) + " rows)";
                                               return f > limit ? fail(detail) : pass(detail);
                                           }};
                      }}};
    c->default_conditions = {"max_leakage_fraction"};
    return c;
}

struct PpsTable {
    Json scores = Json::object();
    Json skipped = Json::object();
};

PpsTable pps_all(const Dataset& d) {
    PpsTable t;
    for (const auto& f : d.feature_names()) {
        const auto r = pps(d.column(f), d.label(), d.task());
        if (r.skipped) {
            t.skipped[f] = r.note;
            t.scores[f] = 0.0;
        } else {
            t.scores[f] = r.score;
        }
    }
    return t;
}

DisplayItem sorted_bars(const std::string& title, const Json& scores, const std::string& series) {
    std::vector<std::pair<std::string, double>> items;
    for (const auto& [k, v] : scores.items()) items.emplace_back(k, v.get<double>());
    std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<std::string> labels;
    std::vector<double> values;
    for (const auto& [k, v] : items) {
        labels.push_back(k);
        values.push_back(v);
    }
    return DisplayItem::bars(title, labels, {{series, values}});
}

CheckPtr feature_label_correlation() {
    auto c = std::make_shared<CheckDefinition>();
    c->id = "feature_label_correlation";
    c->category = Category::Methodology;
    c->description = "Predictive power score of each feature for the label";
    c->params = {dataset_param(), {"max_pps", ParamKind::Fraction, 0.8, "largest acceptable single-feature PPS", {}}};
    c->requirements.label = true;
    c->run = [](const CheckContext& ctx, const Json& params) {
        const Dataset& d = selected_dataset(ctx, params);
        if (!d.has_label()) throw SkipCheck("requires labeled dataset");
        auto t = pps_all(d);
        CheckOutput out;
        out.displays.push_back(sorted_bars("Predictive power score", t.scores, "pps"));
        if (!t.skipped.empty()) out.note = "too few complete rows for " + std::to_string(t.skipped.size()) + " feature(s)";
        out.value = Json{{"features", t.scores}, {"skipped", t.skipped}};
        return out;
    };
    c->conditions = {{"max_pps", [](const Json& params) {
                          const double limit = params.at("max_pps").get<double>();
                          return Condition{"Feature PPS is at most " + brief(limit), [limit](const Json& v) {
                                               std::vector<std::string> over;
                                               for (const auto& [name, s] : v.at("features").items()) {
                                                   if (s.get<double>() > limit) over.push_back(name + " (" + brief(s.get<double>()) + ")");
                                               }
                                               if (over.empty()) return pass("no feature above " + brief(limit));
                                               return fail("suspected leakage in " + join_limited(over));
                                           }};
                      }}};
    c->default_conditions = {"max_pps"};
    return c;
}

CheckPtr pps_difference() {
    auto c = std::make_shared<CheckDefinition>();
    c->id = "pps_difference";
    c->category = Category::Methodology;
    c->description = "Per-feature PPS on train minus PPS on test";
    c->params = {{"max_difference", ParamKind::Fraction, 0.2, "largest acceptable train minus test PPS", {}}};
    c->requirements.test = true;
    c->requirements.label = true;
    c->requirements.test_label = true;
    c->run = [](const CheckContext& ctx, const Json&) {
        const Dataset* train = ctx.dataset(Split::Train);
        const Dataset* test = ctx.dataset(Split::Test);
        if (train == nullptr) throw SkipCheck("requires train dataset");
        Json features = Json::object();
        std::vector<std::string> labels;
        std::vector<double> a;
        std::vector<double> b;
        for (const auto& f : shared_features(*train, *test)) {
            const auto r_train = pps(train->column(f), train->label(), train->task());
            const auto r_test = pps(test->column(f), test->label(), train->task());
            features[f] = Json{{"train", r_train.score}, {"test", r_test.score}, {"difference", r_train.score - r_test.score}};
            labels.push_back(f);
            a.push_back(r_train.score);
            b.push_back(r_test.score);
        }
        CheckOutput out;
        out.value = Json{{"features", features}};
        out.displays.push_back(DisplayItem::bars("Predictive power score by split", labels, {{"train", a}, {"test", b}}));
        return out;
    };
    c->conditions = {{"max_pps_difference", [](const Json& params) {
                          const double limit = params.at("max_difference").get<double>();
                          return Condition{"Train minus test PPS is at most " + brief(limit), [limit](const Json& v) {
                                               std::vector<std::string> over;
                                               for (const auto& [name, rec] : v.at("features").items()) {
                                                   const double d = rec.at("difference").get<double>();
                                                   if (d > limit) over.push_back(name + " (" + brief(d) + ")");
                                               }
                                               if (over.empty()) return pass("no feature above " + brief(limit));
                                               return fail("PPS drops on test for " + join_limited(over));
                                           }};
                      }}};
    c->default_conditions = {"max_pps_difference"};
    return c;
}

CheckPtr unused_features() {
    auto c = std::make_shared<CheckDefinition>();
    c->id = "unused_features";
    c->category = Category::Methodology;
    c->description = "Features the model barely uses, by permutation importance";
    c->params = {{"repeats", ParamKind::Count, 5, "shuffles per feature", {}},
                 {"min_share", ParamKind::Fraction, 0.02, "normalized importance below which a feature is unused", {}}};
    c->requirements.label = true;
    c->requirements.adapter = true;
    c->run = [](const CheckContext& ctx, const Json& params) {
        const Split split = ctx.dataset(Split::Test) && ctx.dataset(Split::Test)->has_label() ? Split::Test : Split::Train;
        const Dataset* d = ctx.dataset(split);
        if (d == nullptr || !d->has_label()) throw SkipCheck("requires labeled dataset");
        const auto& file = split == Split::Test ? ctx.predictions_test : ctx.predictions_train;
        const Predictions* baseline = file ? nullptr : &ctx.predictions(split);
        ImportanceOptions opts;
        opts.repeats = params.at("repeats").get<std::size_t>();
        opts.seed = ctx.seed;
        const auto classes = ctx.classes();
        const auto report = permutation_importance(*ctx.adapter, *d, classes, opts, baseline);
        const double min_share = params.at("min_share").get<double>();
        Json importance = Json::object();
        std::vector<std::string> unused;
        std::vector<std::string> labels;
        std::vector<double> shares;
        for (const auto& fi : report.features) {
            importance[fi.feature] = Json{{"raw_drop", fi.raw_drop}, {"normalized", fi.normalized}};
            labels.push_back(fi.feature);
            shares.push_back(fi.normalized);
            if (fi.normalized < min_share && d->column(fi.feature).distinct_count() > 1) unused.push_back(fi.feature);
        }
        CheckOutput out;
        out.value = Json{{"unused", unused},
                         {"importance", importance},
                         {"metric", report.metric_name},
                         {"baseline_metric", report.baseline_metric},
                         {"repeats", report.repeats},
                         {"split", to_string(split)}};
        out.displays.push_back(DisplayItem::bars("Permutation importance share", labels, {{"share", shares}}));
        return out;
    };
    c->conditions = {{"no_unused_features", [](const Json&) {
                          return Condition{"Every varying feature is used by the model", [](const Json& v) {
                                               const auto unused = v.at("unused").get<std::vector<std::string>>();
                                               if (unused.empty()) return pass("all varying features used");
                                               return warn("nearly unused: " + join_limited(unused));
                                           }};
                      }}};
    c->default_conditions = {"no_unused_features"};
    return c;
}

}  // namespace

std::vector<CheckPtr> methodology_checks() {
    return {train_test_leakage(), feature_label_correlation(), pps_difference(), unused_features()};
}

}  // namespace tabcheck::checks
