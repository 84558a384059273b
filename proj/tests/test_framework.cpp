#include <gtest/gtest.h>

#include <atomic>
#include <set>
#include <stdexcept>

#include "support.hpp"
#include "tabcheck/catalog.hpp"
#include "tabcheck/error.hpp"
#include "tabcheck/framework.hpp"

using namespace tabcheck;
using testing_support::make_dataset;

namespace {

CheckPtr value_check(std::string id, double value, double limit = 0.5) {
    auto c = std::make_shared<CheckDefinition>();
    c->id = std::move(id);
    c->category = Category::Overview;
    c->params = {{"limit", ParamKind::Real, limit, "", {}}};
    c->run = [value](const CheckContext&, const Json&) {
        CheckOutput out;
        out.value = Json{{"v", value}};
        return out;
    };
    c->conditions = {{"below", [](const Json& params) {
                          const double lim = params.at("limit").get<double>();
                          return Condition{"value below limit", [lim](const Json& v) {
                                               const double x = v.at("v").get<double>();
                                               return x < lim ? ConditionOutcome{ConditionStatus::Pass, "ok"}
                                                              : ConditionOutcome{ConditionStatus::Fail, "too high"};
                                           }};
                      }},
                     {"warn_always", [](const Json&) {
                          return Condition{"always warns", [](const Json&) {
                                               return ConditionOutcome{ConditionStatus::Warning, "hmm"};
                                           }};
                      }}};
    c->default_conditions = {"below"};
    return c;
}

CheckPtr throwing_check(std::atomic<int>* calls = nullptr) {
    auto c = std::make_shared<CheckDefinition>();
    c->id = "boom";
    c->run = [calls](const CheckContext&, const Json&) -> CheckOutput {
        if (calls) ++*calls;
        throw std::runtime_error("deliberate failure");
    };
    c->conditions = {{"never", [](const Json&) {
                          return Condition{"never evaluated", [](const Json&) {
                                               return ConditionOutcome{ConditionStatus::Pass, ""};
                                           }};
                      }}};
    c->default_conditions = {"never"};
    return c;
}

CheckContext small_context() {
    CheckContext ctx;
    ctx.train = std::make_shared<Dataset>(make_dataset({{"a", {"1", "2", "3"}}, {"y", {"p", "q", "p"}}}, "y"));
    return ctx;
}

SuiteEntry entry(CheckPtr c, std::optional<std::vector<std::string>> conditions = std::nullopt) {
    SuiteEntry e;
    e.check = std::move(c);
    e.conditions = std::move(conditions);
    return e;
}

}  // namespace

TEST(Framework, RunCheckStatuses) {
    const auto ctx = small_context();
    const auto ran = run_check(*value_check("v", 0.1), ctx, Json{{"limit", 0.5}});
    EXPECT_EQ(ran.status, CheckStatus::Ran);
    EXPECT_EQ(ran.value.at("v"), 0.1);

    const auto errored = run_check(*throwing_check(), ctx, Json::object());
    EXPECT_EQ(errored.status, CheckStatus::Errored);
    EXPECT_NE(errored.message.find("deliberate failure"), std::string::npos);

    auto needs_test = std::make_shared<CheckDefinition>(*value_check("t", 0.0));
    needs_test->requirements.test = true;
    const auto skipped = run_check(*needs_test, ctx, Json{{"limit", 0.5}});
    EXPECT_EQ(skipped.status, CheckStatus::Skipped);
    EXPECT_NE(skipped.message.find("requires test dataset"), std::string::npos);

    auto skipping = std::make_shared<CheckDefinition>(*value_check("s", 0.0));
    skipping->run = [](const CheckContext&, const Json&) -> CheckOutput { throw SkipCheck("nothing numeric"); };
    EXPECT_EQ(run_check(*skipping, ctx, Json::object()).status, CheckStatus::Skipped);
}

TEST(Framework, ConditionsOnNonRanChecksWarn) {
    CheckResult r;
    r.status = CheckStatus::Errored;
    r.message = "adapter exploded";
    const auto check = value_check("v", 0.0);
    const auto conds = resolve_conditions(*check, Json{{"limit", 0.5}}, std::nullopt);
    const auto out = evaluate_conditions(r, conds);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].status, ConditionStatus::Warning);
    EXPECT_NE(out[0].detail.find("adapter exploded"), std::string::npos);
}

TEST(Framework, ConditionsAreSideEffectFree) {
    const auto ctx = small_context();
    const auto check = value_check("v", 0.7);
    const auto result = run_check(*check, ctx, Json{{"limit", 0.5}});
    const auto conds = resolve_conditions(*check, Json{{"limit", 0.5}}, std::vector<std::string>{"below", "warn_always"});
    EXPECT_EQ(evaluate_conditions(result, conds), evaluate_conditions(result, conds));
    EXPECT_EQ(evaluate_conditions(result, conds)[0].status, ConditionStatus::Fail);
}

TEST(Framework, IsolationAndOrder) {
    const auto ctx = small_context();
    std::atomic<int> calls{0};
    Suite suite{"mixed", {entry(value_check("first", 0.1)), entry(throwing_check(&calls)), entry(value_check("last", 0.9))}};
    for (bool parallel : {true, false}) {
        RunOptions opts;
        opts.parallel = parallel;
        const auto r = run_suite(suite, ctx, opts);
        ASSERT_EQ(r.entries.size(), 3u);
        EXPECT_EQ(r.entries[0].check.check_id, "first");
        EXPECT_EQ(r.entries[1].check.status, CheckStatus::Errored);
        EXPECT_EQ(r.entries[2].check.check_id, "last");
        EXPECT_EQ(r.entries[2].check.status, CheckStatus::Ran);
        EXPECT_EQ(r.summary, (Summary{1, 1, 0, 0, 1}));
        EXPECT_EQ(exit_code(r, false), 2);
    }
    EXPECT_EQ(calls.load(), 2);
}

TEST(Framework, ParamResolutionOrder) {
    const auto check = value_check("v", 0.0, 0.5);
    EXPECT_EQ(resolve_params(*check, Json::object(), Json::object()).at("limit"), 0.5);
    EXPECT_EQ(resolve_params(*check, Json{{"limit", 0.7}}, Json::object()).at("limit"), 0.7);
    EXPECT_EQ(resolve_params(*check, Json{{"limit", 0.7}}, Json{{"checks.v.limit", 0.9}}).at("limit"), 0.9);
    EXPECT_THROW(resolve_params(*check, Json{{"nope", 1}}, Json::object()), ConfigError);
    EXPECT_THROW(resolve_params(*check, Json{{"limit", "high"}}, Json::object()), ConfigError);
    EXPECT_THROW(resolve_conditions(*check, Json{{"limit", 0.5}}, std::vector<std::string>{"missing"}), ConfigError);
}

TEST(Framework, ParamKindValidation) {
    EXPECT_THROW(validate_param("c", {"f", ParamKind::Fraction, 0.1, "", {}}, 1.5), ConfigError);
    EXPECT_NO_THROW(validate_param("c", {"f", ParamKind::Fraction, 0.1, "", {}}, 1));
    EXPECT_THROW(validate_param("c", {"n", ParamKind::Count, 1, "", {}}, 0), ConfigError);
    EXPECT_THROW(validate_param("c", {"n", ParamKind::Count, 1, "", {}}, 2.5), ConfigError);
    EXPECT_NO_THROW(validate_param("c", {"o", ParamKind::OptionalReal, nullptr, "", {}}, nullptr));
    EXPECT_THROW(validate_param("c", {"b", ParamKind::Flag, false, "", {}}, 1), ConfigError);
    EXPECT_THROW(validate_param("c", {"s", ParamKind::Choice, "a", "", {"a", "b"}}, "z"), ConfigError);
}

TEST(Framework, SummaryMatchesRecount) {
    const auto ctx = small_context();
    Suite suite{"s",
                {entry(value_check("pass", 0.1)), entry(value_check("fail", 0.9)),
                 entry(value_check("warn", 0.1), std::vector<std::string>{"below", "warn_always"}),
                 entry(value_check("none", 0.9), std::vector<std::string>{})}};
    const auto r = run_suite(suite, ctx);
    EXPECT_EQ(r.summary, summarize(r.entries));
    EXPECT_EQ(r.summary, (Summary{2, 1, 1, 0, 0}));
}

// Oracle: exit code straight from the status definitions.
TEST(Framework, ExitCodeMatrix) {
    struct Kind {
        CheckStatus status;
        std::vector<ConditionStatus> conditions;
    };
    const std::vector<Kind> kinds = {
        {CheckStatus::Ran, {}},
        {CheckStatus::Ran, {ConditionStatus::Pass}},
        {CheckStatus::Ran, {ConditionStatus::Warning}},
        {CheckStatus::Ran, {ConditionStatus::Fail}},
        {CheckStatus::Ran, {ConditionStatus::Warning, ConditionStatus::Fail}},
        {CheckStatus::Skipped, {ConditionStatus::Warning}},
        {CheckStatus::Errored, {ConditionStatus::Warning}},
    };
    for (std::size_t a = 0; a < kinds.size(); ++a) {
        for (std::size_t b = 0; b < kinds.size(); ++b) {
            for (std::size_t c = 0; c < kinds.size(); ++c) {
                SuiteResult r;
                bool any_error = false, any_fail = false, any_warn = false;
                for (auto k : {a, b, c}) {
                    SuiteEntryResult e;
                    e.check.status = kinds[k].status;
                    for (auto s : kinds[k].conditions) e.conditions.push_back({"c", s, ""});
                    any_error |= kinds[k].status == CheckStatus::Errored;
                    for (auto s : kinds[k].conditions) {
                        any_fail |= s == ConditionStatus::Fail;
                        any_warn |= s == ConditionStatus::Warning;
                    }
                    r.entries.push_back(e);
                }
                r.summary = summarize(r.entries);
                const int lax = any_error ? 2 : (any_fail ? 1 : 0);
                const int strict = any_error ? 2 : (any_fail || any_warn ? 1 : 0);
                EXPECT_EQ(exit_code(r, false), lax);
                EXPECT_EQ(exit_code(r, true), strict);
                const auto& s = r.summary;
                EXPECT_EQ(s.passed + s.failed + s.warned + s.skipped + s.errored, 3u);
            }
        }
    }
}

TEST(Framework, DisplayFactoriesEnforceLengths) {
    EXPECT_THROW(DisplayItem::bars("t", {"a", "b"}, {{"s", {1.0}}}), ContractError);
    EXPECT_THROW(DisplayItem::histogram_pair("t", {"a"}, {1.0}, {0.5, 0.5}, 0.0, "PSI"), ContractError);
    EXPECT_NO_THROW(DisplayItem::lines("t", {0, 1}, {{"y", {0.0, 1.0}}}, "x", "y"));
}

TEST(Framework, ContextPredictionsFromAdapterAreCached) {
    struct Counting : Predictor {
        std::atomic<int> calls{0};
        Predictions predict(const Dataset& d, Task task, std::span<const std::string> classes) override {
            ++calls;
            Predictions p;
            p.task = task;
            p.classes.assign(classes.begin(), classes.end());
            p.labels.assign(d.n_rows(), classes.front());
            return p;
        }
        std::string describe() const override { return "counting"; }
    };
    auto ctx = small_context();
    auto adapter = std::make_shared<Counting>();
    ctx.adapter = adapter;
    EXPECT_EQ(ctx.evaluation_split(), Split::Train);
    EXPECT_EQ(ctx.predictions(Split::Train).labels.size(), 3u);
    EXPECT_EQ(ctx.predictions(Split::Train).labels.size(), 3u);
    EXPECT_EQ(adapter->calls.load(), 1);
    EXPECT_THROW(ctx.predictions(Split::Test), SkipCheck);
}

TEST(Framework, MisalignedPredictionsError) {
    auto ctx = small_context();
    Predictions p;
    p.task = Task::Classification;
    p.classes = {"p", "q"};
    p.labels = {"p", "q"};
    ctx.predictions_train = p;
    const auto r = run_check(*find_check("performance_report"), ctx,
                             resolve_params(*find_check("performance_report"), Json::object(), Json::object()));
    EXPECT_EQ(r.status, CheckStatus::Errored);
    EXPECT_NE(r.message.find("2"), std::string::npos);
}

TEST(Catalog, SuitesAndCategories) {
    EXPECT_EQ(check_catalog().size(), 19u);
    std::set<std::string> ids;
    for (const auto& c : check_catalog()) {
        EXPECT_TRUE(ids.insert(c->id).second) << c->id;
        for (const auto& p : c->params) EXPECT_NO_THROW(validate_param(c->id, p, p.default_value)) << c->id;
        for (const auto& d : c->default_conditions) EXPECT_NE(c->find_condition(d), nullptr) << c->id;
    }
    const auto suites = builtin_suites();
    ASSERT_EQ(suites.size(), 3u);
    auto ids_of = [](const Suite& s) {
        std::vector<std::string> out;
        for (const auto& e : s.entries) out.push_back(e.check->id);
        return out;
    };
    EXPECT_EQ(ids_of(find_builtin_suite("data_integrity")),
              (std::vector<std::string>{"duplicates", "single_value", "mixed_types", "outliers", "conflicting_labels",
                                        "dataset_summary", "feature_label_correlation"}));
    EXPECT_EQ(ids_of(find_builtin_suite("train_test_validation")),
              (std::vector<std::string>{"schema_comparison", "feature_drift", "label_drift", "train_test_leakage",
                                        "pps_difference", "trust_score_comparison"}));
    EXPECT_EQ(ids_of(find_builtin_suite("model_evaluation")),
              (std::vector<std::string>{"performance_report", "simple_model_comparison", "calibration",
                                        "error_distribution", "weak_segments", "unused_features"}));
    EXPECT_THROW(find_builtin_suite("nope"), ConfigError);
    EXPECT_THROW(find_check("nope"), ConfigError);
    EXPECT_EQ(ids_of(single_check_suite("outliers")), std::vector<std::string>{"outliers"});
}
