#include "tabcheck/framework.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <future>
#include <set>

#include "tabcheck/error.hpp"

namespace tabcheck {

std::string_view to_string(Category c) {
    switch (c) {
        case Category::Distribution:
            return "distribution";
        case Category::Integrity:
            return "integrity";
        case Category::Methodology:
            return "methodology";
        case Category::Evaluation:
            return "evaluation";
        case Category::Overview:
            return "overview";
    }
    return "unknown";
}

std::string_view to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Ran:
            return "ran";
        case CheckStatus::Skipped:
            return "skipped";
        case CheckStatus::Errored:
            return "errored";
    }
    return "unknown";
}

std::string_view to_string(ConditionStatus s) {
    switch (s) {
        case ConditionStatus::Pass:
            return "pass";
        case ConditionStatus::Fail:
            return "fail";
        case ConditionStatus::Warning:
            return "warning";
    }
    return "unknown";
}

std::string_view to_string(DisplayKind k) {
    switch (k) {
        case DisplayKind::Table:
            return "table";
        case DisplayKind::BarSeries:
            return "bar_series";
        case DisplayKind::LineSeries:
            return "line_series";
        case DisplayKind::HistogramPair:
            return "histogram_pair";
        case DisplayKind::Text:
            return "text";
    }
    return "unknown";
}

std::string_view to_string(Split s) { return s == Split::Train ? "train" : "test"; }

DisplayItem DisplayItem::table(std::string title, std::vector<std::string> columns,
                               std::vector<std::vector<Json>> rows) {
    for (const auto& r : rows) {
        if (r.size() != columns.size()) {
            throw ContractError("table display '" + title + "': row width differs from header");
        }
    }
    DisplayItem d;
    d.kind = DisplayKind::Table;
    d.title = std::move(title);
    d.payload = Json::object();
    d.payload["columns"] = columns;
    d.payload["rows"] = Json::array();
    for (auto& r : rows) d.payload["rows"].push_back(Json(std::move(r)));
    return d;
}

DisplayItem DisplayItem::bars(std::string title, std::vector<std::string> labels,
                              std::vector<std::pair<std::string, std::vector<double>>> series) {
    DisplayItem d;
    d.kind = DisplayKind::BarSeries;
    d.payload = Json::object();
    d.payload["labels"] = labels;
    d.payload["series"] = Json::array();
    for (auto& [name, values] : series) {
        if (values.size() != labels.size()) {
            throw ContractError("bar display '" + title + "': series length differs from labels");
        }
        d.payload["series"].push_back(Json{{"name", name}, {"values", values}});
    }
    d.title = std::move(title);
    return d;
}

DisplayItem DisplayItem::lines(std::string title, std::vector<double> x,
                               std::vector<std::pair<std::string, std::vector<double>>> series,
                               std::string x_label, std::string y_label) {
    DisplayItem d;
    d.kind = DisplayKind::LineSeries;
    d.payload = Json::object();
    d.payload["x_label"] = std::move(x_label);
    d.payload["y_label"] = std::move(y_label);
    d.payload["x"] = x;
    d.payload["series"] = Json::array();
    for (auto& [name, values] : series) {
        if (values.size() != x.size()) {
            throw ContractError("line display '" + title + "': series length differs from x");
        }
        d.payload["series"].push_back(Json{{"name", name}, {"values", values}});
    }
    d.title = std::move(title);
    return d;
}

DisplayItem DisplayItem::histogram_pair(std::string title, std::vector<std::string> bins,
                                        std::vector<double> reference, std::vector<double> current,
                                        double score, std::string method) {
    if (reference.size() != bins.size() || current.size() != bins.size()) {
        throw ContractError("histogram display '" + title + "': series length differs from bins");
    }
    DisplayItem d;
    d.kind = DisplayKind::HistogramPair;
    d.title = std::move(title);
    d.payload = Json::object();
    d.payload["bins"] = bins;
    d.payload["reference"] = reference;
    d.payload["current"] = current;
    d.payload["score"] = score;
    d.payload["method"] = std::move(method);
    return d;
}

DisplayItem DisplayItem::text(std::string title, std::string body) {
    DisplayItem d;
    d.kind = DisplayKind::Text;
    d.title = std::move(title);
    d.payload = Json::object();
    d.payload["text"] = std::move(body);
    return d;
}

CheckContext::CheckContext() : cache_(std::make_shared<Cache>()) {}

const Dataset* CheckContext::dataset(Split split) const {
    return split == Split::Train ? train.get() : test.get();
}

Task CheckContext::task() const {
    if (train) return train->task();
    if (test) return test->task();
    return Task::Unlabeled;
}

std::vector<std::string> CheckContext::classes() const {
    std::set<std::string> all;
    for (const Dataset* d : {train.get(), test.get()}) {
        if (d != nullptr && d->has_label() && d->task() == Task::Classification) {
            for (auto& c : d->label_classes()) all.insert(std::move(c));
        }
    }
    return {all.begin(), all.end()};
}

bool CheckContext::has_predictions(Split split) const {
    if (dataset(split) == nullptr) return false;
    const auto& file = split == Split::Train ? predictions_train : predictions_test;
    return file.has_value() || adapter != nullptr;
}

const Predictions& CheckContext::predictions(Split split) const {
    const Dataset* data = dataset(split);
    if (data == nullptr) {
        throw SkipCheck("requires " + std::string(to_string(split)) + " dataset");
    }
    const auto& file = split == Split::Train ? predictions_train : predictions_test;
    const std::string what = std::string(to_string(split)) + " predictions";
    if (file) {
        if (data->has_label() && file->task != data->task()) {
            throw ContractError(what + " are " + std::string(to_string(file->task)) + " but the dataset task is " +
                                std::string(to_string(data->task())));
        }
        check_aligned(*file, data->n_rows(), what);
        return *file;
    }
    if (!adapter) {
        throw SkipCheck("requires model predictions (prediction file or predict command)");
    }
    std::lock_guard lock(cache_->mutex);
    auto it = cache_->entries.find(split);
    if (it == cache_->entries.end()) {
        try {
            auto preds = adapter->predict(*data, task(), classes());
            check_aligned(preds, data->n_rows(), what);
            it = cache_->entries.emplace(split, std::move(preds)).first;
        } catch (...) {
            it = cache_->entries.emplace(split, std::current_exception()).first;
        }
    }
    if (const auto* err = std::get_if<std::exception_ptr>(&it->second)) {
        std::rethrow_exception(*err);
    }
    return std::get<Predictions>(it->second);
}

std::optional<Split> CheckContext::evaluation_split() const {
    if (has_predictions(Split::Test)) return Split::Test;
    if (has_predictions(Split::Train)) return Split::Train;
    return std::nullopt;
}

void validate_param(const std::string& check_id, const ParamSpec& spec, const Json& value) {
    const std::string where = "checks." + check_id + "." + spec.name;
    auto fail = [&](const std::string& why) { throw ConfigError(where + ": " + why); };
    switch (spec.kind) {
        case ParamKind::Fraction:
            if (!value.is_number() || value.get<double>() < 0.0 || value.get<double>() > 1.0) {
                fail("expected a fraction in [0, 1]");
            }
            break;
        case ParamKind::Count:
            if (!value.is_number_integer() || value.get<long long>() < 1) {
                fail("expected an integer >= 1");
            }
            break;
        case ParamKind::Real:
            if (!value.is_number()) fail("expected a number");
            break;
        case ParamKind::OptionalReal:
            if (!value.is_null() && !value.is_number()) fail("expected a number or null");
            break;
        case ParamKind::Flag:
            if (!value.is_boolean()) fail("expected true or false");
            break;
        case ParamKind::Choice:
            if (!value.is_string() || std::find(spec.choices.begin(), spec.choices.end(),
                                                value.get<std::string>()) == spec.choices.end()) {
                std::string opts;
                for (const auto& c : spec.choices) opts += (opts.empty() ? "" : "|") + c;
                fail("expected one of " + opts);
            }
            break;
    }
}

std::optional<std::string> unmet_requirement(const Requirements& req, const CheckContext& ctx) {
    if (!ctx.train && !ctx.test) return "requires a dataset";
    if (req.test && !ctx.test) return "requires test dataset";
    if (req.label) {
        const Dataset* d = ctx.train ? ctx.train.get() : ctx.test.get();
        if (!d->has_label()) return "requires labeled dataset";
    }
    if (req.test_label && (!ctx.test || !ctx.test->has_label())) {
        return "requires labeled test dataset";
    }
    if (req.task && ctx.task() != *req.task) {
        return "requires " + std::string(to_string(*req.task)) + " task";
    }
    if (req.adapter && !ctx.adapter) return "requires predict command";
    if (req.predictions && !ctx.evaluation_split()) {
        return "requires model predictions (prediction file or predict command)";
    }
    if (req.train_predictions && !ctx.has_predictions(Split::Train)) {
        return "requires train predictions";
    }
    if (req.test_predictions && !ctx.has_predictions(Split::Test)) {
        return "requires test predictions";
    }
    return std::nullopt;
}

const ParamSpec* CheckDefinition::find_param(std::string_view name) const {
    for (const auto& p : params) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

const ConditionSpec* CheckDefinition::find_condition(std::string_view cid) const {
    for (const auto& c : conditions) {
        if (c.id == cid) return &c;
    }
    return nullptr;
}

CheckResult run_check(const CheckDefinition& check, const CheckContext& ctx, const Json& params) {
    CheckResult result;
    result.check_id = check.id;
    result.category = check.category;
    if (auto why = unmet_requirement(check.requirements, ctx)) {
        result.status = CheckStatus::Skipped;
        result.message = *why;
        return result;
    }
    try {
        CheckOutput out = check.run(ctx, params);
        result.status = CheckStatus::Ran;
        result.value = std::move(out.value);
        result.displays = std::move(out.displays);
        result.message = std::move(out.note);
    } catch (const SkipCheck& e) {
        result = CheckResult{check.id, check.category, CheckStatus::Skipped, Json(), {}, e.what()};
    } catch (const AdapterError& e) {
        std::string msg = e.what();
        if (!e.stderr_text().empty() && msg.find(e.stderr_text()) == std::string::npos) {
            msg += "\nstderr: " + e.stderr_text();
        }
        result = CheckResult{check.id, check.category, CheckStatus::Errored, Json(), {}, msg};
    } catch (const std::exception& e) {
        result = CheckResult{check.id, check.category, CheckStatus::Errored, Json(), {}, e.what()};
    } catch (...) {
        result = CheckResult{check.id, check.category, CheckStatus::Errored, Json(), {},
                             "unknown error"};
    }
    return result;
}

std::vector<ConditionResult> evaluate_conditions(const CheckResult& result,
                                                 const std::vector<Condition>& conditions) {
    std::vector<ConditionResult> out;
    out.reserve(conditions.size());
    for (const auto& c : conditions) {
        if (result.status != CheckStatus::Ran) {
            out.push_back({c.name, ConditionStatus::Warning,
                           "check " + std::string(to_string(result.status)) + ": " + result.message});
            continue;
        }
        try {
            auto o = c.predicate(result.value);
            out.push_back({c.name, o.status, std::move(o.detail)});
        } catch (const std::exception& e) {
            out.push_back({c.name, ConditionStatus::Warning,
                           std::string("condition could not be evaluated: ") + e.what()});
        }
    }
    return out;
}

Summary summarize(const std::vector<SuiteEntryResult>& entries) {
    Summary s;
    for (const auto& e : entries) {
        switch (e.check.status) {
            case CheckStatus::Skipped:
                ++s.skipped;
                continue;
            case CheckStatus::Errored:
                ++s.errored;
                continue;
            case CheckStatus::Ran:
                break;
        }
        const bool any_fail = std::any_of(e.conditions.begin(), e.conditions.end(), [](const auto& c) {
            return c.status == ConditionStatus::Fail;
        });
        const bool any_warn = std::any_of(e.conditions.begin(), e.conditions.end(), [](const auto& c) {
            return c.status == ConditionStatus::Warning;
        });
        if (any_fail) {
            ++s.failed;
        } else if (any_warn) {
            ++s.warned;
        } else {
            ++s.passed;
        }
    }
    return s;
}

Json resolve_params(const CheckDefinition& check, const Json& entry_params, const Json& config) {
    Json out = Json::object();
    for (const auto& p : check.params) out[p.name] = p.default_value;
    auto apply = [&](const std::string& name, const Json& value) {
        const ParamSpec* spec = check.find_param(name);
        if (spec == nullptr) {
            throw ConfigError("unknown parameter '" + name + "' for check '" + check.id + "'");
        }
        validate_param(check.id, *spec, value);
        out[name] = value;
    };
    if (entry_params.is_object()) {
        for (const auto& [k, v] : entry_params.items()) apply(k, v);
    }
    const std::string prefix = "checks." + check.id + ".";
    if (config.is_object()) {
        for (const auto& [k, v] : config.items()) {
            if (k.starts_with(prefix)) apply(k.substr(prefix.size()), v);
        }
    }
    return out;
}

std::vector<Condition> resolve_conditions(const CheckDefinition& check, const Json& params,
                                          const std::optional<std::vector<std::string>>& ids) {
    const auto& chosen = ids ? *ids : check.default_conditions;
    std::vector<Condition> out;
    for (const auto& id : chosen) {
        const ConditionSpec* spec = check.find_condition(id);
        if (spec == nullptr) {
            throw ConfigError("unknown condition '" + id + "' for check '" + check.id + "'");
        }
        Condition c = spec->make(params);
        // Conditions that only apply when a parameter is set produce an
        // empty name and are dropped.
        if (!c.name.empty()) out.push_back(std::move(c));
    }
    return out;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace {

Json dataset_metadata(const Dataset& d) {
    Json j = Json::object();
    j["source"] = d.metadata().source;
    j["sha256"] = d.metadata().digest;
    j["rows"] = d.n_rows();
    j["source_rows"] = d.metadata().source_rows;
    j["sampled"] = d.metadata().sampled;
    j["sample_seed"] = d.metadata().sample_seed;
    j["task"] = std::string(to_string(d.task()));
    j["label"] = d.label_name() ? Json(*d.label_name()) : Json(nullptr);
    j["warnings"] = d.metadata().warnings;
    return j;
}

}  // namespace

SuiteResult run_suite(const Suite& suite, const CheckContext& ctx, const RunOptions& options) {
    SuiteResult result;
    result.suite_name = suite.name;
    result.metadata.started_at = utc_timestamp();
    result.metadata.seed = ctx.seed;
    if (ctx.train) result.metadata.datasets["train"] = dataset_metadata(*ctx.train);
    if (ctx.test) result.metadata.datasets["test"] = dataset_metadata(*ctx.test);
    for (const Dataset* d : {ctx.train.get(), ctx.test.get()}) {
        if (d != nullptr && d->metadata().sampled) {
            result.metadata.notes.push_back(d->metadata().source + ": sampled " +
                                            std::to_string(d->n_rows()) + " of " +
                                            std::to_string(d->metadata().source_rows) +
                                            " rows with seed " +
                                            std::to_string(d->metadata().sample_seed));
        }
    }

    // Parameter and condition errors are configuration mistakes; surface them
    // before anything runs.
    std::vector<Json> params;
    std::vector<std::vector<Condition>> conditions;
    for (const auto& e : suite.entries) {
        params.push_back(resolve_params(*e.check, e.params, options.config));
        conditions.push_back(resolve_conditions(*e.check, params.back(), e.conditions));
    }

    auto run_one = [&](std::size_t i) {
        SuiteEntryResult r;
        r.check = run_check(*suite.entries[i].check, ctx, params[i]);
        r.conditions = evaluate_conditions(r.check, conditions[i]);
        return r;
    };
    if (options.parallel && suite.entries.size() > 1) {
        std::vector<std::future<SuiteEntryResult>> futures;
        for (std::size_t i = 0; i < suite.entries.size(); ++i) {
            futures.push_back(std::async(std::launch::async, run_one, i));
        }
        for (auto& f : futures) result.entries.push_back(f.get());
    } else {
        for (std::size_t i = 0; i < suite.entries.size(); ++i) result.entries.push_back(run_one(i));
    }
    result.summary = summarize(result.entries);
    result.metadata.finished_at = utc_timestamp();
    return result;
}

int exit_code(const SuiteResult& result, bool strict) {
    const Summary s = summarize(result.entries);
    if (s.errored > 0) return 2;
    if (s.failed > 0) return 1;
    if (strict) {
        for (const auto& e : result.entries) {
            for (const auto& c : e.conditions) {
                if (c.status == ConditionStatus::Warning) return 1;
            }
        }
    }
    return 0;
}

}  // namespace tabcheck
