#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "tabcheck/adapter.hpp"
#include "tabcheck/dataset.hpp"
#include "tabcheck/predictions.hpp"

namespace tabcheck {

using Json = nlohmann::ordered_json;

enum class Category { Distribution, Integrity, Methodology, Evaluation, Overview };
enum class CheckStatus { Ran, Skipped, Errored };
enum class ConditionStatus { Pass, Fail, Warning };
enum class DisplayKind { Table, BarSeries, LineSeries, HistogramPair, Text };
enum class Split { Train, Test };

std::string_view to_string(Category c);
std::string_view to_string(CheckStatus s);
std::string_view to_string(ConditionStatus s);
std::string_view to_string(DisplayKind k);
std::string_view to_string(Split s);

/// Visual payload of a check. Every series within one item has the same
/// length; the factories below enforce it.
struct DisplayItem {
    DisplayKind kind = DisplayKind::Text;
    std::string title;
    Json payload;

    static DisplayItem table(std::string title, std::vector<std::string> columns,
                             std::vector<std::vector<Json>> rows);
    static DisplayItem bars(std::string title, std::vector<std::string> labels,
                            std::vector<std::pair<std::string, std::vector<double>>> series);
    static DisplayItem lines(std::string title, std::vector<double> x,
                             std::vector<std::pair<std::string, std::vector<double>>> series,
                             std::string x_label, std::string y_label);
    /// Reference vs current distribution of one feature over shared bins.
    static DisplayItem histogram_pair(std::string title, std::vector<std::string> bins,
                                      std::vector<double> reference, std::vector<double> current,
                                      double score, std::string method);
    static DisplayItem text(std::string title, std::string body);
};

struct CheckResult {
    std::string check_id;
    Category category = Category::Overview;
    CheckStatus status = CheckStatus::Ran;
    /// Present when Ran.
    Json value;
    std::vector<DisplayItem> displays;
    /// Required when Skipped/Errored; optional note when Ran.
    std::string message;
};

struct ConditionOutcome {
    ConditionStatus status = ConditionStatus::Pass;
    std::string detail;
};

/// Named pure predicate over a Ran check's value.
struct Condition {
    std::string name;
    std::function<ConditionOutcome(const Json& value)> predicate;
};

struct ConditionResult {
    std::string name;
    ConditionStatus status = ConditionStatus::Pass;
    std::string detail;

    bool operator==(const ConditionResult&) const = default;
};

/// Read-only inputs shared by every check in a run. Predictions come from
/// files when given, otherwise from the adapter (computed once per split).
class CheckContext {
public:
    std::shared_ptr<const Dataset> train;
    std::shared_ptr<const Dataset> test;
    std::optional<Predictions> predictions_train;
    std::optional<Predictions> predictions_test;
    std::shared_ptr<Predictor> adapter;
    std::uint64_t seed = 42;

    CheckContext();

    const Dataset* dataset(Split split) const;
    /// Task of the training set (or test set when train is absent).
    Task task() const;
    /// Sorted union of the label classes of both datasets.
    std::vector<std::string> classes() const;

    bool has_predictions(Split split) const;
    /// File predictions, else adapter predictions (cached). Throws
    /// ContractError when misaligned with the dataset, AdapterError on
    /// adapter failure, SkipCheck when no source exists.
    const Predictions& predictions(Split split) const;
    /// Test when it has a dataset and a prediction source, else Train when
    /// it does; nullopt otherwise.
    std::optional<Split> evaluation_split() const;

private:
    struct Cache {
        std::mutex mutex;
        std::map<Split, std::variant<Predictions, std::exception_ptr>> entries;
    };
    std::shared_ptr<Cache> cache_;
};

enum class ParamKind { Fraction, Count, Real, OptionalReal, Flag, Choice };

struct ParamSpec {
    std::string name;
    ParamKind kind = ParamKind::Real;
    Json default_value;
    std::string description;
    std::vector<std::string> choices;
};

/// Throws ConfigError when the value does not fit the parameter's kind.
void validate_param(const std::string& check_id, const ParamSpec& spec, const Json& value);

struct Requirements {
    bool test = false;
    bool label = false;
    bool test_label = false;
    /// Predictions for the evaluation split.
    bool predictions = false;
    bool train_predictions = false;
    bool test_predictions = false;
    bool adapter = false;
    std::optional<Task> task;
};

/// Reason a context fails the requirements, if any.
std::optional<std::string> unmet_requirement(const Requirements& req, const CheckContext& ctx);

struct CheckOutput {
    Json value;
    std::vector<DisplayItem> displays;
    std::string note;
};

struct ConditionSpec {
    std::string id;
    std::function<Condition(const Json& params)> make;
};

struct CheckDefinition {
    std::string id;
    Category category = Category::Overview;
    std::string description;
    std::vector<ParamSpec> params;
    Requirements requirements;
    std::function<CheckOutput(const CheckContext&, const Json& params)> run;
    std::vector<ConditionSpec> conditions;
    std::vector<std::string> default_conditions;

    const ParamSpec* find_param(std::string_view name) const;
    const ConditionSpec* find_condition(std::string_view id) const;
};

using CheckPtr = std::shared_ptr<const CheckDefinition>;

/// Runs one check. Unmet requirements and SkipCheck give Skipped; any other
/// exception gives Errored. Nothing propagates.
CheckResult run_check(const CheckDefinition& check, const CheckContext& ctx, const Json& params);

/// One result per condition. Skipped/Errored checks turn every condition
/// into a Warning carrying the check's message.
std::vector<ConditionResult> evaluate_conditions(const CheckResult& result,
                                                 const std::vector<Condition>& conditions);

struct SuiteEntry {
    CheckPtr check;
    /// Parameter overrides on top of the check defaults.
    Json params = Json::object();
    /// Condition ids; nullopt means the check's defaults.
    std::optional<std::vector<std::string>> conditions;
};

struct Suite {
    std::string name;
    std::vector<SuiteEntry> entries;
};

struct Summary {
    std::size_t passed = 0;
    std::size_t failed = 0;
    std::size_t warned = 0;
    std::size_t skipped = 0;
    std::size_t errored = 0;

    bool operator==(const Summary&) const = default;
};

struct SuiteEntryResult {
    CheckResult check;
    std::vector<ConditionResult> conditions;
};

struct RunMetadata {
    std::string started_at;
    std::string finished_at;
    std::uint64_t seed = 42;
    Json datasets = Json::object();
    std::vector<std::string> notes;
};

struct SuiteResult {
    std::string suite_name;
    std::vector<SuiteEntryResult> entries;
    Summary summary;
    RunMetadata metadata;
};

/// A check counts as skipped/errored by status; a Ran check is failed if
/// any condition Fails, warned if none Fails and one Warns, else passed.
Summary summarize(const std::vector<SuiteEntryResult>& entries);

/// Defaults, then suite-entry overrides, then flat "checks.<id>.<param>"
/// keys from `config`. Throws ConfigError on unknown or invalid params.
Json resolve_params(const CheckDefinition& check, const Json& entry_params, const Json& config);

std::vector<Condition> resolve_conditions(const CheckDefinition& check, const Json& params,
                                          const std::optional<std::vector<std::string>>& ids);

struct RunOptions {
    bool parallel = true;
    /// Flat dotted parameter overrides.
    Json config = Json::object();
};

/// Runs every entry (possibly concurrently), returning results in suite
/// order.
SuiteResult run_suite(const Suite& suite, const CheckContext& ctx, const RunOptions& options = {});

/// 3 is reserved for usage/IO errors raised before a suite runs. Otherwise
/// 2 if any check Errored, 1 if any check failed (or, with strict, any
/// condition warned), else 0.
int exit_code(const SuiteResult& result, bool strict);

std::string utc_timestamp();

}  // namespace tabcheck
