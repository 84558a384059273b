#include "tabcheck/cli.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "tabcheck/adapter.hpp"
#include "tabcheck/catalog.hpp"
#include "tabcheck/config.hpp"
#include "tabcheck/digest.hpp"
#include "tabcheck/error.hpp"
#include "tabcheck/report.hpp"
#include "tabcheck/version.hpp"

namespace tabcheck {

namespace {

constexpr int kExitUsage = 3;

struct DataFlags {
    std::string train;
    std::string test;
    std::string label;
    std::vector<std::string> features;
    std::string task;
    std::string predictions_train;
    std::string predictions_test;
    std::string predict_cmd;
    std::string config;
    std::string output_html;
    std::string output_json;
    std::uint64_t seed = 42;
    bool strict = false;
    std::size_t max_rows = 100000;
};

void add_data_flags(CLI::App* cmd, DataFlags& f) {
    cmd->add_option("--train", f.train, "training (or only) dataset CSV")->required();
    cmd->add_option("--test", f.test, "test dataset CSV");
    cmd->add_option("--label", f.label, "label column");
    cmd->add_option("--features", f.features, "comma-separated feature columns")->delimiter(',');
    cmd->add_option("--task", f.task, "classification or regression");
    cmd->add_option("--predictions-train", f.predictions_train, "prediction CSV for the training set");
    cmd->add_option("--predictions-test", f.predictions_test, "prediction CSV for the test set");
    cmd->add_option("--predict-cmd", f.predict_cmd, "external predict command");
    cmd->add_option("--config", f.config, "JSON config file");
    cmd->add_option("--output-html", f.output_html, "write the HTML report here");
    cmd->add_option("--output-json", f.output_json, "write the JSON report here");
    cmd->add_option("--seed", f.seed, "random seed");
    cmd->add_flag("--strict", f.strict, "treat condition warnings as failures");
    cmd->add_option("--max-rows", f.max_rows, "sample datasets larger than this many rows")->check(CLI::PositiveNumber);
}

Dataset load_split(const std::string& path, const SchemaOptions& base, const Dataset* train) {
    const std::string text = read_file(path);
    CsvTable table;
    try {
        table = parse_csv(text);
    } catch (const LoadError& e) {
        throw LoadError(path + ": " + e.what());
    }
    SchemaOptions opts = base;
    if (train != nullptr) {
        auto has = [&](const std::string& name) {
            return std::find(table.header.begin(), table.header.end(), name) != table.header.end();
        };
        if (opts.label && !has(*opts.label)) {
            opts.label.reset();
            opts.task.reset();
        } else if (opts.label) {
            opts.task = train->task();
        }
        if (opts.features) {
            std::vector<std::string> present;
            for (const auto& f : *opts.features) {
                if (has(f)) present.push_back(f);
            }
            opts.features = present;
        }
        std::vector<std::string> overrides;
        for (const auto& name : opts.categorical_overrides) {
            if (has(name)) overrides.push_back(name);
        }
        opts.categorical_overrides = overrides;
        for (const auto& name : train->column_names()) {
            if (has(name)) opts.type_hints[name] = train->column(name).type();
        }
    }
    return Dataset::from_table(table, opts, path, csv_digest(text));
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw LoadError("cannot write '" + path + "'");
    f << content;
    if (!f.flush()) throw LoadError("cannot write '" + path + "'");
}

void print_summary(const SuiteResult& r, std::ostream& out) {
    for (const auto& e : r.entries) {
        std::string status(to_string(e.check.status));
        if (e.check.status == CheckStatus::Ran) {
            status = "pass";
            for (const auto& c : e.conditions) {
                if (c.status == ConditionStatus::Fail) status = "fail";
                else if (c.status == ConditionStatus::Warning && status == "pass") status = "warning";
            }
        }
        out << status << "\t" << e.check.check_id;
        if (e.check.status != CheckStatus::Ran) {
            const auto& msg = e.check.message;
            out << "\t" << msg.substr(0, msg.find('\n'));
        } else {
            for (const auto& c : e.conditions) {
                if (c.status != ConditionStatus::Pass) {
                    out << "\t" << c.detail;
                    break;
                }
            }
        }
        out << "\n";
    }
    const auto& s = r.summary;
    out << "suite " << r.suite_name << ": " << s.passed << " passed, " << s.failed << " failed, " << s.warned
        << " warned, " << s.skipped << " skipped, " << s.errored << " errored\n";
}

int run_with(const DataFlags& f, std::optional<Suite> suite, const std::string& suite_arg, std::ostream& out,
             std::ostream& err) {
    RunConfig config;
    if (!f.config.empty()) config = load_config(f.config);
    if (!suite) {
        if (!suite_arg.empty()) {
            suite = resolve_suite(suite_arg);
        } else if (config.suite) {
            suite = config.suite;
        } else {
            throw ConfigError("no suite given (use --suite or a config \"suite\" entry)");
        }
    }

    SchemaOptions opts;
    if (!f.label.empty()) opts.label = f.label;
    if (!f.features.empty()) opts.features = f.features;
    if (!f.task.empty()) opts.task = parse_task(f.task);
    opts.max_rows = f.max_rows;
    opts.sample_seed = f.seed;

    CheckContext ctx;
    ctx.seed = f.seed;
    ctx.train = std::make_shared<const Dataset>(load_split(f.train, opts, nullptr));
    if (!f.test.empty()) ctx.test = std::make_shared<const Dataset>(load_split(f.test, opts, ctx.train.get()));
    const Task task = ctx.task();
    const auto classes = ctx.classes();
    if ((!f.predictions_train.empty() || !f.predictions_test.empty()) && task == Task::Unlabeled) {
        throw ConfigError("prediction files need a labeled dataset (--label) to know the task");
    }
    if (!f.predictions_train.empty()) ctx.predictions_train = load_predictions_csv(f.predictions_train, task, classes);
    if (!f.predictions_test.empty()) ctx.predictions_test = load_predictions_csv(f.predictions_test, task, classes);
    if (!f.predict_cmd.empty()) {
        AdapterConfig ac;
        ac.command = f.predict_cmd;
        ctx.adapter = std::make_shared<PredictAdapter>(ac);
    }

    RunOptions ro;
    ro.config = config.params;
    const SuiteResult result = run_suite(*suite, ctx, ro);
    if (!f.output_json.empty()) write_file(f.output_json, render_json(result));
    if (!f.output_html.empty()) write_file(f.output_html, render_html(result));
    print_summary(result, out);
    for (const auto& e : result.entries) {
        if (e.check.status == CheckStatus::Errored) err << "error in " << e.check.check_id << ": " << e.check.message << "\n";
    }
    return exit_code(result, f.strict);
}

std::string kind_name(ParamKind k) {
    switch (k) {
        case ParamKind::Fraction: return "fraction";
        case ParamKind::Count: return "count";
        case ParamKind::Real: return "real";
        case ParamKind::OptionalReal: return "real|null";
        case ParamKind::Flag: return "flag";
        case ParamKind::Choice: return "choice";
    }
    return "value";
}

void list_checks(std::ostream& out) {
    for (const auto& c : check_catalog()) {
        out << c->id << "  [" << to_string(c->category) << "]  " << c->description << "\n";
        for (const auto& p : c->params) {
            out << "    checks." << c->id << "." << p.name << " = " << p.default_value.dump() << "  (" << kind_name(p.kind);
            if (!p.choices.empty()) {
                out << ":";
                for (const auto& ch : p.choices) out << " " << ch;
            }
            out << ") " << p.description << "\n";
        }
        if (!c->conditions.empty()) {
            out << "    conditions:";
            for (const auto& cond : c->conditions) out << " " << cond.id;
            out << "\n";
        }
    }
    out << "suites:";
    for (const auto& s : builtin_suites()) out << " " << s.name;
    out << "\n";
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Validation checks for tabular datasets and models", kEngineName};
    app.set_version_flag("--version", std::string(kEngineName) + " " + kEngineVersion);
    app.require_subcommand(1);

    DataFlags run_flags;
    std::string suite_arg;
    auto* run = app.add_subcommand("run", "run a suite of checks");
    run->add_option("--suite", suite_arg, "built-in suite name or suite JSON file");
    add_data_flags(run, run_flags);

    DataFlags check_flags;
    std::string check_id;
    auto* check = app.add_subcommand("check", "run a single check");
    check->add_option("check_id", check_id, "check to run")->required();
    add_data_flags(check, check_flags);

    app.add_subcommand("list-checks", "list built-in checks and suites");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : kExitUsage;
    }

    try {
        if (app.got_subcommand("list-checks")) {
            list_checks(out);
            return 0;
        }
        if (run->parsed()) return run_with(run_flags, std::nullopt, suite_arg, out, err);
        return run_with(check_flags, single_check_suite(check_id), {}, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace tabcheck
