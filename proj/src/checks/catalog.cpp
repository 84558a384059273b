#include "tabcheck/catalog.hpp"

#include "common.hpp"

namespace tabcheck {

const std::vector<CheckPtr>& check_catalog() {
    static const std::vector<CheckPtr> all = [] {
        std::vector<CheckPtr> out;
        for (auto group : {checks::integrity_checks, checks::overview_checks, checks::distribution_checks,
                           checks::methodology_checks, checks::evaluation_checks}) {
            for (auto& c : group()) out.push_back(std::move(c));
        }
        return out;
    }();
    return all;
}

CheckPtr find_check(std::string_view id) {
    for (const auto& c : check_catalog()) {
        if (c->id == id) return c;
    }
    throw ConfigError("unknown check '" + std::string(id) + "'");
}

namespace {

Suite make_suite(std::string name, std::initializer_list<const char*> ids) {
    Suite s{std::move(name), {}};
    for (const char* id : ids) {
        SuiteEntry e;
        e.check = find_check(id);
        s.entries.push_back(std::move(e));
    }
    return s;
}

}  // namespace

std::vector<Suite> builtin_suites() {
    return {
        make_suite("data_integrity", {"duplicates", "single_value", "mixed_types", "outliers", "conflicting_labels",
                                      "dataset_summary", "feature_label_correlation"}),
        make_suite("train_test_validation", {"schema_comparison", "feature_drift", "label_drift", "train_test_leakage",
                                             "pps_difference", "trust_score_comparison"}),
        make_suite("model_evaluation", {"performance_report", "simple_model_comparison", "calibration",
                                        "error_distribution", "weak_segments", "unused_features"}),
    };
}

Suite find_builtin_suite(std::string_view name) {
    for (auto& s : builtin_suites()) {
        if (s.name == name) return s;
    }
    throw ConfigError("unknown suite '" + std::string(name) + "'");
}

Suite single_check_suite(std::string_view id) {
    SuiteEntry e;
    e.check = find_check(id);
    return Suite{std::string(id), {std::move(e)}};
}

}  // namespace tabcheck
