#pragma once

// Helpers shared by the check implementations. Not installed.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "tabcheck/catalog.hpp"
#include "tabcheck/error.hpp"
#include "tabcheck/framework.hpp"

namespace tabcheck::checks {

std::vector<CheckPtr> integrity_checks();
std::vector<CheckPtr> overview_checks();
std::vector<CheckPtr> distribution_checks();
std::vector<CheckPtr> methodology_checks();
std::vector<CheckPtr> evaluation_checks();

/// "6.54%" style: two decimals, trailing zeros dropped.
inline std::string percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
    std::string s = buf;
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    return s + "%";
}

/// Compact number for condition details (up to 4 significant digits).
inline std::string brief(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

inline ParamSpec dataset_param() {
    return {"dataset", ParamKind::Choice, "train", "which dataset to inspect", {"train", "test"}};
}

/// The dataset named by the "dataset" parameter; skips when absent.
inline const Dataset& selected_dataset(const CheckContext& ctx, const Json& params) {
    const Split split = params.value("dataset", std::string("train")) == "test" ? Split::Test : Split::Train;
    const Dataset* d = ctx.dataset(split);
    if (d == nullptr) {
        throw SkipCheck("requires " + std::string(to_string(split)) + " dataset");
    }
    return *d;
}

/// Features present in both datasets, in the reference dataset's order.
inline std::vector<std::string> shared_features(const Dataset& reference, const Dataset& current) {
    std::vector<std::string> out;
    for (const auto& f : reference.feature_names()) {
        const auto& cf = current.feature_names();
        if (std::find(cf.begin(), cf.end(), f) != cf.end()) out.push_back(f);
    }
    return out;
}

inline ConditionOutcome pass(std::string detail) { return {ConditionStatus::Pass, std::move(detail)}; }
inline ConditionOutcome fail(std::string detail) { return {ConditionStatus::Fail, std::move(detail)}; }
inline ConditionOutcome warn(std::string detail) { return {ConditionStatus::Warning, std::move(detail)}; }

/// Joins up to `limit` items with ", " and notes how many were left out.
inline std::string join_limited(const std::vector<std::string>& items, std::size_t limit = 5) {
    std::string out;
    for (std::size_t i = 0; i < items.size() && i < limit; ++i) {
        if (i > 0) out += ", ";
        out += items[i];
    }
    if (items.size() > limit) out += " (+" + std::to_string(items.size() - limit) + " more)";
    return out;
}

/// Cell text for display tables.
inline Json cell_json(const Cell& c) {
    if (c.is_missing()) return nullptr;
    return c.text();
}

}  // namespace tabcheck::checks
