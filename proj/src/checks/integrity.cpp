#include <algorithm>
#include <map>
#include <unordered_map>

#include "common.hpp"
#include "tabcheck/stats.hpp"

namespace tabcheck::checks {

namespace {

/// Rows grouped by identical feature values, in first-occurrence order.
std::vector<std::vector<std::size_t>> feature_groups(const Dataset& d) {
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::vector<std::size_t>> groups;
    const auto& names = d.feature_names();
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
        auto [it, inserted] = index.try_emplace(d.row_key(i, names), groups.size());
        if (inserted) groups.emplace_back();
        groups[it->second].push_back(i);
    }
    return groups;
}

std::vector<Json> feature_cells(const Dataset& d, std::size_t row) {
    std::vector<Json> out;
    for (const auto& f : d.feature_names()) out.push_back(cell_json(d.column(f).cell(row)));
    return out;
}

CheckPtr single_value() {
    auto c = std::make_shared<CheckDefinition>();
    c->id = "single_value";
    c->category = Category::Integrity;
    c->description = "Columns whose non-missing values are all identical";
    c->params = {dataset_param()};
    c->run = [](const CheckContext& ctx, const Json& params) {
        const Dataset& d = selected_dataset(ctx, params);
        std::vector<std::string> constant;
        std::vector<std::string> all_missing;
        for (std::size_t j = 0; j < d.n_columns(); ++j) {
            const auto& col = d.column_at(j);
            if (col.n_missing() == col.size()) {
                all_missing.push_back(col.name());
            } else if (col.distinct_count() == 1) {
                constant.push_back(col.name());
            }
        }
        CheckOutput out;
        out.value = Json{{"columns", constant}, {"all_missing", all_missing}};
        if (!all_missing.empty()) {
            out.note = "all-missing columns excluded: " + join_limited(all_missing, 20);
        }
        std::vector<std::vector<Json>> rows;
        for (const auto& name : constant) {
            const auto& col = d.column(name);
            for (std::size_t i = 0; i < col.size(); ++i) {
                if (!col.is_missing(i)) {
                    rows.push_back({name, col.category(i)});
                    break;
                }
            }
        }
        out.displays.push_back(DisplayItem::table("Single-value columns", {"column", "value"}, rows));
        return out;
    };
    c->conditions = {{"no_single_value_columns", [](const Json&) {
                          return Condition{"No single-value columns", [](const Json& v) {
                                               const auto cols = v.at("columns").get<std::vector<std::string>>();
                                               if (cols.empty()) return pass("no single-value columns");
                                               return fail("single-value columns: " + join_limited(cols));
                                           }};
                      }}};
    c->default_conditions = {"no_single_value_columns"};
    return c;
}

CheckPtr duplicates() {
    auto c = std::make_shared<CheckDefinition>();
    c->id = "duplicates";
    c->category = Category::Integrity;
    c->description = "Fraction of rows whose feature values repeat an earlier row";
    c->params = {dataset_param(),
                 {"max_fraction", ParamKind::Fraction, 0.05, "largest acceptable duplicate fraction", {}},
                 {"max_groups_shown", ParamKind::Count, 10, "duplicate groups listed in the display", {}}};
    c->run = [](const CheckContext& ctx, const Json& params) {
        const Dataset& d = selected_dataset(ctx, params);
        auto groups = feature_groups(d);
        const std::size_t n = d.n_rows();
        const std::size_t extra = n - groups.size();
        CheckOutput out;
        out.value = Json{{"fraction", n == 0 ? 0.0 : static_cast<double>(extra) / static_cast<double>(n)},
                         {"duplicate_rows", extra},
                         {"n_rows", n}};
        std::stable_sort(groups.begin(), groups.end(),
                         [](const auto& a, const auto& b) { return a.size() > b.size(); });
        std::vector<std::string> columns{"count", "first_row"};
        for (const auto& f : d.feature_names()) columns.push_back(f);
        std::vector<std::vector<Json>> rows;
        const auto limit = params.at("max_groups_shown").get<std::size_t>();
        for (const auto& g : groups) {
            if (g.size() < 2 || rows.size() >= limit) break;
            std::vector<Json> row{g.size(), g.front()};
            for (auto& cell : feature_cells(d, g.front())) row.push_back(std::move(cell));
            rows.push_back(std::move(row));
        }
        out.displays.push_back(DisplayItem::table("Most frequent duplicate rows", columns, rows));
        return out;
    };
    c->conditions = {{"max_duplicate_fraction", [](const Json& params) {
                          const double limit = params.at("max_fraction").get<double>();
                          return Condition{"Duplicate fraction is at most " + percent(limit),
                                           [limit](const Json& v) {
                                               const double f = v.at("fraction").get<double>();
                                               std::string detail = "found " + percent(f) + " duplicate samples";
                                               if (f > 0) {
                                                   detail += " (" + std::to_string(v.at("duplicate_rows").get<std::size_t>()) +
                                                             " of " + std::to_string(v.at("n_rows").get<std::size_t>()) + " rows)";
                                               }
                                               return f > limit ? fail(detail) : pass(detail);
                                           }};
                      }}};
    c->default_conditions = {"max_duplicate_fraction"};
    return c;
}

CheckPtr mixed_types() {
    auto c = std::make_shared<CheckDefinition>();
    c->id = "mixed_types";
    c->category = Category::Integrity;
    c->description = "Columns mixing numbers and strings, with the rarer type's share";
    c->params = {dataset_param(),
                 {"rare_fraction", ParamKind::Fraction, 0.05, "minority share at or below which the column fails", {}},
                 {"warn_fraction", ParamKind::Fraction, 0.2, "minority share at or below which the column warns", {}}};
    c->run = [](const CheckContext& ctx, const Json& params) {
        const Dataset& d = selected_dataset(ctx, params);
        Json cols = Json::object();
        std::vector<std::vector<Json>> rows;
        for (std::size_t j = 0; j < d.n_columns(); ++j) {
            const auto& col = d.column_at(j);
            if (col.type() != ColumnType::Mixed) continue;
            std::size_t numbers = 0;
            std::size_t texts = 0;
            for (const auto& cell : col.cells()) {
                if (cell.is_number()) ++numbers;
                else if (!cell.is_missing()) ++texts;
            }
            const double total = static_cast<double>(numbers + texts);
            const bool text_minor = texts <= numbers;
            const double frac = static_cast<double>(text_minor ? texts : numbers) / total;
            cols[col.name()] = Json{{"minority_fraction", frac},
                                    {"minority_kind", text_minor ? "text" : "number"},
                                    {"n_numbers", numbers},
                                    {"n_text", texts}};
            rows.push_back({col.name(), text_minor ? "text" : "number", frac, numbers, texts});
        }
        CheckOutput out;
        out.value = Json{{"columns", cols}};
        out.displays.push_back(DisplayItem::table(
            "Mixed-type columns", {"column", "minority_kind", "minority_fraction", "numbers", "strings"}, rows));
        return out;
    };
    c->conditions = {{"rare_type_minority", [](const Json& params) {
                          const double rare = params.at("rare_fraction").get<double>();
                          const double warn_at = params.at("warn_fraction").get<double>();
                          return Condition{
                              "No rare type minority (at most " + percent(rare) + ") in any column",
                              [rare, warn_at](const Json& v) {
                                  std::vector<std::string> failing;
                                  std::vector<std::string> warning;
                                  std::vector<std::string> info;
                                  for (const auto& [name, rec] : v.at("columns").items()) {
                                      const double f = rec.at("minority_fraction").get<double>();
                                      const std::string what =
                                          name + " (" + percent(f) + " " + rec.at("minority_kind").get<std::string>() + ")";
                                      if (f > 0 && f <= rare) failing.push_back(what);
                                      else if (f > rare && f <= warn_at) warning.push_back(what);
                                      else info.push_back(what);
                                  }
                                  if (!failing.empty()) return fail("rare type minority in " + join_limited(failing));
                                  if (!warning.empty()) return warn("type minority in " + join_limited(warning));
                                  if (!info.empty()) return pass("evenly mixed columns (not an injection pattern): " + join_limited(info));
                                  return pass("no mixed-type columns");
                              }};
                      }}};
    c->default_conditions = {"rare_type_minority"};
    return c;
}

CheckPtr outliers() {
    auto c = std::make_shared<CheckDefinition>();
    c->id = "outliers";
    c->category = Category::Integrity;
    c->description = "Share of numeric values outside [Q1 - k*IQR, Q3 + k*IQR]";
    c->params = {dataset_param(),
                 {"iqr_multiplier", ParamKind::Real, 3.0, "fence distance in IQR units", {}},
                 {"min_values", ParamKind::Count, 10, "columns with fewer non-missing values are skipped", {}},
                 {"max_fraction", ParamKind::Fraction, 0.01, "largest acceptable outlier share per column", {}}};
    c->run = [](const CheckContext& ctx, const Json& params) {
        const Dataset& d = selected_dataset(ctx, params);
        const double k = params.at("iqr_multiplier").get<double>();
        const auto min_values = params.at("min_values").get<std::size_t>();
        Json cols = Json::object();
        std::vector<std::string> skipped;
        std::vector<std::vector<Json>> rows;
        for (std::size_t j = 0; j < d.n_columns(); ++j) {
            const auto& col = d.column_at(j);
            if (col.type() != ColumnType::Numeric) continue;
            auto values = col.numeric_values();
            if (values.size() < min_values) {
                skipped.push_back(col.name());
                continue;
            }
            std::sort(values.begin(), values.end());
            const double q1 = quantile_sorted(values, 0.25);
            const double q3 = quantile_sorted(values, 0.75);
            const double iqr = q3 - q1;
            const double lo = q1 - k * iqr;
            const double hi = q3 + k * iqr;
            const auto count = static_cast<std::size_t>(std::count_if(
                values.begin(), values.end(), [&](double v) { return v < lo || v > hi; }));
            const double frac = static_cast<double>(count) / static_cast<double>(values.size());
            cols[col.name()] = Json{{"fraction", frac}, {"count", count}, {"lower", lo}, {"upper", hi}};
            rows.push_back({col.name(), frac, count, lo, hi});
        }
        CheckOutput out;
        out.value = Json{{"columns", cols}, {"skipped", skipped}};
        if (!skipped.empty()) {
            out.note = "too few values to assess: " + join_limited(skipped, 20);
        }
        out.displays.push_back(
            DisplayItem::table("Outliers per numeric column", {"column", "fraction", "count", "lower", "upper"}, rows));
        return out;
    };
    c->conditions = {{"max_outlier_fraction", [](const Json& params) {
                          const double limit = params.at("max_fraction").get<double>();
                          return Condition{"Outlier share is at most " + percent(limit) + " in every column",
                                           [limit](const Json& v) {
                                               std::vector<std::string> over;
                                               for (const auto& [name, rec] : v.at("columns").items()) {
                                                   const double f = rec.at("fraction").get<double>();
                                                   if (f > limit) over.push_back(name + " (" + percent(f) + ")");
                                               }
                                               if (over.empty()) return pass("no column above " + percent(limit));
                                               return warn("outliers in " + join_limited(over));
                                           }};
                      }}};
    c->default_conditions = {"max_outlier_fraction"};
    return c;
}

CheckPtr conflicting_labels() {
    auto c = std::make_shared<CheckDefinition>();
    c->id = "conflicting_labels";
    c->category = Category::Integrity;
    c->description = "Rows with identical features but different labels";
    c->params = {dataset_param(),
                 {"max_fraction", ParamKind::Fraction, 0.0, "largest acceptable share of conflicting rows", {}},
                 {"max_groups_shown", ParamKind::Count, 10, "conflicting groups listed in the display", {}}};
    c->requirements.label = true;
    c->run = [](const CheckContext& ctx, const Json& params) {
        const Dataset& d = selected_dataset(ctx, params);
        if (!d.has_label()) throw SkipCheck("requires labeled dataset");
        const auto& label = d.label();
        const auto groups = feature_groups(d);
        std::size_t in_conflict = 0;
        std::size_t n_groups = 0;
        std::vector<std::string> columns{"rows", "labels"};
        for (const auto& f : d.feature_names()) columns.push_back(f);
        std::vector<std::vector<Json>> rows;
        const auto limit = params.at("max_groups_shown").get<std::size_t>();
        for (const auto& g : groups) {
            if (g.size() < 2) continue;
            std::map<std::string, std::string> labels;
            for (auto r : g) {
                std::string key;
                label.cell(r).append_key(key);
                labels.emplace(key, label.is_missing(r) ? "<missing>" : label.category(r));
            }
            if (labels.size() < 2) continue;
            in_conflict += g.size();
            ++n_groups;
            if (rows.size() < limit) {
                std::vector<std::string> ls;
                for (const auto& [k, v] : labels) ls.push_back(v);
                std::sort(ls.begin(), ls.end());
                std::vector<Json> row{g.size(), join_limited(ls, 10)};
                for (auto& cell : feature_cells(d, g.front())) row.push_back(std::move(cell));
                rows.push_back(std::move(row));
            }
        }
        const std::size_t n = d.n_rows();
        CheckOutput out;
        out.value = Json{{"fraction", n == 0 ? 0.0 : static_cast<double>(in_conflict) / static_cast<double>(n)},
                         {"rows_in_conflict", in_conflict},
                         {"groups", n_groups},
                         {"n_rows", n}};
        out.displays.push_back(DisplayItem::table("Conflicting label groups", columns, rows));
        return out;
    };
    c->conditions = {{"max_conflicting_fraction", [](const Json& params) {
                          const double limit = params.at("max_fraction").get<double>();
                          return Condition{"Conflicting-label share is at most " + percent(limit),
                                           [limit](const Json& v) {
                                               const double f = v.at("fraction").get<double>();
                                               const std::string detail =
                                                   "found " + percent(f) + " of rows in " +
                                                   std::to_string(v.at("groups").get<std::size_t>()) +
                                                   " conflicting group(s)";
                                               return f > limit ? fail(detail) : pass(detail);
                                           }};
                      }}};
    c->default_conditions = {"max_conflicting_fraction"};
    return c;
}

}  // namespace

std::vector<CheckPtr> integrity_checks() {
    return {duplicates(), single_value(), mixed_types(), outliers(), conflicting_labels()};
}

}  // namespace tabcheck::checks
