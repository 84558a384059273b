#include <algorithm>
#include <map>

#include "common.hpp"
#include "tabcheck/stats.hpp"

namespace tabcheck::checks {

namespace {

Json column_record(const Dataset& d, const Column& col, std::vector<Json>& row) {
    const bool is_label = d.label_name() && *d.label_name() == col.name();
    const double n = static_cast<double>(col.size());
    Json rec{{"role", is_label ? "label" : "feature"},
             {"type", to_string(col.type())},
             {"missing_fraction", n == 0 ? 0.0 : static_cast<double>(col.n_missing()) / n},
             {"distinct_count", col.distinct_count()}};
    row = {col.name(), rec["role"], rec["type"], rec["missing_fraction"], rec["distinct_count"]};
    if (col.type() == ColumnType::Numeric) {
        const auto values = col.numeric_values();
        if (!values.empty()) {
            const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
            rec["min"] = *lo;
            rec["max"] = *hi;
            row.push_back(format_number(*lo) + " .. " + format_number(*hi));
        } else {
            row.push_back(nullptr);
        }
        return rec;
    }
    std::map<std::string, std::size_t> counts;
    for (std::size_t i = 0; i < col.size(); ++i) {
        if (!col.is_missing(i)) ++counts[col.category(i)];
    }
    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    Json top = Json::array();
    std::vector<std::string> shown;
    for (std::size_t i = 0; i < ranked.size() && i < 3; ++i) {
        top.push_back(Json{{"value", ranked[i].first}, {"count", ranked[i].second}});
        shown.push_back(ranked[i].first + " (" + std::to_string(ranked[i].second) + ")");
    }
    rec["top_categories"] = top;
    row.push_back(join_limited(shown, 3));
    return rec;
}

CheckPtr dataset_summary() {
    auto c = std::make_shared<CheckDefinition>();
    c->id = "dataset_summary";
    c->category = Category::Overview;
    c->description = "Role, logical type, missing share and range of every column";
    c->params = {dataset_param()};
    c->run = [](const CheckContext& ctx, const Json& params) {
        const Dataset& d = selected_dataset(ctx, params);
        Json columns = Json::object();
        std::vector<std::vector<Json>> rows;
        for (std::size_t j = 0; j < d.n_columns(); ++j) {
            const auto& col = d.column_at(j);
            std::vector<Json> row;
            columns[col.name()] = column_record(d, col, row);
            rows.push_back(std::move(row));
        }
        const auto& meta = d.metadata();
        CheckOutput out;
        out.value = Json{{"n_rows", d.n_rows()},
                         {"source_rows", meta.source_rows},
                         {"sampled", meta.sampled},
                         {"task", to_string(d.task())},
                         {"columns", columns}};
        if (meta.sampled) {
            out.note = "sampled " + std::to_string(d.n_rows()) + " of " + std::to_string(meta.source_rows) +
                       " rows (seed " + std::to_string(meta.sample_seed) + ")";
        }
        for (const auto& w : meta.warnings) {
            if (!out.note.empty()) out.note += "; ";
            out.note += w;
        }
        out.displays.push_back(DisplayItem::table(
            "Columns", {"column", "role", "type", "missing_fraction", "distinct", "range_or_top"}, rows));
        return out;
    };
    return c;
}

CheckPtr schema_comparison() {
    auto c = std::make_shared<CheckDefinition>();
    c->id = "schema_comparison";
    c->category = Category::Overview;
    c->description = "Features, column types, label and task agree between train and test";
    c->requirements.test = true;
    c->run = [](const CheckContext& ctx, const Json&) {
        const Dataset* train = ctx.dataset(Split::Train);
        const Dataset* test = ctx.dataset(Split::Test);
        if (train == nullptr) throw SkipCheck("requires train dataset");
        const auto found = validate_shared_schema(*train, *test);
        Json list = Json::array();
        std::vector<std::vector<Json>> rows;
        for (const auto& s : found) {
            list.push_back(Json{{"kind", to_string(s.kind)},
                                {"name", s.name},
                                {"missing_in", s.missing_in},
                                {"detail", s.detail}});
            rows.push_back({std::string(to_string(s.kind)), s.name, s.detail});
        }
        CheckOutput out;
        out.value = Json{{"discrepancies", list}};
        out.displays.push_back(DisplayItem::table("Schema discrepancies", {"kind", "name", "detail"}, rows));
        return out;
    };
    c->conditions = {{"schemas_match", [](const Json&) {
                          return Condition{"Train and test schemas match", [](const Json& v) {
                                               const auto& list = v.at("discrepancies");
                                               if (list.empty()) return pass("schemas match");
                                               std::vector<std::string> what;
                                               for (const auto& d : list) what.push_back(d.at("detail").get<std::string>());
                                               return fail(std::to_string(list.size()) + " discrepancies: " + join_limited(what, 3));
                                           }};
                      }}};
    c->default_conditions = {"schemas_match"};
    return c;
}

}  // namespace

std::vector<CheckPtr> overview_checks() { return {dataset_summary(), schema_comparison()}; }

}  // namespace tabcheck::checks
