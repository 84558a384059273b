#include "tabcheck/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "tabcheck/digest.hpp"
#include "tabcheck/error.hpp"
#include "tabcheck/rng.hpp"

namespace tabcheck {

std::string_view to_string(ColumnType type) {
    switch (type) {
        case ColumnType::Numeric:
            return "numeric";
        case ColumnType::Categorical:
            return "categorical";
        case ColumnType::Mixed:
            return "mixed";
    }
    return "unknown";
}

std::string_view to_string(Task task) {
    switch (task) {
        case Task::Classification:
            return "classification";
        case Task::Regression:
            return "regression";
        case Task::Unlabeled:
            return "unlabeled";
    }
    return "unknown";
}

Task parse_task(std::string_view text) {
    if (text == "classification") {
        return Task::Classification;
    }
    if (text == "regression") {
        return Task::Regression;
    }
    throw ConfigError("unknown task '" + std::string(text) +
                      "' (expected classification or regression)");
}

std::string_view to_string(SchemaDiscrepancy::Kind kind) {
    switch (kind) {
        case SchemaDiscrepancy::Kind::MissingFeature:
            return "missing_feature";
        case SchemaDiscrepancy::Kind::TypeMismatch:
            return "type_mismatch";
        case SchemaDiscrepancy::Kind::LabelMismatch:
            return "label_mismatch";
        case SchemaDiscrepancy::Kind::TaskMismatch:
            return "task_mismatch";
    }
    return "unknown";
}

bool is_missing_marker(std::string_view text) {
    return text.empty() || text == "NaN" || text == "null";
}

std::optional<double> parse_number(std::string_view text) {
    auto is_blank = [](char c) { return c == ' ' || c == '\t'; };
    while (!text.empty() && is_blank(text.front())) {
        text.remove_prefix(1);
    }
    while (!text.empty() && is_blank(text.back())) {
        text.remove_suffix(1);
    }
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
        if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
            return std::nullopt;
        }
    }
    if (text.empty()) {
        return std::nullopt;
    }
    // from_chars also accepts "inf"/"nan" spellings; require a digit or '.'
    // up front so only plain decimal forms pass.
    const char lead = text.front() == '-' && text.size() > 1 ? text[1] : text.front();
    if (!(std::isdigit(static_cast<unsigned char>(lead)) || lead == '.')) {
        return std::nullopt;
    }
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value, std::chars_format::general);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

Cell Cell::from_text(std::string raw) {
    Cell cell;
    if (is_missing_marker(raw)) {
        return cell;
    }
    if (const auto v = parse_number(raw)) {
        cell.kind_ = Kind::Number;
        cell.number_ = *v == 0.0 ? 0.0 : *v;
    } else {
        cell.kind_ = Kind::Text;
    }
    cell.text_ = std::move(raw);
    return cell;
}

void Cell::append_key(std::string& out) const {
    switch (kind_) {
        case Kind::Missing:
            out.push_back('M');
            break;
        case Kind::Number: {
            out.push_back('N');
            char bytes[sizeof(double)];
            std::memcpy(bytes, &number_, sizeof(double));
            out.append(bytes, sizeof(double));
            break;
        }
        case Kind::Text:
            out.push_back('T');
            out += std::to_string(text_.size());
            out.push_back(':');
            out += text_;
            break;
    }
}

TypeInference infer_column_type(std::span<const Cell> cells) {
    if (cells.empty()) {
        throw ContractError("infer_column_type: empty cell sequence");
    }
    std::size_t numbers = 0;
    std::size_t texts = 0;
    std::set<double> distinct;
    for (const auto& c : cells) {
        if (c.is_number()) {
            ++numbers;
            if (distinct.size() <= 10) {
                distinct.insert(c.number());
            }
        } else if (!c.is_missing()) {
            ++texts;
        }
    }
    TypeInference out;
    if (numbers == 0 && texts == 0) {
        out.type = ColumnType::Categorical;
        out.warning = "all values missing";
        return out;
    }
    if (texts == 0) {
        const double ratio = static_cast<double>(distinct.size()) / static_cast<double>(numbers);
        out.type = (distinct.size() <= 10 && ratio <= 0.05) ? ColumnType::Categorical
                                                            : ColumnType::Numeric;
    } else if (numbers == 0) {
        out.type = ColumnType::Categorical;
    } else {
        out.type = ColumnType::Mixed;
    }
    return out;
}

TypeInference infer_column_type(std::span<const std::string> raw) {
    std::vector<Cell> cells;
    cells.reserve(raw.size());
    for (const auto& r : raw) {
        cells.push_back(Cell::from_text(r));
    }
    return infer_column_type(cells);
}

Column::Column(std::string name, std::vector<Cell> cells, ColumnType type)
    : name_(std::move(name)), type_(type), cells_(std::move(cells)) {
    n_missing_ = static_cast<std::size_t>(
        std::count_if(cells_.begin(), cells_.end(), [](const Cell& c) { return c.is_missing(); }));
}

double Column::numeric(std::size_t row) const {
    const auto& c = cells_[row];
    return c.is_number() ? c.number() : std::numeric_limits<double>::quiet_NaN();
}

std::vector<double> Column::numeric_values() const {
    std::vector<double> out;
    out.reserve(cells_.size() - n_missing_);
    for (const auto& c : cells_) {
        if (c.is_number()) {
            out.push_back(c.number());
        }
    }
    return out;
}

std::size_t Column::distinct_count() const {
    std::unordered_set<std::string> keys;
    std::string key;
    for (const auto& c : cells_) {
        if (c.is_missing()) {
            continue;
        }
        key.clear();
        c.append_key(key);
        keys.insert(key);
    }
    return keys.size();
}

Column Column::retyped(ColumnType type) const { return Column(name_, cells_, type); }

Column Column::reordered(std::span<const std::size_t> order) const {
    std::vector<Cell> cells;
    cells.reserve(order.size());
    for (auto i : order) {
        cells.push_back(cells_.at(i));
    }
    return Column(name_, std::move(cells), type_);
}

namespace {

std::string serialize_table(const CsvTable& table) {
    std::string out;
    append_csv_row(out, table.header);
    for (const auto& row : table.rows) {
        append_csv_row(out, row);
    }
    return out;
}

}  // namespace

Dataset Dataset::from_table(const CsvTable& table, const SchemaOptions& opts, std::string source,
                            std::string digest) {
    if (opts.max_rows < 1) {
        throw ConfigError("max_rows must be >= 1");
    }
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (!index.emplace(table.header[j], j).second) {
            throw LoadError(source + ": duplicate column name '" + table.header[j] + "' at column " +
                            std::to_string(j + 1));
        }
    }
    auto require = [&](const std::string& name, std::string_view role) {
        if (!index.contains(name)) {
            throw LoadError(source + ": " + std::string(role) + " column '" + name + "' not found");
        }
    };

    Dataset ds;
    ds.metadata_.source = std::move(source);
    ds.metadata_.source_rows = table.rows.size();
    ds.metadata_.sample_seed = opts.sample_seed;

    if (opts.label) {
        require(*opts.label, "label");
        ds.label_name_ = opts.label;
    } else if (opts.task) {
        throw LoadError(ds.metadata_.source + ": a task was given without a label column");
    }
    if (opts.features) {
        std::unordered_set<std::string> seen;
        for (const auto& f : *opts.features) {
            require(f, "feature");
            if (ds.label_name_ && f == *ds.label_name_) {
                throw LoadError(ds.metadata_.source + ": label '" + f + "' listed as a feature");
            }
            if (!seen.insert(f).second) {
                throw LoadError(ds.metadata_.source + ": feature '" + f + "' listed twice");
            }
        }
        ds.feature_names_ = *opts.features;
    } else {
        for (const auto& name : table.header) {
            if (!ds.label_name_ || name != *ds.label_name_) {
                ds.feature_names_.push_back(name);
            }
        }
    }
    for (const auto& name : opts.categorical_overrides) {
        require(name, "categorical override");
    }

    std::vector<std::size_t> rows(table.rows.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    if (rows.size() > opts.max_rows) {
        Rng rng(opts.sample_seed);
        rng.shuffle(rows);
        rows.resize(opts.max_rows);
        std::sort(rows.begin(), rows.end());
        ds.metadata_.sampled = true;
    }
    ds.n_rows_ = rows.size();

    for (std::size_t j = 0; j < table.header.size(); ++j) {
        const auto& name = table.header[j];
        std::vector<Cell> cells;
        cells.reserve(rows.size());
        for (auto r : rows) {
            cells.push_back(Cell::from_text(table.rows[r][j]));
        }
        ColumnType type = ColumnType::Categorical;
        if (!cells.empty()) {
            auto inferred = infer_column_type(cells);
            type = inferred.type;
            if (inferred.warning) {
                ds.metadata_.warnings.push_back("column '" + name + "': " + *inferred.warning);
            }
        }
        if (auto hint = opts.type_hints.find(name); hint != opts.type_hints.end()) {
            const bool has_text = std::any_of(cells.begin(), cells.end(), [](const Cell& c) {
                return c.kind() == Cell::Kind::Text;
            });
            if (hint->second == ColumnType::Categorical ||
                (hint->second == ColumnType::Numeric && !has_text)) {
                type = hint->second;
            }
        }
        if (std::find(opts.categorical_overrides.begin(), opts.categorical_overrides.end(), name) !=
            opts.categorical_overrides.end()) {
            type = ColumnType::Categorical;
        }
        if (ds.label_name_ && name == *ds.label_name_) {
            Task task = opts.task.value_or(type == ColumnType::Numeric ? Task::Regression
                                                                       : Task::Classification);
            if (task == Task::Unlabeled) {
                throw LoadError(ds.metadata_.source + ": labeled dataset cannot have task 'unlabeled'");
            }
            if (task == Task::Regression) {
                for (std::size_t i = 0; i < cells.size(); ++i) {
                    if (cells[i].kind() == Cell::Kind::Text) {
                        throw LoadError(ds.metadata_.source + ": regression label '" + name +
                                        "' has non-numeric value '" + cells[i].text() +
                                        "' at data row " + std::to_string(rows[i] + 1));
                    }
                }
                type = ColumnType::Numeric;
            } else {
                type = ColumnType::Categorical;
            }
            ds.task_ = task;
        }
        ds.columns_.push_back(std::make_shared<const Column>(name, std::move(cells), type));
    }

    ds.metadata_.digest = digest.empty() ? csv_digest(serialize_table(table)) : std::move(digest);
    return ds;
}

bool Dataset::has_column(std::string_view name) const {
    return std::any_of(columns_.begin(), columns_.end(),
                       [&](const auto& c) { return c->name() == name; });
}

const Column& Dataset::column(std::string_view name) const {
    for (const auto& c : columns_) {
        if (c->name() == name) {
            return *c;
        }
    }
    throw ContractError("no column named '" + std::string(name) + "'");
}

std::vector<std::string> Dataset::column_names() const {
    std::vector<std::string> out;
    out.reserve(columns_.size());
    for (const auto& c : columns_) {
        out.push_back(c->name());
    }
    return out;
}

const Column& Dataset::label() const {
    if (!label_name_) {
        throw ContractError("dataset has no label");
    }
    return column(*label_name_);
}

std::vector<std::string> Dataset::label_classes() const {
    std::set<std::string> classes;
    const auto& lab = label();
    for (std::size_t i = 0; i < lab.size(); ++i) {
        if (!lab.is_missing(i)) {
            classes.insert(lab.category(i));
        }
    }
    return {classes.begin(), classes.end()};
}

std::string Dataset::row_key(std::size_t row, std::span<const std::string> names) const {
    std::string key;
    for (const auto& n : names) {
        column(n).cell(row).append_key(key);
        key.push_back('\x1f');
    }
    return key;
}

Dataset Dataset::with_column_reordered(std::string_view name,
                                       std::span<const std::size_t> order) const {
    if (order.size() != n_rows_) {
        throw ContractError("with_column_reordered: order length differs from row count");
    }
    Dataset out = *this;
    for (auto& c : out.columns_) {
        if (c->name() == name) {
            c = std::make_shared<const Column>(c->reordered(order));
            return out;
        }
    }
    throw ContractError("no column named '" + std::string(name) + "'");
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
    Dataset out = *this;
    for (auto& c : out.columns_) {
        c = std::make_shared<const Column>(c->reordered(rows));
    }
    out.n_rows_ = rows.size();
    return out;
}

std::string Dataset::features_to_csv(std::size_t begin, std::size_t end) const {
    std::vector<const Column*> cols;
    cols.reserve(feature_names_.size());
    for (const auto& f : feature_names_) {
        cols.push_back(&column(f));
    }
    std::string out;
    append_csv_row(out, feature_names_);
    std::vector<std::string> fields(cols.size());
    for (std::size_t i = begin; i < end && i < n_rows_; ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const auto& cell = cols[j]->cell(i);
            fields[j] = cell.is_missing() ? std::string() : cell.text();
        }
        append_csv_row(out, fields);
    }
    return out;
}

Dataset load_csv_text(std::string_view text, const SchemaOptions& opts, std::string source) {
    CsvTable table;
    try {
        table = parse_csv(text);
    } catch (const LoadError& e) {
        throw LoadError(source + ": " + e.what());
    }
    return Dataset::from_table(table, opts, std::move(source), csv_digest(text));
}

Dataset load_csv(const std::filesystem::path& path, const SchemaOptions& opts) {
    const std::string text = read_file(path);
    return load_csv_text(text, opts, path.string());
}

std::vector<SchemaDiscrepancy> validate_shared_schema(const Dataset& train, const Dataset& test) {
    using Kind = SchemaDiscrepancy::Kind;
    std::vector<SchemaDiscrepancy> out;
    const auto& tf = train.feature_names();
    const auto& sf = test.feature_names();
    auto contains = [](const std::vector<std::string>& v, const std::string& x) {
        return std::find(v.begin(), v.end(), x) != v.end();
    };
    for (const auto& f : tf) {
        if (!contains(sf, f)) {
            out.push_back({Kind::MissingFeature, f, "test", "feature '" + f + "' absent from test"});
        }
    }
    for (const auto& f : sf) {
        if (!contains(tf, f)) {
            out.push_back({Kind::MissingFeature, f, "train", "feature '" + f + "' absent from train"});
        }
    }
    for (const auto& f : tf) {
        if (!contains(sf, f)) {
            continue;
        }
        const auto a = train.column(f).type();
        const auto b = test.column(f).type();
        if (a != b) {
            out.push_back({Kind::TypeMismatch, f, "",
                           "feature '" + f + "' is " + std::string(to_string(a)) + " in train but " +
                               std::string(to_string(b)) + " in test"});
        }
    }
    if (train.label_name() != test.label_name()) {
        out.push_back({Kind::LabelMismatch, train.label_name().value_or(""), "",
                       "label '" + train.label_name().value_or("<none>") + "' in train vs '" +
                           test.label_name().value_or("<none>") + "' in test"});
    }
    if (train.task() != test.task()) {
        out.push_back({Kind::TaskMismatch, train.label_name().value_or(""), "",
                       "task " + std::string(to_string(train.task())) + " in train vs " +
                           std::string(to_string(test.task())) + " in test"});
    }
    return out;
}

}  // namespace tabcheck
