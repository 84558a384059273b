#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tabcheck/csv.hpp"

namespace tabcheck {

enum class ColumnType { Numeric, Categorical, Mixed };
enum class Task { Classification, Regression, Unlabeled };

std::string_view to_string(ColumnType type);
std::string_view to_string(Task task);
/// Accepts "classification" / "regression"; throws ConfigError otherwise.
Task parse_task(std::string_view text);

/// Empty string, "NaN" and "null" (case-sensitive).
bool is_missing_marker(std::string_view text);

/// Finite integer / decimal / scientific value with optional sign and
/// surrounding blanks. Comma decimal separators are rejected.
std::optional<double> parse_number(std::string_view text);

/// One parsed cell. Number cells keep their source text so categorical
/// views and re-serialization see exactly what the file held.
class Cell {
public:
    enum class Kind : std::uint8_t { Missing, Number, Text };

    Cell() = default;
    static Cell from_text(std::string raw);

    Kind kind() const noexcept { return kind_; }
    bool is_missing() const noexcept { return kind_ == Kind::Missing; }
    bool is_number() const noexcept { return kind_ == Kind::Number; }
    double number() const noexcept { return number_; }
    const std::string& text() const noexcept { return text_; }

    /// Identity used for duplicate / leakage comparison: numbers compare by
    /// value, text by bytes, missing only equals missing.
    void append_key(std::string& out) const;

private:
    Kind kind_ = Kind::Missing;
    double number_ = 0.0;
    std::string text_;
};

struct TypeInference {
    ColumnType type = ColumnType::Categorical;
    std::optional<std::string> warning;
};

/// Numeric if every non-missing cell parses, Categorical if none do, Mixed
/// otherwise. Numeric columns with at most 10 distinct values and a
/// distinct/non-missing ratio of at most 0.05 are treated as encoded
/// categories. An all-missing column is Categorical with a warning.
TypeInference infer_column_type(std::span<const Cell> cells);
TypeInference infer_column_type(std::span<const std::string> raw);

class Column {
public:
    Column(std::string name, std::vector<Cell> cells, ColumnType type);

    const std::string& name() const noexcept { return name_; }
    ColumnType type() const noexcept { return type_; }
    std::size_t size() const noexcept { return cells_.size(); }
    std::size_t n_missing() const noexcept { return n_missing_; }
    std::span<const Cell> cells() const noexcept { return cells_; }
    const Cell& cell(std::size_t row) const { return cells_[row]; }
    bool is_missing(std::size_t row) const { return cells_[row].is_missing(); }

    /// NaN for missing or non-numeric cells.
    double numeric(std::size_t row) const;
    /// All non-missing numeric cells, in row order.
    std::vector<double> numeric_values() const;
    /// Category label (cell text) of a non-missing cell.
    const std::string& category(std::size_t row) const { return cells_[row].text(); }
    /// Number of distinct non-missing cell identities.
    std::size_t distinct_count() const;

    Column retyped(ColumnType type) const;
    Column reordered(std::span<const std::size_t> order) const;

private:
    std::string name_;
    ColumnType type_;
    std::vector<Cell> cells_;
    std::size_t n_missing_ = 0;
};

struct SchemaOptions {
    std::optional<std::string> label;
    std::optional<std::vector<std::string>> features;
    std::optional<Task> task;
    std::vector<std::string> categorical_overrides;
    /// Types to adopt instead of inference (e.g. the training set's types
    /// when loading a test set). Only Numeric and Categorical hints apply,
    /// and a Numeric hint is ignored for a column holding text.
    std::map<std::string, ColumnType> type_hints;
    std::size_t max_rows = 100000;
    std::uint64_t sample_seed = 42;
};

struct DatasetMetadata {
    std::string source;
    /// SHA-256 (hex) over the canonicalized CSV text.
    std::string digest;
    std::size_t source_rows = 0;
    bool sampled = false;
    std::uint64_t sample_seed = 42;
    std::vector<std::string> warnings;
};

/// Immutable typed table. Columns are shared between derived datasets.
class Dataset {
public:
    /// Builds a dataset from a raw table. Throws LoadError for duplicate
    /// header names, unknown label/feature/override names, and a regression
    /// label with non-numeric cells. When `digest` is empty it is computed
    /// over the re-serialized table.
    static Dataset from_table(const CsvTable& table, const SchemaOptions& opts,
                              std::string source = "<memory>", std::string digest = {});

    std::size_t n_rows() const noexcept { return n_rows_; }
    std::size_t n_columns() const noexcept { return columns_.size(); }
    const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
    const std::optional<std::string>& label_name() const noexcept { return label_name_; }
    Task task() const noexcept { return task_; }
    const DatasetMetadata& metadata() const noexcept { return metadata_; }

    bool has_column(std::string_view name) const;
    /// Throws ContractError when absent.
    const Column& column(std::string_view name) const;
    const Column& column_at(std::size_t index) const { return *columns_[index]; }
    std::vector<std::string> column_names() const;

    bool has_label() const noexcept { return label_name_.has_value(); }
    /// Throws ContractError for unlabeled datasets.
    const Column& label() const;
    /// Sorted distinct label categories (classification only).
    std::vector<std::string> label_classes() const;

    /// Concatenated cell identities of the named columns for one row.
    std::string row_key(std::size_t row, std::span<const std::string> names) const;

    /// Copy with one column's cells rearranged: new[i] = old[order[i]].
    Dataset with_column_reordered(std::string_view name,
                                  std::span<const std::size_t> order) const;
    /// Copy holding only the given rows (in the given order).
    Dataset select_rows(std::span<const std::size_t> rows) const;

    /// Header = feature names in dataset order, missing cells empty.
    std::string features_to_csv(std::size_t begin, std::size_t end) const;

private:
    Dataset() = default;

    std::vector<std::shared_ptr<const Column>> columns_;
    std::vector<std::string> feature_names_;
    std::optional<std::string> label_name_;
    Task task_ = Task::Unlabeled;
    std::size_t n_rows_ = 0;
    DatasetMetadata metadata_;
};

/// Reads and parses a CSV file; digest is taken over the file bytes.
Dataset load_csv(const std::filesystem::path& path, const SchemaOptions& opts);
Dataset load_csv_text(std::string_view text, const SchemaOptions& opts,
                      std::string source = "<memory>");

struct SchemaDiscrepancy {
    enum class Kind { MissingFeature, TypeMismatch, LabelMismatch, TaskMismatch };
    Kind kind;
    std::string name;
    /// For MissingFeature: "train" or "test" (the side lacking it).
    std::string missing_in;
    std::string detail;

    bool operator==(const SchemaDiscrepancy&) const = default;
};

std::string_view to_string(SchemaDiscrepancy::Kind kind);

std::vector<SchemaDiscrepancy> validate_shared_schema(const Dataset& train,
                                                      const Dataset& test);

}  // namespace tabcheck
