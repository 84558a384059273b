#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tabcheck/dataset.hpp"

namespace tabcheck {

struct TreeParams {
    std::size_t max_depth = 4;
    std::size_t min_samples_leaf = 5;
    std::size_t max_threshold_candidates = 64;
};

/// Column-major feature matrix the tree trains and predicts on. Numeric
/// features hold NaN for missing cells; categorical features hold the cell
/// text with a separate missing flag.
struct TreeFeature {
    std::string name;
    bool categorical = false;
    std::vector<double> numeric;
    std::vector<std::string> category;
    std::vector<char> missing;
};

struct TreeInput {
    std::vector<TreeFeature> features;
    std::size_t n_rows = 0;
};

/// Numeric columns become numeric features; Categorical and Mixed columns
/// are split on their cell text.
TreeInput tree_input(const Dataset& data, std::span<const std::string> features,
                     std::span<const std::size_t> rows);
TreeInput tree_input(const Dataset& data, std::span<const std::string> features);

struct TreeTarget {
    Task task = Task::Classification;
    /// Sorted class labels (classification).
    std::vector<std::string> classes;
    std::vector<std::size_t> class_index;
    std::vector<double> values;

    static TreeTarget classification(std::span<const std::string> labels);
    static TreeTarget regression(std::span<const double> values);
    std::size_t size() const noexcept {
        return task == Task::Classification ? class_index.size() : values.size();
    }
};

struct TreeNode {
    bool leaf = true;
    std::size_t feature = 0;
    bool categorical = false;
    double threshold = 0.0;
    std::string category;
    std::size_t left = 0;
    std::size_t right = 0;
    std::size_t n_samples = 0;
    std::vector<double> class_proportions;
    std::size_t predicted_class = 0;
    double value = 0.0;
};

struct TreePrediction {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> probabilities;
    std::vector<double> values;
};

/// CART-style binary tree. Numeric splits send x <= threshold (and never a
/// missing value) left; categorical splits send one category left.
class DecisionTree {
public:
    DecisionTree(Task task, std::vector<std::string> classes, std::vector<TreeNode> nodes,
                 std::vector<std::string> feature_names);

    Task task() const noexcept { return task_; }
    const std::vector<std::string>& classes() const noexcept { return classes_; }
    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
    std::size_t depth() const;
    std::size_t leaf_for(const TreeInput& input, std::size_t row) const;

private:
    Task task_;
    std::vector<std::string> classes_;
    std::vector<TreeNode> nodes_;
    std::vector<std::string> feature_names_;
};

/// Greedy CART fit: Gini decrease for classification, variance decrease for
/// regression. Ties go to the lower feature index, then the lower threshold,
/// then the lexicographically first category. Requires at least
/// 2 * min_samples_leaf rows.
DecisionTree fit_tree(const TreeInput& input, const TreeTarget& target, const TreeParams& params);

/// Features are matched to the training features by name.
TreePrediction predict_tree(const DecisionTree& tree, const TreeInput& input);

}  // namespace tabcheck
