#include "tabcheck/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "tabcheck/error.hpp"

namespace tabcheck {

TreeInput tree_input(const Dataset& data, std::span<const std::string> features,
                     std::span<const std::size_t> rows) {
    TreeInput in;
    in.n_rows = rows.size();
    for (const auto& name : features) {
        const auto& col = data.column(name);
        TreeFeature f;
        f.name = name;
        f.categorical = col.type() != ColumnType::Numeric;
        f.missing.reserve(rows.size());
        for (auto r : rows) {
            f.missing.push_back(col.is_missing(r) ? 1 : 0);
            if (f.categorical) {
                f.category.push_back(col.is_missing(r) ? std::string() : col.category(r));
            } else {
                f.numeric.push_back(col.numeric(r));
            }
        }
        in.features.push_back(std::move(f));
    }
    return in;
}

TreeInput tree_input(const Dataset& data, std::span<const std::string> features) {
    std::vector<std::size_t> rows(data.n_rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return tree_input(data, features, rows);
}

TreeTarget TreeTarget::classification(std::span<const std::string> labels) {
    TreeTarget t;
    t.task = Task::Classification;
    std::set<std::string> u(labels.begin(), labels.end());
    t.classes.assign(u.begin(), u.end());
    t.class_index.reserve(labels.size());
    for (const auto& l : labels) {
        t.class_index.push_back(static_cast<std::size_t>(
            std::lower_bound(t.classes.begin(), t.classes.end(), l) - t.classes.begin()));
    }
    return t;
}

TreeTarget TreeTarget::regression(std::span<const double> values) {
    TreeTarget t;
    t.task = Task::Regression;
    t.values.assign(values.begin(), values.end());
    return t;
}

DecisionTree::DecisionTree(Task task, std::vector<std::string> classes, std::vector<TreeNode> nodes,
                           std::vector<std::string> feature_names)
    : task_(task),
      classes_(std::move(classes)),
      nodes_(std::move(nodes)),
      feature_names_(std::move(feature_names)) {}

std::size_t DecisionTree::depth() const {
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    std::size_t best = 0;
    while (!stack.empty()) {
        const auto [node, d] = stack.back();
        stack.pop_back();
        best = std::max(best, d);
        if (!nodes_[node].leaf) {
            stack.emplace_back(nodes_[node].left, d + 1);
            stack.emplace_back(nodes_[node].right, d + 1);
        }
    }
    return best;
}

std::size_t DecisionTree::leaf_for(const TreeInput& input, std::size_t row) const {
    std::size_t node = 0;
    while (!nodes_[node].leaf) {
        const auto& n = nodes_[node];
        const auto& f = input.features[n.feature];
        bool go_left = false;
        if (!f.missing[row]) {
            go_left = n.categorical ? f.category[row] == n.category : f.numeric[row] <= n.threshold;
        }
        node = go_left ? n.left : n.right;
    }
    return node;
}

namespace {

struct Split {
    bool found = false;
    double gain = 0.0;
    std::size_t feature = 0;
    bool categorical = false;
    double threshold = 0.0;
    std::string category;
};

/// Sufficient statistics of a row subset.
struct Stats {
    std::vector<double> counts;
    double n = 0.0;
    double sum = 0.0;
    double sumsq = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const TreeInput& in, const TreeTarget& target, const TreeParams& params)
        : in_(in), target_(target), params_(params), k_(target.classes.size()) {}

    std::vector<TreeNode> build() {
        std::vector<std::size_t> rows(in_.n_rows);
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        // Canonical order: by target. Every sum below is then taken over a
        // sequence that depends only on the multiset of rows, not on the
        // order rows were supplied in.
        std::stable_sort(rows.begin(), rows.end(),
                         [&](std::size_t a, std::size_t b) { return target_less(a, b); });
        grow(rows, 0);
        return std::move(nodes_);
    }

private:
    bool target_less(std::size_t a, std::size_t b) const {
        if (target_.task == Task::Classification) {
            return target_.class_index[a] < target_.class_index[b];
        }
        return target_.values[a] < target_.values[b];
    }

    void add(Stats& s, std::size_t row) const {
        s.n += 1.0;
        if (target_.task == Task::Classification) {
            s.counts[target_.class_index[row]] += 1.0;
        } else {
            const double y = target_.values[row];
            s.sum += y;
            s.sumsq += y * y;
        }
    }

    Stats empty_stats() const {
        Stats s;
        s.counts.assign(k_, 0.0);
        return s;
    }

    Stats stats_of(const std::vector<std::size_t>& rows) const {
        Stats s = empty_stats();
        for (auto r : rows) add(s, r);
        return s;
    }

    /// n * impurity (Gini) or sum of squared deviations.
    double weighted_impurity(const Stats& s) const {
        if (s.n == 0.0) return 0.0;
        if (target_.task == Task::Classification) {
            double sq = 0.0;
            for (double c : s.counts) sq += c * c;
            return s.n - sq / s.n;
        }
        return std::max(0.0, s.sumsq - s.sum * s.sum / s.n);
    }

    Stats minus(const Stats& a, const Stats& b) const {
        Stats s = empty_stats();
        s.n = a.n - b.n;
        for (std::size_t c = 0; c < k_; ++c) s.counts[c] = a.counts[c] - b.counts[c];
        s.sum = a.sum - b.sum;
        s.sumsq = a.sumsq - b.sumsq;
        return s;
    }

    void consider(Split& best, double min_gain, double gain, std::size_t feature, bool categorical,
                  double threshold, const std::string& category) const {
        const double tol = 1e-12 * std::abs(best.gain);
        if (gain <= min_gain) return;
        if (best.found && gain <= best.gain + tol) return;
        best.found = true;
        best.gain = gain;
        best.feature = feature;
        best.categorical = categorical;
        best.threshold = threshold;
        best.category = category;
    }

    Split best_split(const std::vector<std::size_t>& rows, const Stats& total) const {
        Split best;
        const double parent = weighted_impurity(total);
        const double min_gain = 1e-12 * parent;
        const double min_leaf = static_cast<double>(params_.min_samples_leaf);
        for (std::size_t fi = 0; fi < in_.features.size(); ++fi) {
            const auto& f = in_.features[fi];
            if (f.categorical) {
                std::map<std::string, Stats> by_cat;
                for (auto r : rows) {
                    if (f.missing[r]) continue;
                    auto [it, inserted] = by_cat.try_emplace(f.category[r], empty_stats());
                    add(it->second, r);
                }
                for (const auto& [cat, left] : by_cat) {
                    const Stats right = minus(total, left);
                    if (left.n < min_leaf || right.n < min_leaf) continue;
                    const double gain = parent - weighted_impurity(left) - weighted_impurity(right);
                    consider(best, min_gain, gain, fi, true, 0.0, cat);
                }
                continue;
            }
            std::vector<std::size_t> present;
            present.reserve(rows.size());
            for (auto r : rows) {
                if (!f.missing[r]) present.push_back(r);
            }
            if (present.size() < 2) continue;
            std::stable_sort(present.begin(), present.end(), [&](std::size_t a, std::size_t b) {
                return f.numeric[a] < f.numeric[b];
            });
            std::vector<double> distinct;
            for (auto r : present) {
                if (distinct.empty() || distinct.back() != f.numeric[r]) {
                    distinct.push_back(f.numeric[r]);
                }
            }
            if (distinct.size() < 2) continue;
            std::vector<double> picks;
            const std::size_t kmax = std::max<std::size_t>(2, params_.max_threshold_candidates);
            if (distinct.size() <= kmax) {
                picks = distinct;
            } else {
                for (std::size_t i = 0; i < kmax; ++i) {
                    const std::size_t idx = static_cast<std::size_t>(std::llround(
                        static_cast<double>(i) * static_cast<double>(distinct.size() - 1) /
                        static_cast<double>(kmax - 1)));
                    if (picks.empty() || picks.back() != distinct[idx]) {
                        picks.push_back(distinct[idx]);
                    }
                }
            }
            // Sweep rows in (value, target) order accumulating the left side.
            Stats left = empty_stats();
            std::size_t pos = 0;
            for (std::size_t t = 0; t + 1 < picks.size(); ++t) {
                const double threshold = picks[t] + (picks[t + 1] - picks[t]) / 2.0;
                while (pos < present.size() && f.numeric[present[pos]] <= threshold) {
                    add(left, present[pos]);
                    ++pos;
                }
                const Stats right = minus(total, left);
                if (left.n < min_leaf || right.n < min_leaf) continue;
                const double gain = parent - weighted_impurity(left) - weighted_impurity(right);
                consider(best, min_gain, gain, fi, false, threshold, {});
            }
        }
        return best;
    }

    TreeNode make_leaf(const Stats& s) const {
        TreeNode node;
        node.leaf = true;
        node.n_samples = static_cast<std::size_t>(s.n);
        if (target_.task == Task::Classification) {
            node.class_proportions.resize(k_);
            std::size_t best = 0;
            for (std::size_t c = 0; c < k_; ++c) {
                node.class_proportions[c] = s.n > 0 ? s.counts[c] / s.n : 0.0;
                if (s.counts[c] > s.counts[best]) best = c;
            }
            node.predicted_class = best;
        } else {
            node.value = s.n > 0 ? s.sum / s.n : 0.0;
        }
        return node;
    }

    bool pure(const Stats& s) const {
        if (target_.task == Task::Classification) {
            return std::count_if(s.counts.begin(), s.counts.end(), [](double c) { return c > 0; }) <= 1;
        }
        return weighted_impurity(s) <= 0.0;
    }

    std::size_t grow(const std::vector<std::size_t>& rows, std::size_t depth) {
        // Rows arrive in canonical target order (partitioning is stable).
        const Stats total = stats_of(rows);
        const std::size_t id = nodes_.size();
        nodes_.push_back(make_leaf(total));
        if (depth >= params_.max_depth || rows.size() < 2 * params_.min_samples_leaf || pure(total)) {
            return id;
        }
        const Split split = best_split(rows, total);
        if (!split.found) {
            return id;
        }
        const auto& f = in_.features[split.feature];
        std::vector<std::size_t> left_rows;
        std::vector<std::size_t> right_rows;
        for (auto r : rows) {
            bool go_left = false;
            if (!f.missing[r]) {
                go_left = split.categorical ? f.category[r] == split.category
                                            : f.numeric[r] <= split.threshold;
            }
            (go_left ? left_rows : right_rows).push_back(r);
        }
        const std::size_t l = grow(left_rows, depth + 1);
        const std::size_t r = grow(right_rows, depth + 1);
        auto& node = nodes_[id];
        node.leaf = false;
        node.feature = split.feature;
        node.categorical = split.categorical;
        node.threshold = split.threshold;
        node.category = split.category;
        node.left = l;
        node.right = r;
        return id;
    }

    const TreeInput& in_;
    const TreeTarget& target_;
    const TreeParams& params_;
    std::size_t k_;
    std::vector<TreeNode> nodes_;
};

}  // namespace

DecisionTree fit_tree(const TreeInput& input, const TreeTarget& target, const TreeParams& params) {
    if (params.max_depth < 1 || params.min_samples_leaf < 1) {
        throw ContractError("fit_tree: max_depth and min_samples_leaf must be >= 1");
    }
    if (target.size() != input.n_rows) {
        throw ContractError("fit_tree: target length differs from row count");
    }
    if (input.n_rows < 2 * params.min_samples_leaf) {
        throw ContractError("fit_tree: need at least " + std::to_string(2 * params.min_samples_leaf) +
                            " rows, got " + std::to_string(input.n_rows));
    }
    TreeBuilder builder(input, target, params);
    std::vector<std::string> names;
    for (const auto& f : input.features) names.push_back(f.name);
    return DecisionTree(target.task, target.classes, builder.build(), std::move(names));
}

TreePrediction predict_tree(const DecisionTree& tree, const TreeInput& input) {
    // Reorder the caller's features to the training layout.
    TreeInput aligned;
    aligned.n_rows = input.n_rows;
    for (const auto& name : tree.feature_names()) {
        const auto it = std::find_if(input.features.begin(), input.features.end(),
                                     [&](const TreeFeature& f) { return f.name == name; });
        if (it == input.features.end()) {
            throw ContractError("predict_tree: feature '" + name + "' missing from input");
        }
        aligned.features.push_back(*it);
    }
    TreePrediction out;
    for (std::size_t i = 0; i < input.n_rows; ++i) {
        const auto& leaf = tree.nodes()[tree.leaf_for(aligned, i)];
        if (tree.task() == Task::Classification) {
            out.labels.push_back(tree.classes()[leaf.predicted_class]);
            out.probabilities.push_back(leaf.class_proportions);
        } else {
            out.values.push_back(leaf.value);
        }
    }
    return out;
}

}  // namespace tabcheck
