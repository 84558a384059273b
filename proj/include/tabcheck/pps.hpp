#pragma once

#include <string>

#include "tabcheck/dataset.hpp"
#include "tabcheck/tree.hpp"

namespace tabcheck {

struct PpsResult {
    /// Predictive power score in [0, 1].
    double score = 0.0;
    bool skipped = false;
    std::string note;
    /// Cross-validated model score (weighted F1 or MAE) and the naive
    /// baseline's score on the same folds.
    double model_score = 0.0;
    double naive_score = 0.0;
    std::size_t n_rows = 0;
};

inline constexpr std::size_t kPpsMinRows = 20;
inline constexpr std::size_t kPpsFolds = 4;

/// Single-feature predictive power of `feature` for `label`, from 4-fold
/// cross-validation (fold = paired-row index mod 4) of a decision tree.
/// Classification compares out-of-fold weighted F1 with the better of two
/// baselines: always predicting the training fold's most frequent class,
/// and the expected score of guessing labels at the training-fold class
/// rates. Regression compares MAE with
/// predicting the training fold's median. Fewer than 20 complete rows give
/// a skipped result with score 0.
PpsResult pps(const Column& feature, const Column& label, Task task,
              const TreeParams& params = {});

}  // namespace tabcheck
