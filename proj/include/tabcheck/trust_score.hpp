#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tabcheck {

struct TrustParams {
    /// Neighbor rank used for density filtering.
    std::size_t k = 2;
    /// Fraction of each class dropped as low-density, in [0, 1).
    double alpha = 0.0;
    /// Floor on the distance to the predicted class.
    double epsilon = 1e-12;
};

using FeatureRows = std::vector<std::vector<double>>;

/// Trust score per evaluation row: distance to the nearest reference point
/// of any other class divided by the distance to the nearest reference
/// point of the predicted class (floored at epsilon). Features are min-max
/// scaled by the reference rows. With alpha > 0, each class first drops the
/// ceil(alpha * n_c) points farthest from their k-th same-class neighbor.
///
/// `exclude` optionally names, per evaluation row, one reference row that
/// is ignored for that evaluation row (leave-one-out scoring).
///
/// Requires >= 2 classes, >= 2 features, complete rows. Throws
/// InsufficientData when the predicted class has no retained points.
std::vector<double> trust_scores(const FeatureRows& reference, std::span<const std::string> labels,
                                 const FeatureRows& eval, std::span<const std::string> predicted,
                                 const TrustParams& params = {},
                                 std::span<const std::optional<std::size_t>> exclude = {});

}  // namespace tabcheck
