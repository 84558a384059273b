#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tabcheck {

/// Category/bin proportions. Proportions sum to 1 (within 1e-9).
class Histogram {
public:
    Histogram(std::vector<std::string> bin_labels, std::vector<double> proportions);

    /// Normalizes raw counts; all-zero counts are rejected.
    static Histogram from_counts(std::vector<std::string> bin_labels,
                                 std::span<const double> counts);

    const std::vector<std::string>& bin_labels() const noexcept { return labels_; }
    const std::vector<double>& proportions() const noexcept { return proportions_; }
    std::size_t size() const noexcept { return labels_.size(); }

private:
    std::vector<std::string> labels_;
    std::vector<double> proportions_;
};

/// Category frequencies of two samples over the sorted union of their
/// categories; a category absent from one side gets proportion 0.
std::pair<Histogram, Histogram> aligned_category_histograms(std::span<const std::string> reference,
                                                            std::span<const std::string> current);

enum class DriftMethod { EMD, PSI };
std::string_view to_string(DriftMethod method);

struct DriftScore {
    double value = 0.0;
    DriftMethod method = DriftMethod::EMD;
};

inline constexpr double kPsiFloor = 1e-6;

/// Population stability index, sum of (q - p) * ln(q / p) with both
/// proportions floored at 1e-6. Requires identical bin labels.
DriftScore psi(const Histogram& reference, const Histogram& current);

/// Wasserstein-1 distance between the empirical distributions after
/// min-max scaling both samples by their combined range. Result in [0, 1];
/// 0 when the combined range is 0.
DriftScore emd_normalized(std::span<const double> reference, std::span<const double> current);

/// Mean over rows of sum over classes of (p_c - [y == c])^2. Range [0, 2].
double brier_score(std::span<const std::vector<double>> probabilities,
                   std::span<const std::string> labels, std::span<const std::string> classes);

struct CalibrationBin {
    double mean_predicted = 0.0;
    double fraction_positive = 0.0;
    std::size_t count = 0;
};

/// Equal-width bins over [0, 1], last bin right-closed, empty bins omitted.
std::vector<CalibrationBin> calibration_bins(std::span<const double> probabilities,
                                             std::span<const bool> is_class,
                                             std::size_t n_bins = 10);

/// Linear-interpolation quantile of a sorted sample (position q * (n - 1)).
double quantile_sorted(std::span<const double> sorted, double q);

/// Internal edges of right-open bins (-inf, e1), [e1, e2), ..., [ek, +inf).
class QuantileBins {
public:
    explicit QuantileBins(std::vector<double> edges) : edges_(std::move(edges)) {}

    const std::vector<double>& edges() const noexcept { return edges_; }
    std::size_t n_bins() const noexcept { return edges_.size() + 1; }
    std::size_t bin_of(double value) const;
    std::string label(std::size_t bin) const;

private:
    std::vector<double> edges_;
};

/// At most n bins cut at the i/n quantiles. Duplicate edges collapse and
/// edges that would leave a bin without any sample value are dropped, so
/// every bin holds at least one value.
QuantileBins quantile_bins(std::span<const double> values, std::size_t n);

struct Moments {
    double mean = 0.0;
    double std_dev = 0.0;
    /// Fisher-Pearson g1; 0 when the standard deviation is 0.
    double skewness = 0.0;
};

Moments moments(std::span<const double> values);

/// Shortest round-trip decimal text of a double; plain (no exponent) for
/// magnitudes in [1e-9, 1e16).
std::string format_number(double value);

}  // namespace tabcheck
