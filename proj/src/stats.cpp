#include "tabcheck/stats.hpp"

#include <algorithm>
#include <cstdio>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>

#include "tabcheck/error.hpp"

namespace tabcheck {

Histogram::Histogram(std::vector<std::string> bin_labels, std::vector<double> proportions)
    : labels_(std::move(bin_labels)), proportions_(std::move(proportions)) {
    if (labels_.size() != proportions_.size()) {
        throw ContractError("Histogram: labels and proportions differ in length");
    }
    double total = 0.0;
    for (double p : proportions_) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ContractError("Histogram: proportion outside [0, 1]");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ContractError("Histogram: proportions sum to " + format_number(total));
    }
}

Histogram Histogram::from_counts(std::vector<std::string> bin_labels,
                                 std::span<const double> counts) {
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    if (!(total > 0.0)) {
        throw ContractError("Histogram: counts sum to zero");
    }
    std::vector<double> p(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        p[i] = counts[i] / total;
    }
    return Histogram(std::move(bin_labels), std::move(p));
}

std::pair<Histogram, Histogram> aligned_category_histograms(std::span<const std::string> reference,
                                                            std::span<const std::string> current) {
    std::map<std::string, std::pair<double, double>> counts;
    for (const auto& v : reference) {
        counts[v].first += 1.0;
    }
    for (const auto& v : current) {
        counts[v].second += 1.0;
    }
    std::vector<std::string> labels;
    std::vector<double> a;
    std::vector<double> b;
    for (const auto& [label, c] : counts) {
        labels.push_back(label);
        a.push_back(c.first);
        b.push_back(c.second);
    }
    return {Histogram::from_counts(labels, a), Histogram::from_counts(labels, b)};
}

std::string_view to_string(DriftMethod method) {
    return method == DriftMethod::EMD ? "EMD" : "PSI";
}

DriftScore psi(const Histogram& reference, const Histogram& current) {
    if (reference.bin_labels() != current.bin_labels()) {
        throw ContractError("psi: histograms have different bin labels");
    }
    double total = 0.0;
    const auto& p = reference.proportions();
    const auto& q = current.proportions();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi = std::max(p[i], kPsiFloor);
        const double qi = std::max(q[i], kPsiFloor);
        total += (qi - pi) * (std::log(qi) - std::log(pi));
    }
    return {std::max(total, 0.0), DriftMethod::PSI};
}

DriftScore emd_normalized(std::span<const double> reference, std::span<const double> current) {
    if (reference.empty() || current.empty()) {
        throw ContractError("emd_normalized: empty sample");
    }
    std::vector<double> a(reference.begin(), reference.end());
    std::vector<double> b(current.begin(), current.end());
    for (double v : a) {
        if (!std::isfinite(v)) throw ContractError("emd_normalized: non-finite value");
    }
    for (double v : b) {
        if (!std::isfinite(v)) throw ContractError("emd_normalized: non-finite value");
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double lo = std::min(a.front(), b.front());
    const double hi = std::max(a.back(), b.back());
    const double range = hi - lo;
    if (!(range > 0.0)) {
        return {0.0, DriftMethod::EMD};
    }
    // Integral of |F_a - F_b| over the merged support.
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double prev = lo;
    double total = 0.0;
    while (i < a.size() || j < b.size()) {
        double x;
        if (j >= b.size() || (i < a.size() && a[i] <= b[j])) {
            x = a[i];
        } else {
            x = b[j];
        }
        const double fa = static_cast<double>(i) / na;
        const double fb = static_cast<double>(j) / nb;
        total += std::abs(fa - fb) * ((x - lo) / range - (prev - lo) / range);
        prev = x;
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
    }
    return {std::clamp(total, 0.0, 1.0), DriftMethod::EMD};
}

double brier_score(std::span<const std::vector<double>> probabilities,
                   std::span<const std::string> labels, std::span<const std::string> classes) {
    if (probabilities.size() != labels.size()) {
        throw ContractError("brier_score: " + std::to_string(probabilities.size()) +
                            " probability rows vs " + std::to_string(labels.size()) + " labels");
    }
    if (labels.empty()) {
        throw ContractError("brier_score: empty input");
    }
    double total = 0.0;
    for (std::size_t r = 0; r < labels.size(); ++r) {
        const auto& row = probabilities[r];
        if (row.size() != classes.size()) {
            throw ContractError("brier_score: probability row width differs from class count");
        }
        const auto it = std::find(classes.begin(), classes.end(), labels[r]);
        if (it == classes.end()) {
            throw ContractError("brier_score: label '" + labels[r] + "' not in class list");
        }
        const auto y = static_cast<std::size_t>(it - classes.begin());
        for (std::size_t c = 0; c < classes.size(); ++c) {
            const double d = row[c] - (c == y ? 1.0 : 0.0);
            total += d * d;
        }
    }
    return total / static_cast<double>(labels.size());
}

std::vector<CalibrationBin> calibration_bins(std::span<const double> probabilities,
                                             std::span<const bool> is_class, std::size_t n_bins) {
    if (n_bins < 2) {
        throw ContractError("calibration_bins: n_bins must be >= 2");
    }
    if (probabilities.size() != is_class.size()) {
        throw ContractError("calibration_bins: length mismatch");
    }
    std::vector<double> sum_p(n_bins, 0.0);
    std::vector<double> sum_y(n_bins, 0.0);
    std::vector<std::size_t> count(n_bins, 0);
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        const double p = probabilities[i];
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ContractError("calibration_bins: probability outside [0, 1]");
        }
        auto bin = static_cast<std::size_t>(p * static_cast<double>(n_bins));
        bin = std::min(bin, n_bins - 1);
        sum_p[bin] += p;
        sum_y[bin] += is_class[i] ? 1.0 : 0.0;
        ++count[bin];
    }
    std::vector<CalibrationBin> out;
    for (std::size_t b = 0; b < n_bins; ++b) {
        if (count[b] == 0) {
            continue;
        }
        const double n = static_cast<double>(count[b]);
        out.push_back({sum_p[b] / n, sum_y[b] / n, count[b]});
    }
    return out;
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) {
        throw ContractError("quantile of empty sample");
    }
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::size_t QuantileBins::bin_of(double value) const {
    return static_cast<std::size_t>(std::upper_bound(edges_.begin(), edges_.end(), value) -
                                    edges_.begin());
}

std::string QuantileBins::label(std::size_t bin) const {
    auto text = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        return std::string(buf);
    };
    const std::string lo = bin == 0 ? "-inf" : text(edges_[bin - 1]);
    const std::string hi = bin >= edges_.size() ? "+inf" : text(edges_[bin]);
    return "[" + lo + ", " + hi + ")";
}

QuantileBins quantile_bins(std::span<const double> values, std::size_t n) {
    if (values.empty()) {
        throw ContractError("quantile_bins: empty sample");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> candidates;
    for (std::size_t i = 1; i < n; ++i) {
        candidates.push_back(
            quantile_sorted(sorted, static_cast<double>(i) / static_cast<double>(n)));
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    std::vector<double> edges;
    auto count_below = [&](double x) {
        return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), x) -
                                        sorted.begin());
    };
    std::size_t taken = 0;
    for (double e : candidates) {
        const std::size_t below = count_below(e);
        if (below > taken) {
            edges.push_back(e);
            taken = below;
        }
    }
    while (!edges.empty() && count_below(edges.back()) == sorted.size()) {
        edges.pop_back();
    }
    return QuantileBins(std::move(edges));
}

Moments moments(std::span<const double> values) {
    Moments m;
    if (values.empty()) {
        return m;
    }
    const double n = static_cast<double>(values.size());
    m.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double m2 = 0.0;
    double m3 = 0.0;
    for (double v : values) {
        const double d = v - m.mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m.std_dev = std::sqrt(m2);
    // Relative floor so rounding noise on constant input does not produce a
    // spurious skew.
    const double scale = std::max(1.0, std::abs(m.mean));
    m.skewness = m.std_dev > 1e-12 * scale ? m3 / std::pow(m2, 1.5) : 0.0;
    if (m.std_dev <= 1e-12 * scale) {
        m.std_dev = 0.0;
    }
    return m;
}

std::string format_number(double value) {
    char buf[64];
    const double mag = std::abs(value);
    const bool plain = value == 0.0 || (mag >= 1e-9 && mag < 1e16);
    const auto [ptr, ec] = plain ? std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed)
                                 : std::to_chars(buf, buf + sizeof(buf), value);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

}  // namespace tabcheck
