#include "tabcheck/trust_score.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "tabcheck/error.hpp"

namespace tabcheck {

namespace {

double distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace

std::vector<double> trust_scores(const FeatureRows& reference, std::span<const std::string> labels,
                                 const FeatureRows& eval, std::span<const std::string> predicted,
                                 const TrustParams& params,
                                 std::span<const std::optional<std::size_t>> exclude) {
    if (params.k < 1) {
        throw ContractError("trust_scores: k must be >= 1");
    }
    if (!(params.alpha >= 0.0 && params.alpha < 1.0)) {
        throw ContractError("trust_scores: alpha must be in [0, 1)");
    }
    if (reference.size() != labels.size() || eval.size() != predicted.size()) {
        throw ContractError("trust_scores: row/label length mismatch");
    }
    if (!exclude.empty() && exclude.size() != eval.size()) {
        throw ContractError("trust_scores: exclusion list length mismatch");
    }
    if (reference.empty()) {
        throw InsufficientData("trust_scores: no reference rows");
    }
    const std::size_t dims = reference.front().size();
    if (dims < 2) {
        throw ContractError("trust_scores: need at least 2 features");
    }
    for (const auto* rows : {&reference, &eval}) {
        for (const auto& r : *rows) {
            if (r.size() != dims) throw ContractError("trust_scores: ragged feature rows");
            for (double v : r) {
                if (!std::isfinite(v)) throw ContractError("trust_scores: non-finite feature value");
            }
        }
    }

    std::vector<double> lo(dims, std::numeric_limits<double>::infinity());
    std::vector<double> hi(dims, -std::numeric_limits<double>::infinity());
    for (const auto& r : reference) {
        for (std::size_t d = 0; d < dims; ++d) {
            lo[d] = std::min(lo[d], r[d]);
            hi[d] = std::max(hi[d], r[d]);
        }
    }
    auto scale = [&](const std::vector<double>& r) {
        std::vector<double> s(dims);
        for (std::size_t d = 0; d < dims; ++d) {
            const double range = hi[d] - lo[d];
            s[d] = range > 0.0 ? (r[d] - lo[d]) / range : 0.0;
        }
        return s;
    };

    // Retained reference points per class, as indices into `reference`.
    std::map<std::string, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        members[labels[i]].push_back(i);
    }
    if (members.size() < 2) {
        throw InsufficientData("trust_scores: reference rows contain fewer than 2 classes");
    }
    FeatureRows ref(reference.size());
    for (std::size_t i = 0; i < reference.size(); ++i) ref[i] = scale(reference[i]);

    if (params.alpha > 0.0) {
        for (auto& [cls, idx] : members) {
            const std::size_t n = idx.size();
            const auto drop = static_cast<std::size_t>(std::ceil(params.alpha * static_cast<double>(n)));
            if (drop == 0) continue;
            std::vector<std::pair<double, std::size_t>> radius;
            for (auto i : idx) {
                std::vector<double> d;
                for (auto j : idx) {
                    if (j != i) d.push_back(distance(ref[i], ref[j]));
                }
                double kth = std::numeric_limits<double>::infinity();
                if (!d.empty()) {
                    const std::size_t rank = std::min(params.k, d.size()) - 1;
                    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(rank), d.end());
                    kth = d[rank];
                }
                radius.emplace_back(kth, i);
            }
            // Largest radius first; index breaks ties.
            std::sort(radius.begin(), radius.end(), [](const auto& a, const auto& b) {
                return a.first != b.first ? a.first > b.first : a.second < b.second;
            });
            std::vector<std::size_t> kept;
            for (std::size_t r = std::min(drop, n); r < radius.size(); ++r) kept.push_back(radius[r].second);
            std::sort(kept.begin(), kept.end());
            idx = std::move(kept);
        }
    }

    std::vector<double> out(eval.size());
    for (std::size_t e = 0; e < eval.size(); ++e) {
        const auto x = scale(eval[e]);
        const std::size_t skip = !exclude.empty() && exclude[e] ? *exclude[e] : reference.size();
        const auto it = members.find(predicted[e]);
        if (it == members.end() || it->second.empty()) {
            throw InsufficientData("trust_scores: predicted class '" + predicted[e] +
                                   "' has no retained reference points");
        }
        double d_pred = std::numeric_limits<double>::infinity();
        double d_other = std::numeric_limits<double>::infinity();
        for (const auto& [cls, idx] : members) {
            double& target = cls == predicted[e] ? d_pred : d_other;
            for (auto i : idx) {
                if (i == skip) continue;
                target = std::min(target, distance(x, ref[i]));
            }
        }
        if (!std::isfinite(d_pred) || !std::isfinite(d_other)) {
            throw InsufficientData("trust_scores: a class has no usable reference points for row " +
                                   std::to_string(e));
        }
        out[e] = d_other / std::max(d_pred, params.epsilon);
    }
    return out;
}

}  // namespace tabcheck
