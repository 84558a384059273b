#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace oracles {

/// Minimum-cost perfect matching on a square cost matrix (Hungarian
/// algorithm, potentials form). Returns the total cost.
inline double assignment_cost(const std::vector<std::vector<double>>& cost) {
    const std::size_t n = cost.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    double total = 0.0;
    for (std::size_t j = 1; j <= n; ++j) total += cost[p[j] - 1][j - 1];
    return total;
}

/// Wasserstein-1 between two empirical samples after combined min-max
/// scaling, by optimal transport: every point of `a` is replicated |b|
/// times and every point of `b` |a| times, so both sides carry equal unit
/// masses and the transport plan is an assignment.
inline double emd_by_transport(const std::vector<double>& a, const std::vector<double>& b) {
    double lo = a[0], hi = a[0];
    for (double x : a) lo = std::min(lo, x), hi = std::max(hi, x);
    for (double x : b) lo = std::min(lo, x), hi = std::max(hi, x);
    if (hi == lo) return 0.0;
    std::vector<double> left, right;
    for (double x : a) for (std::size_t k = 0; k < b.size(); ++k) left.push_back((x - lo) / (hi - lo));
    for (double y : b) for (std::size_t k = 0; k < a.size(); ++k) right.push_back((y - lo) / (hi - lo));
    std::vector<std::vector<double>> cost(left.size(), std::vector<double>(right.size()));
    for (std::size_t i = 0; i < left.size(); ++i)
        for (std::size_t j = 0; j < right.size(); ++j) cost[i][j] = std::abs(left[i] - right[j]);
    return assignment_cost(cost) / static_cast<double>(left.size());
}

}  // namespace oracles
