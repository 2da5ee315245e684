#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qgmt/qpoint.hpp"

namespace qgmt {

/// Reference matching distance by enumerating all Q! pairings.  Exponential,
/// for validation at small Q only.
inline double brute_force_distance(const QPoint& a, const QPoint& b) {
    if (a.q != b.q || a.n != b.n) throw input_error("brute_force_distance: incompatible points");
    const auto va = a.expand();
    const auto vb = b.expand();
    std::vector<int> perm(a.q);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (int i = 0; i < a.q; ++i) total += dist2(va[i], vb[perm[i]]);
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::sqrt(best);
}

/// Reference chain clustering by breadth-first closure of the threshold
/// relation, independent of the union-find route.
inline std::vector<std::vector<int>> brute_force_clusters(const std::vector<Vec>& points,
                                                          double link) {
    const int k = static_cast<int>(points.size());
    std::vector<char> assigned(k, false);
    std::vector<std::vector<int>> clusters;
    for (int seed = 0; seed < k; ++seed) {
        if (assigned[seed]) continue;
        std::vector<int> cluster{seed};
        assigned[seed] = true;
        for (std::size_t head = 0; head < cluster.size(); ++head) {
            for (int other = 0; other < k; ++other) {
                if (assigned[other]) continue;
                if (dist(points[cluster[head]], points[other]) <= link) {
                    assigned[other] = true;
                    cluster.push_back(other);
                }
            }
        }
        std::sort(cluster.begin(), cluster.end());
        clusters.push_back(std::move(cluster));
    }
    return clusters;
}

} // namespace qgmt
