#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "qgmt/errors.hpp"
#include "qgmt/linalg.hpp"

namespace qgmt {

/// Minimum cost perfect matching on a square cost matrix, O(n^3), via
/// row/column potentials and shortest augmenting paths.
/// row_to_col, when given, receives the matched column of each row.
inline double assignment_cost(const Mat& cost, std::vector<int>* row_to_col = nullptr) {
    const int n = static_cast<int>(cost.size());
    if (n == 0) {
        if (row_to_col) row_to_col->clear();
        return 0.0;
    }
    for (const auto& row : cost)
        if (static_cast<int>(row.size()) != n) throw input_error("assignment_cost: matrix not square");

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0); // match[col] = row, 1-based, 0 = free

    for (int i = 1; i <= n; ++i) {
        std::vector<double> minv(n + 1, inf);
        std::vector<int> way(n + 1, 0);
        std::vector<char> used(n + 1, false);
        int j0 = 0;
        match[0] = i;
        do {
            used[j0] = true;
            const int i0 = match[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
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
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> assign(n, -1);
    for (int j = 1; j <= n; ++j)
        if (match[j] > 0) assign[match[j] - 1] = j - 1;
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += cost[i][assign[i]];
    if (row_to_col) *row_to_col = assign;
    return total;
}

/// Among all minimum cost assignments, returns the one whose column sequence
/// (sigma(0), sigma(1), ...) is lexicographically smallest.  Used wherever a
/// deterministic representative of a possibly non unique optimum is needed.
inline std::vector<int> lexmin_optimal_assignment(const Mat& cost) {
    const int n = static_cast<int>(cost.size());
    std::vector<int> result(n, -1);
    if (n == 0) return result;

    const double best = assignment_cost(cost);
    const double tol = 1e-9 * (1.0 + std::abs(best));

    std::vector<char> col_used(n, false);
    double prefix = 0.0;
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            if (col_used[c]) continue;
            const int k = n - r - 1;
            double completion = 0.0;
            if (k > 0) {
                Mat sub(k, Vec(k, 0.0));
                int si = 0;
                for (int rr = r + 1; rr < n; ++rr, ++si) {
                    int sj = 0;
                    for (int cc = 0; cc < n; ++cc) {
                        if (col_used[cc] || cc == c) continue;
                        sub[si][sj++] = cost[rr][cc];
                    }
                }
                completion = assignment_cost(sub);
            }
            if (prefix + cost[r][c] + completion <= best + tol) {
                result[r] = c;
                col_used[c] = true;
                prefix += cost[r][c];
                break;
            }
        }
        if (result[r] < 0) throw solver_error("lexmin_optimal_assignment: no completion found");
    }
    return result;
}

} // namespace qgmt
