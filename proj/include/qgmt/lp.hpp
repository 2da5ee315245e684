#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "qgmt/errors.hpp"
#include "qgmt/linalg.hpp"

namespace qgmt {

struct LpResult {
    bool feasible = false;
    double value = 0.0;
    Vec x;
};

/// Dense two phase primal simplex for
///     min c . x   subject to   A x = b,  x >= 0.
/// Bland's rule throughout, which is plenty for the problem sizes produced
/// by the flat norm relaxation.
inline LpResult solve_lp(const Mat& a_in, const Vec& b_in, const Vec& c_in) {
    const int m = static_cast<int>(a_in.size());
    const int n = static_cast<int>(c_in.size());
    const double eps = 1e-9;

    Mat a = a_in;
    Vec b = b_in;
    for (int r = 0; r < m; ++r) {
        if (static_cast<int>(a[r].size()) != n) throw input_error("solve_lp: ragged constraint matrix");
        if (b[r] < 0.0) {
            for (auto& v : a[r]) v = -v;
            b[r] = -b[r];
        }
    }

    // Tableau columns: n structural + m artificial, plus the rhs.
    const int total = n + m;
    Mat t(m, Vec(total + 1, 0.0));
    std::vector<int> basis(m);
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < n; ++c) t[r][c] = a[r][c];
        t[r][n + r] = 1.0;
        t[r][total] = b[r];
        basis[r] = n + r;
    }

    auto pivot = [&](int pr, int pc) {
        const double pv = t[pr][pc];
        for (int c = 0; c <= total; ++c) t[pr][c] /= pv;
        for (int r = 0; r < m; ++r) {
            if (r == pr) continue;
            const double f = t[r][pc];
            if (f == 0.0) continue;
            for (int c = 0; c <= total; ++c) t[r][c] -= f * t[pr][c];
        }
        basis[pr] = pc;
    };

    auto run_phase = [&](const Vec& cost, int allowed_cols) {
        while (true) {
            Vec y(m, 0.0);
            for (int r = 0; r < m; ++r) y[r] = cost[basis[r]];
            int enter = -1;
            for (int c = 0; c < allowed_cols; ++c) {
                double reduced = cost[c];
                for (int r = 0; r < m; ++r) reduced -= y[r] * t[r][c];
                if (reduced < -eps) {
                    enter = c;
                    break; // Bland: smallest index
                }
            }
            if (enter < 0) return;
            int leave = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (int r = 0; r < m; ++r) {
                if (t[r][enter] > eps) {
                    const double ratio = t[r][total] / t[r][enter];
                    if (ratio < best_ratio - eps ||
                        (ratio < best_ratio + eps && (leave < 0 || basis[r] < basis[leave]))) {
                        best_ratio = ratio;
                        leave = r;
                    }
                }
            }
            if (leave < 0) throw solver_error("solve_lp: unbounded objective");
            pivot(leave, enter);
        }
    };

    Vec phase1(total, 0.0);
    for (int c = n; c < total; ++c) phase1[c] = 1.0;
    run_phase(phase1, total);
    double infeas = 0.0;
    for (int r = 0; r < m; ++r)
        if (basis[r] >= n) infeas += t[r][total];
    if (infeas > 1e-7) return {};

    // Drive leftover artificials out of the basis or drop their rows.
    for (int r = 0; r < m; ++r) {
        if (basis[r] < n) continue;
        int c = 0;
        while (c < n && std::abs(t[r][c]) <= eps) ++c;
        if (c < n) {
            pivot(r, c);
        } else {
            for (int cc = 0; cc <= total; ++cc) t[r][cc] = 0.0;
        }
    }

    Vec phase2(total, 0.0);
    for (int c = 0; c < n; ++c) phase2[c] = c_in[c];
    run_phase(phase2, n);

    LpResult res;
    res.feasible = true;
    res.x.assign(n, 0.0);
    for (int r = 0; r < m; ++r)
        if (basis[r] < n) res.x[basis[r]] = t[r][total];
    res.value = dot(res.x, c_in);
    return res;
}

} // namespace qgmt
