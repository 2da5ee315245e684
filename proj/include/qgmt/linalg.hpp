#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "qgmt/errors.hpp"

namespace qgmt {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>; // row major

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return dot(a, a); }

inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline double dist2(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double dist(const Vec& a, const Vec& b) { return std::sqrt(dist2(a, b)); }

inline Vec add(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec scaled(const Vec& a, double s) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
    return r;
}

inline void axpy(Vec& y, double a, const Vec& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

inline bool lex_less(const Vec& a, const Vec& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

inline Mat zeros(std::size_t rows, std::size_t cols) {
    return Mat(rows, Vec(cols, 0.0));
}

inline Vec mat_vec(const Mat& m, const Vec& x) {
    Vec r(m.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i) r[i] = dot(m[i], x);
    return r;
}

inline double frobenius_norm(const Mat& m) {
    double s = 0.0;
    for (const auto& row : m) s += norm2(row);
    return std::sqrt(s);
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
/// Returns false when A is numerically singular.
inline bool solve_linear(Mat a, Vec b, Vec& x) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-300) return false;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t ri = n; ri-- > 0;) {
        double s = b[ri];
        for (std::size_t c = ri + 1; c < n; ++c) s -= a[ri][c] * x[c];
        x[ri] = s / a[ri][ri];
    }
    return true;
}

inline double determinant(Mat a) {
    const std::size_t n = a.size();
    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (a[piv][col] == 0.0) return 0.0;
        if (piv != col) {
            std::swap(a[piv], a[col]);
            det = -det;
        }
        det *= a[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
        }
    }
    return det;
}

inline double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

/// Euclidean volume of the simplex spanned by verts (m + 1 ordered points),
/// computed as sqrt(det of the edge Gram matrix) / m!.
inline double simplex_volume(const std::vector<Vec>& verts) {
    const int m = static_cast<int>(verts.size()) - 1;
    if (m < 0) throw input_error("simplex_volume: empty vertex list");
    if (m == 0) return 1.0;
    std::vector<Vec> edges(m);
    for (int i = 0; i < m; ++i) edges[i] = sub(verts[i + 1], verts[0]);
    Mat gram = zeros(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) gram[i][j] = dot(edges[i], edges[j]);
    const double g = determinant(gram);
    return g > 0.0 ? std::sqrt(g) / factorial(m) : 0.0;
}

inline double longest_edge(const std::vector<Vec>& verts) {
    double best = 0.0;
    for (std::size_t i = 0; i < verts.size(); ++i)
        for (std::size_t j = i + 1; j < verts.size(); ++j)
            best = std::max(best, dist(verts[i], verts[j]));
    return best;
}

} // namespace qgmt
