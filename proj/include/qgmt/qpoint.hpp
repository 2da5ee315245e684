#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "qgmt/assignment.hpp"
#include "qgmt/errors.hpp"
#include "qgmt/linalg.hpp"

namespace qgmt {

struct QAtom {
    Vec v;
    int mult = 1;
};

/// Unordered Q-tuple of points in R^n with positive integer multiplicities.
/// Atoms are stored lexicographically sorted with distinct position vectors,
/// which makes structural equality a term by term comparison.
struct QPoint {
    int q = 0;
    int n = 0;
    std::vector<QAtom> atoms;

    static QPoint from_atoms(int n, std::vector<QAtom> raw) {
        for (const auto& a : raw) {
            if (static_cast<int>(a.v.size()) != n)
                throw input_error("QPoint: atom dimension mismatch");
            if (a.mult <= 0) throw input_error("QPoint: nonpositive multiplicity");
        }
        std::sort(raw.begin(), raw.end(),
                  [](const QAtom& a, const QAtom& b) { return lex_less(a.v, b.v); });
        QPoint t;
        t.n = n;
        for (auto& a : raw) {
            if (!t.atoms.empty() && t.atoms.back().v == a.v)
                t.atoms.back().mult += a.mult;
            else
                t.atoms.push_back(std::move(a));
        }
        for (const auto& a : t.atoms) t.q += a.mult;
        if (t.q == 0) throw input_error("QPoint: empty");
        return t;
    }

    /// All Q position vectors, atom multiplicities expanded, canonical order.
    std::vector<Vec> expand() const {
        std::vector<Vec> out;
        out.reserve(q);
        for (const auto& a : atoms)
            for (int k = 0; k < a.mult; ++k) out.push_back(a.v);
        return out;
    }
};

inline bool operator==(const QAtom& a, const QAtom& b) { return a.mult == b.mult && a.v == b.v; }

inline bool operator==(const QPoint& a, const QPoint& b) {
    return a.q == b.q && a.n == b.n && a.atoms == b.atoms;
}

inline QPoint make_qpoint(int n, std::initializer_list<QAtom> atoms) {
    return QPoint::from_atoms(n, std::vector<QAtom>(atoms));
}

/// Q copies of a single point.
inline QPoint splat(const Vec& v, int q) {
    return QPoint::from_atoms(static_cast<int>(v.size()), {{v, q}});
}

/// Matching metric: sqrt of the minimum, over pairings of the two expanded
/// tuples, of the summed squared pair distances.
inline double distance(const QPoint& a, const QPoint& b) {
    if (a.q != b.q) throw input_error("distance: unequal total multiplicity");
    if (a.n != b.n) throw input_error("distance: unequal ambient dimension");
    const auto va = a.expand();
    const auto vb = b.expand();
    Mat cost(a.q, Vec(a.q, 0.0));
    for (int i = 0; i < a.q; ++i)
        for (int j = 0; j < a.q; ++j) cost[i][j] = dist2(va[i], vb[j]);
    const double total = assignment_cost(cost);
    return total > 0.0 ? std::sqrt(total) : 0.0;
}

/// The pairing realizing distance(a, b), lexicographically smallest optimum,
/// as indices into b.expand() for each entry of a.expand().
inline std::vector<int> matching(const QPoint& a, const QPoint& b) {
    if (a.q != b.q || a.n != b.n) throw input_error("matching: incompatible points");
    const auto va = a.expand();
    const auto vb = b.expand();
    Mat cost(a.q, Vec(a.q, 0.0));
    for (int i = 0; i < a.q; ++i)
        for (int j = 0; j < a.q; ++j) cost[i][j] = dist2(va[i], vb[j]);
    return lexmin_optimal_assignment(cost);
}

/// Multiplicity weighted mean of the atoms.
inline Vec center_of_mass(const QPoint& t) {
    Vec c(t.n, 0.0);
    for (const auto& a : t.atoms) axpy(c, static_cast<double>(a.mult), a.v);
    for (auto& x : c) x /= t.q;
    return c;
}

/// Largest pairwise distance of support points, zero for a single atom.
inline double diameter(const QPoint& t) {
    double best = 0.0;
    for (std::size_t i = 0; i < t.atoms.size(); ++i)
        for (std::size_t j = i + 1; j < t.atoms.size(); ++j)
            best = std::max(best, dist(t.atoms[i].v, t.atoms[j].v));
    return best;
}

/// Multiplicity carried by the support point within tol of v, zero when no
/// support point is that close.  More than one candidate is an ambiguity.
inline int multiplicity(const QPoint& t, const Vec& v, double tol) {
    if (static_cast<int>(v.size()) != t.n) throw input_error("multiplicity: dimension mismatch");
    int found = -1;
    for (std::size_t i = 0; i < t.atoms.size(); ++i) {
        if (dist(t.atoms[i].v, v) <= tol) {
            if (found >= 0)
                throw ambiguity_error("multiplicity: several support points within tol");
            found = static_cast<int>(i);
        }
    }
    return found >= 0 ? t.atoms[found].mult : 0;
}

/// Collapses clusters of support points linked by distances <= tol into their
/// multiplicity weighted means.
inline QPoint merge_close(const QPoint& t, double tol) {
    const int k = static_cast<int>(t.atoms.size());
    std::vector<int> parent(k);
    for (int i = 0; i < k; ++i) parent[i] = i;
    std::vector<int> stack;
    auto find = [&](int i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            if (dist(t.atoms[i].v, t.atoms[j].v) <= tol) parent[find(i)] = find(j);

    std::vector<QAtom> merged;
    for (int root = 0; root < k; ++root) {
        if (find(root) != root) continue;
        Vec c(t.n, 0.0);
        int mult = 0;
        for (int i = 0; i < k; ++i) {
            if (find(i) != root) continue;
            axpy(c, static_cast<double>(t.atoms[i].mult), t.atoms[i].v);
            mult += t.atoms[i].mult;
        }
        for (auto& x : c) x /= mult;
        merged.push_back({std::move(c), mult});
    }
    return QPoint::from_atoms(t.n, std::move(merged));
}

/// G-distance from Q copies of the origin, the natural absolute value.
inline double qpoint_norm(const QPoint& t) {
    double s = 0.0;
    for (const auto& a : t.atoms) s += a.mult * norm2(a.v);
    return std::sqrt(s);
}

} // namespace qgmt
