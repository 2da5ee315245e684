#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "qgmt/domain.hpp"
#include "qgmt/errors.hpp"
#include "qgmt/qpoint.hpp"

namespace qgmt {

/// Q-valued function known at the sample points of a domain.
struct SampledQField {
    SampledDomain domain;
    std::vector<QPoint> samples;
    int q = 0;
    int n = 0;

    void validate() const {
        if (samples.size() != domain.points.size())
            throw input_error("SampledQField: one sample per domain point required");
        for (const auto& s : samples) {
            if (s.q != q) throw invariant_error("SampledQField: sample with wrong total multiplicity");
            if (s.n != n) throw invariant_error("SampledQField: sample with wrong ambient dimension");
        }
    }
};

/// Edgewise slope bound: max over domain edges of G(u(p), u(q)) / |p - q|.
/// This is the computable stand-in for the Lipschitz constant; it never
/// exceeds the true one on the sampled graph.
inline double lipschitz_estimate(const SampledQField& u) {
    u.validate();
    double best = 0.0;
    for (std::size_t e = 0; e < u.domain.edges.size(); ++e) {
        const double len = u.domain.edge_lengths[e];
        if (!(len > 0.0)) throw input_error("lipschitz_estimate: zero length edge");
        const auto& [a, b] = u.domain.edges[e];
        best = std::max(best, distance(u.samples[a], u.samples[b]) / len);
    }
    return best;
}

/// Splits the support of t into chain clusters linked by gaps <= 4h.  Each
/// part has diameter <= 4 q h and distinct parts are separated by > 4h.
inline std::vector<QPoint> cluster_values(const QPoint& t, double h) {
    if (!(h >= 0.0)) throw input_error("cluster_values: negative h");
    const int k = static_cast<int>(t.atoms.size());
    std::vector<int> parent(k);
    for (int i = 0; i < k; ++i) parent[i] = i;
    auto find = [&](int i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            if (dist(t.atoms[i].v, t.atoms[j].v) <= 4.0 * h) parent[find(i)] = find(j);

    std::vector<QPoint> parts;
    for (int root = 0; root < k; ++root) {
        if (find(root) != root) continue;
        std::vector<QAtom> atoms;
        for (int i = 0; i < k; ++i)
            if (find(i) == root) atoms.push_back(t.atoms[i]);
        parts.push_back(QPoint::from_atoms(t.n, std::move(atoms)));
    }
    std::sort(parts.begin(), parts.end(),
              [](const QPoint& a, const QPoint& b) { return lex_less(a.atoms[0].v, b.atoms[0].v); });
    return parts;
}

namespace detail {

/// Spanning tree edges (parent, child) in BFS order from root, over the
/// domain adjacency; child order follows neighbor index order.
inline std::vector<std::array<int, 2>> bfs_tree(const SampledDomain& d, int root) {
    const auto adj = d.adjacency();
    std::vector<char> seen(d.size(), false);
    std::vector<std::array<int, 2>> tree;
    std::queue<int> frontier;
    frontier.push(root);
    seen[root] = true;
    while (!frontier.empty()) {
        const int p = frontier.front();
        frontier.pop();
        for (int q : adj[p]) {
            if (seen[q]) continue;
            seen[q] = true;
            tree.push_back({p, q});
            frontier.push(q);
        }
    }
    for (char s : seen)
        if (!s) throw input_error("field domain is not connected");
    return tree;
}

} // namespace detail

/// One consistent ordering of the Q values at every sample.  branches[p] is a
/// list of Q vectors; summing unit atoms over it reproduces samples[p].
/// Samples are grouped into pieces on which the labeling realizes the
/// matching metric across every interior edge.
struct SheetSelection {
    int q = 0;
    std::vector<Mat> branches;
    std::vector<int> piece_of;
    std::vector<std::vector<int>> pieces;

    bool single_piece() const { return pieces.size() == 1; }
};

/// Orders the values of u into Q branches by propagating the optimal matching
/// along a spanning tree from sample 0, with deterministic tie resolution.
/// Edges whose induced pairing fails to realize the matching metric cut the
/// domain into separate pieces.
inline SheetSelection select_sheets(const SampledQField& u) {
    u.validate();
    SheetSelection sel;
    sel.q = u.q;
    const int np = u.domain.size();
    sel.branches.assign(np, Mat());
    if (np == 0) return sel;

    sel.branches[0] = u.samples[0].expand();
    for (const auto& [p, c] : detail::bfs_tree(u.domain, 0)) {
        const auto& parent = sel.branches[p];
        const auto child = u.samples[c].expand();
        Mat cost(u.q, Vec(u.q, 0.0));
        for (int i = 0; i < u.q; ++i)
            for (int j = 0; j < u.q; ++j) cost[i][j] = dist2(parent[i], child[j]);
        const auto sigma = lexmin_optimal_assignment(cost);
        Mat ordered(u.q);
        for (int l = 0; l < u.q; ++l) ordered[l] = child[sigma[l]];
        sel.branches[c] = std::move(ordered);
    }

    // An edge is consistent when the branch pairing across it is optimal.
    std::vector<char> consistent(u.domain.edges.size(), 0);
    for (std::size_t e = 0; e < u.domain.edges.size(); ++e) {
        const auto& a = sel.branches[u.domain.edges[e][0]];
        const auto& b = sel.branches[u.domain.edges[e][1]];
        double pair_cost = 0.0;
        for (int l = 0; l < u.q; ++l) pair_cost += dist2(a[l], b[l]);
        const double opt = distance(u.samples[u.domain.edges[e][0]], u.samples[u.domain.edges[e][1]]);
        const double opt2 = opt * opt;
        consistent[e] = pair_cost <= opt2 + 1e-9 * (1.0 + opt2);
    }

    // Pieces: components over consistent edges, refined until no inconsistent
    // edge is interior to a piece.  Spanning tree edges realize the matching
    // by construction; only cycle-closing edges can fail, and when one does
    // its higher endpoint is singled out.
    std::vector<char> singled(np, 0);
    std::vector<int> parent(np);
    auto find = [&](int i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };
    for (bool refined = true; refined;) {
        refined = false;
        for (int i = 0; i < np; ++i) parent[i] = i;
        for (std::size_t e = 0; e < u.domain.edges.size(); ++e) {
            const auto& [a, b] = u.domain.edges[e];
            if (consistent[e] && !singled[a] && !singled[b]) parent[find(a)] = find(b);
        }
        for (std::size_t e = 0; e < u.domain.edges.size(); ++e) {
            const auto& [a, b] = u.domain.edges[e];
            if (consistent[e] || singled[a] || singled[b] || find(a) != find(b)) continue;
            singled[std::max(a, b)] = 1;
            refined = true;
            break;
        }
    }
    sel.piece_of.assign(np, -1);
    for (int i = 0; i < np; ++i) {
        const int root = singled[i] ? i : find(i);
        if (sel.piece_of[root] < 0) {
            sel.piece_of[root] = static_cast<int>(sel.pieces.size());
            sel.pieces.emplace_back();
        }
        sel.piece_of[i] = sel.piece_of[root];
        sel.pieces[sel.piece_of[i]].push_back(i);
    }
    return sel;
}

/// Splits u into two fields with disjoint supports when two values at sample
/// p0 are separated by more than 3 (Q - 1) times the slope bound times the
/// domain diameter.  Returns nothing when the gap test fails or when no
/// consistent split exists at the sampled resolution.
inline std::optional<std::pair<SampledQField, SampledQField>>
decompose(const SampledQField& u, int p0, int i, int j) {
    u.validate();
    if (p0 < 0 || p0 >= u.domain.size()) throw input_error("decompose: sample index out of range");
    const auto& t0 = u.samples[p0];
    const int na = static_cast<int>(t0.atoms.size());
    if (i < 0 || i >= na || j < 0 || j >= na) throw input_error("decompose: atom index out of range");
    if (i == j) throw input_error("decompose: atom indices must differ");

    const double lhat = lipschitz_estimate(u);
    const double diam = u.domain.diameter();
    const double link = 3.0 * lhat * diam;
    const double gap = dist(t0.atoms[i].v, t0.atoms[j].v);
    if (!(gap > (u.q - 1) * link)) return std::nullopt;

    // Chain clusters with threshold `link` at one sample.  Atoms i and j of
    // t0 land in different clusters because a connecting chain would need
    // Q - 1 links at most.
    auto clusters_at = [&](const QPoint& t) {
        const int k = static_cast<int>(t.atoms.size());
        std::vector<int> parent(k);
        for (int a = 0; a < k; ++a) parent[a] = a;
        auto find = [&](int a) {
            while (parent[a] != a) {
                parent[a] = parent[parent[a]];
                a = parent[a];
            }
            return a;
        };
        for (int a = 0; a < k; ++a)
            for (int b = a + 1; b < k; ++b)
                if (dist(t.atoms[a].v, t.atoms[b].v) <= link) parent[find(a)] = find(b);
        std::vector<int> root(k);
        for (int a = 0; a < k; ++a) root[a] = find(a);
        return root;
    };

    const int np = u.domain.size();
    // label[p][atom] = 0 for the part of atom i, 1 for the rest.
    std::vector<std::vector<int>> label(np);
    for (int p = 0; p < np; ++p) label[p].assign(u.samples[p].atoms.size(), -1);
    {
        const auto root = clusters_at(t0);
        for (int a = 0; a < na; ++a) label[p0][a] = (root[a] == root[i]) ? 0 : 1;
        if (label[p0][j] != 1) return std::nullopt;
    }

    auto atom_of_copy = [&](const QPoint& t, int copy) {
        for (std::size_t a = 0; a < t.atoms.size(); ++a) {
            if (copy < t.atoms[a].mult) return static_cast<int>(a);
            copy -= t.atoms[a].mult;
        }
        throw invariant_error("decompose: copy index out of range");
    };

    for (const auto& [p, c] : detail::bfs_tree(u.domain, p0)) {
        const auto sigma = matching(u.samples[p], u.samples[c]);
        std::vector<int> votes(u.samples[c].atoms.size(), -1);
        for (int copy = 0; copy < u.q; ++copy) {
            const int from = atom_of_copy(u.samples[p], copy);
            const int to = atom_of_copy(u.samples[c], sigma[copy]);
            const int lab = label[p][from];
            if (votes[to] >= 0 && votes[to] != lab) return std::nullopt;
            votes[to] = lab;
        }
        // Close the labels under the per sample gap clusters.
        const auto root = clusters_at(u.samples[c]);
        for (std::size_t a = 0; a < votes.size(); ++a) {
            for (std::size_t b = 0; b < votes.size(); ++b) {
                if (root[a] != root[b]) continue;
                if (votes[a] >= 0 && votes[b] >= 0 && votes[a] != votes[b]) return std::nullopt;
                if (votes[a] < 0) votes[a] = votes[b];
            }
        }
        for (std::size_t a = 0; a < votes.size(); ++a) {
            if (votes[a] < 0) return std::nullopt;
            label[c][a] = votes[a];
        }
    }

    int q1 = 0;
    for (std::size_t a = 0; a < t0.atoms.size(); ++a)
        if (label[p0][a] == 0) q1 += t0.atoms[a].mult;

    SampledQField u1{u.domain, {}, q1, u.n};
    SampledQField u2{u.domain, {}, u.q - q1, u.n};
    for (int p = 0; p < np; ++p) {
        std::vector<QAtom> a1, a2;
        int mass1 = 0;
        for (std::size_t a = 0; a < u.samples[p].atoms.size(); ++a) {
            if (label[p][a] == 0) {
                a1.push_back(u.samples[p].atoms[a]);
                mass1 += u.samples[p].atoms[a].mult;
            } else {
                a2.push_back(u.samples[p].atoms[a]);
            }
        }
        if (mass1 != q1) return std::nullopt;
        u1.samples.push_back(QPoint::from_atoms(u.n, std::move(a1)));
        u2.samples.push_back(QPoint::from_atoms(u.n, std::move(a2)));
    }
    return std::make_pair(std::move(u1), std::move(u2));
}

/// Central difference gradient at an interior grid point, one n x m slope
/// matrix per branch, flattened row major into a Q-point of R^(n m).
/// Requires values separated enough that the branch matching is unambiguous.
inline QPoint finite_difference_gradient(const SampledQField& u, int p) {
    u.validate();
    if (!u.domain.grid) throw input_error("finite_difference_gradient: regular grid required");
    const GridSpec& g = *u.domain.grid;
    if (u.domain.size() != g.size())
        throw input_error("finite_difference_gradient: clipped grids are not supported");
    if (p < 0 || p >= u.domain.size())
        throw input_error("finite_difference_gradient: sample index out of range");
    const int m = g.dim();
    const auto idx = g.unflatten(u.domain.grid_flat[p]);
    for (int a = 0; a < m; ++a)
        if (idx[a] == 0 || idx[a] == g.shape[a] - 1)
            throw input_error("finite_difference_gradient: boundary sample");

    const double lhat = lipschitz_estimate(u);
    double hmax = 0.0;
    for (int a = 0; a < m; ++a) hmax = std::max(hmax, g.spacing[a]);

    std::vector<int> stencil{p};
    for (int a = 0; a < m; ++a) {
        auto lo = idx, hi = idx;
        --lo[a];
        ++hi[a];
        stencil.push_back(static_cast<int>(g.flatten(lo)));
        stencil.push_back(static_cast<int>(g.flatten(hi)));
    }
    for (int s : stencil) {
        const auto& t = u.samples[s];
        for (std::size_t a = 0; a < t.atoms.size(); ++a)
            for (std::size_t b = a + 1; b < t.atoms.size(); ++b)
                if (dist(t.atoms[a].v, t.atoms[b].v) <= 2.0 * lhat * hmax)
                    throw ambiguity_error("finite_difference_gradient: branch matching is ambiguous");
    }

    const auto center = u.samples[p].expand();
    Mat grad(u.q, Vec(u.n * m, 0.0));
    for (int a = 0; a < m; ++a) {
        auto lo = idx, hi = idx;
        --lo[a];
        ++hi[a];
        const auto back = matching(u.samples[p], u.samples[static_cast<int>(g.flatten(lo))]);
        const auto fwd = matching(u.samples[p], u.samples[static_cast<int>(g.flatten(hi))]);
        const auto vlo = u.samples[static_cast<int>(g.flatten(lo))].expand();
        const auto vhi = u.samples[static_cast<int>(g.flatten(hi))].expand();
        for (int l = 0; l < u.q; ++l)
            for (int r = 0; r < u.n; ++r)
                grad[l][r * m + a] = (vhi[fwd[l]][r] - vlo[back[l]][r]) / (2.0 * g.spacing[a]);
    }

    // Copies of one value must agree on the slope for the result to be a
    // well defined Q-point of slopes.
    std::vector<QAtom> atoms;
    int copy = 0;
    for (const auto& atom : u.samples[p].atoms) {
        for (int k = 1; k < atom.mult; ++k)
            if (dist(grad[copy], grad[copy + k]) > 1e-9)
                throw ambiguity_error("finite_difference_gradient: equal values with distinct slopes");
        atoms.push_back({grad[copy], atom.mult});
        copy += atom.mult;
    }
    return QPoint::from_atoms(u.n * m, std::move(atoms));
}

} // namespace qgmt
