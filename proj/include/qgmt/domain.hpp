#pragma once

#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "qgmt/errors.hpp"
#include "qgmt/linalg.hpp"

namespace qgmt {

/// Regular grid description: shape[i] points per axis starting at origin[i]
/// with step spacing[i].
struct GridSpec {
    std::vector<int> shape;
    Vec origin;
    Vec spacing;

    int dim() const { return static_cast<int>(shape.size()); }

    long long size() const {
        long long s = 1;
        for (int k : shape) s *= k;
        return s;
    }

    Vec point(const std::vector<int>& idx) const {
        Vec p(dim());
        for (int a = 0; a < dim(); ++a) p[a] = origin[a] + spacing[a] * idx[a];
        return p;
    }

    std::vector<int> unflatten(long long flat) const {
        std::vector<int> idx(dim());
        for (int a = dim() - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(flat % shape[a]);
            flat /= shape[a];
        }
        return idx;
    }

    long long flatten(const std::vector<int>& idx) const {
        long long f = 0;
        for (int a = 0; a < dim(); ++a) f = f * shape[a] + idx[a];
        return f;
    }
};

/// Finite point set with an explicit adjacency graph.  Regular grids keep
/// their GridSpec; clipped grids also map each kept point to its flat grid
/// index so neighbor queries survive the clipping.
struct SampledDomain {
    Mat points;
    std::vector<std::array<int, 2>> edges;
    Vec edge_lengths;
    std::optional<GridSpec> grid;
    std::vector<long long> grid_flat; // per point, only when grid is set

    int dim() const { return points.empty() ? 0 : static_cast<int>(points[0].size()); }

    int size() const { return static_cast<int>(points.size()); }

    std::vector<std::vector<int>> adjacency() const {
        std::vector<std::vector<int>> adj(points.size());
        for (const auto& e : edges) {
            adj[e[0]].push_back(e[1]);
            adj[e[1]].push_back(e[0]);
        }
        return adj;
    }

    bool connected() const {
        if (points.empty()) return true;
        const auto adj = adjacency();
        std::vector<char> seen(points.size(), false);
        std::vector<int> stack{0};
        seen[0] = true;
        std::size_t count = 1;
        while (!stack.empty()) {
            const int p = stack.back();
            stack.pop_back();
            for (int q : adj[p]) {
                if (!seen[q]) {
                    seen[q] = true;
                    ++count;
                    stack.push_back(q);
                }
            }
        }
        return count == points.size();
    }

    double diameter() const {
        double best = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i)
            for (std::size_t j = i + 1; j < points.size(); ++j)
                best = std::max(best, dist(points[i], points[j]));
        return best;
    }

    int find_point(const Vec& p, double tol = 1e-12) const {
        for (std::size_t i = 0; i < points.size(); ++i)
            if (dist(points[i], p) <= tol) return static_cast<int>(i);
        return -1;
    }

    void finalize_edges() {
        edge_lengths.resize(edges.size());
        for (std::size_t i = 0; i < edges.size(); ++i)
            edge_lengths[i] = dist(points[edges[i][0]], points[edges[i][1]]);
    }
};

inline SampledDomain interval_domain(double a, double b, int samples) {
    if (samples < 2) throw input_error("interval_domain: need at least 2 samples");
    GridSpec g{{samples}, {a}, {(b - a) / (samples - 1)}};
    SampledDomain d;
    d.grid = g;
    for (int i = 0; i < samples; ++i) {
        d.points.push_back(g.point({i}));
        d.grid_flat.push_back(i);
        if (i > 0) d.edges.push_back({i - 1, i});
    }
    d.finalize_edges();
    return d;
}

/// Full regular grid with axis neighbor adjacency.
inline SampledDomain grid_domain(const GridSpec& g) {
    SampledDomain d;
    d.grid = g;
    const long long total = g.size();
    for (long long f = 0; f < total; ++f) {
        d.points.push_back(g.point(g.unflatten(f)));
        d.grid_flat.push_back(f);
    }
    for (long long f = 0; f < total; ++f) {
        const auto idx = g.unflatten(f);
        for (int a = 0; a < g.dim(); ++a) {
            if (idx[a] + 1 < g.shape[a]) {
                auto nb = idx;
                ++nb[a];
                d.edges.push_back({static_cast<int>(f), static_cast<int>(g.flatten(nb))});
            }
        }
    }
    d.finalize_edges();
    return d;
}

/// Regular grid over [-radius, radius]^m clipped to the closed ball of the
/// given radius, res points per axis; adjacency keeps axis neighbor pairs
/// whose endpoints both survive the clipping.
inline SampledDomain ball_grid_domain(int m, double radius, int res) {
    if (res < 2) throw input_error("ball_grid_domain: need at least 2 points per axis");
    GridSpec g;
    g.shape.assign(m, res);
    g.origin.assign(m, -radius);
    g.spacing.assign(m, 2.0 * radius / (res - 1));
    SampledDomain d;
    d.grid = g;
    const long long total = g.size();
    std::vector<int> kept(total, -1);
    for (long long f = 0; f < total; ++f) {
        const Vec p = g.point(g.unflatten(f));
        if (norm(p) <= radius + 1e-12) {
            kept[f] = d.size();
            d.points.push_back(p);
            d.grid_flat.push_back(f);
        }
    }
    for (long long f = 0; f < total; ++f) {
        if (kept[f] < 0) continue;
        const auto idx = g.unflatten(f);
        for (int a = 0; a < m; ++a) {
            if (idx[a] + 1 < res) {
                auto nb = idx;
                ++nb[a];
                const long long fn = g.flatten(nb);
                if (kept[fn] >= 0) d.edges.push_back({kept[f], kept[fn]});
            }
        }
    }
    d.finalize_edges();
    if (!d.connected()) throw input_error("ball_grid_domain: clipped grid is disconnected");
    return d;
}

} // namespace qgmt
