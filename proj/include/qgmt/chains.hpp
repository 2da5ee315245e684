#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "qgmt/errors.hpp"
#include "qgmt/linalg.hpp"
#include "qgmt/lp.hpp"
#include "qgmt/qfield.hpp"

namespace qgmt {

/// Coordinates closer than this are treated as the same vertex when chains
/// are brought to canonical form.
inline constexpr double kVertexTol = 1e-12;

using Simplex = std::vector<Vec>; // m + 1 ordered vertices

struct ChainTerm {
    Simplex verts;
    long long coeff = 0;
};

/// Formal integer combination of oriented m-simplices in R^d.
struct SimplicialChain {
    int m = 0;
    int d = 0;
    std::vector<ChainTerm> terms;

    bool is_zero() const { return terms.empty(); }
};

namespace detail {

inline bool vertex_eq(const Vec& a, const Vec& b, double tol) { return dist(a, b) <= tol; }

inline bool simplex_lex_less(const Simplex& a, const Simplex& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return lex_less(a[i], b[i]);
    }
    return false;
}

inline bool simplex_eq(const Simplex& a, const Simplex& b, double tol) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!vertex_eq(a[i], b[i], tol)) return false;
    return true;
}

/// Sorts the vertices lexicographically in place; returns the sign of the
/// sorting permutation, the orientation convention for canonical terms.
inline int sort_with_sign(Simplex& s) {
    int sign = 1;
    for (std::size_t i = 1; i < s.size(); ++i) {
        for (std::size_t j = i; j > 0 && lex_less(s[j], s[j - 1]); --j) {
            std::swap(s[j], s[j - 1]);
            sign = -sign;
        }
    }
    return sign;
}

inline bool has_repeated_vertex(const Simplex& s, double tol) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
        if (vertex_eq(s[i], s[i + 1], tol)) return true; // sorted, so adjacency suffices
    return false;
}

inline bool rank_degenerate(const Simplex& s) {
    const int m = static_cast<int>(s.size()) - 1;
    if (m == 0) return false;
    const double edge = longest_edge(s);
    if (edge <= 0.0) return true;
    return simplex_volume(s) < 1e-10 * std::pow(edge, m) / factorial(m);
}

} // namespace detail

/// Canonical form: vertices of each simplex sorted with the permutation sign
/// pushed into the coefficient, simplices with a repeated vertex dropped,
/// equal simplices merged, zero coefficients dropped, terms sorted.
inline SimplicialChain canonical(const SimplicialChain& chain) {
    SimplicialChain out{chain.m, chain.d, {}};
    std::vector<ChainTerm> work;
    work.reserve(chain.terms.size());
    for (const auto& term : chain.terms) {
        if (static_cast<int>(term.verts.size()) != chain.m + 1)
            throw input_error("chain term with wrong vertex count");
        for (const auto& v : term.verts)
            if (static_cast<int>(v.size()) != chain.d)
                throw input_error("chain vertex with wrong dimension");
        if (term.coeff == 0) continue;
        ChainTerm t = term;
        const int sign = detail::sort_with_sign(t.verts);
        if (detail::has_repeated_vertex(t.verts, kVertexTol)) continue;
        t.coeff *= sign;
        work.push_back(std::move(t));
    }
    std::sort(work.begin(), work.end(), [](const ChainTerm& a, const ChainTerm& b) {
        return detail::simplex_lex_less(a.verts, b.verts);
    });
    for (auto& t : work) {
        bool merged = false;
        for (std::size_t k = out.terms.size(); k-- > 0;) {
            if (std::abs(out.terms[k].verts[0][0] - t.verts[0][0]) > kVertexTol) break;
            if (detail::simplex_eq(out.terms[k].verts, t.verts, kVertexTol)) {
                out.terms[k].coeff += t.coeff;
                merged = true;
                break;
            }
        }
        if (!merged) out.terms.push_back(std::move(t));
    }
    std::erase_if(out.terms, [](const ChainTerm& t) { return t.coeff == 0; });
    return out;
}

inline SimplicialChain operator+(const SimplicialChain& a, const SimplicialChain& b) {
    if (a.m != b.m || a.d != b.d) throw input_error("chain sum: incompatible chains");
    SimplicialChain r = a;
    r.terms.insert(r.terms.end(), b.terms.begin(), b.terms.end());
    return canonical(r);
}

inline SimplicialChain operator-(const SimplicialChain& a) {
    SimplicialChain r = a;
    for (auto& t : r.terms) t.coeff = -t.coeff;
    return r;
}

inline SimplicialChain operator-(const SimplicialChain& a, const SimplicialChain& b) {
    return a + (-b);
}

inline bool chains_equal(const SimplicialChain& a, const SimplicialChain& b) {
    return canonical(a - b).is_zero();
}

/// Alternating sum of faces.  A 0-chain has empty boundary.
inline SimplicialChain boundary(const SimplicialChain& chain) {
    SimplicialChain out{std::max(chain.m - 1, 0), chain.d, {}};
    if (chain.m == 0) return out;
    for (const auto& term : chain.terms) {
        for (int skip = 0; skip <= chain.m; ++skip) {
            ChainTerm face;
            face.coeff = (skip % 2 == 0) ? term.coeff : -term.coeff;
            face.verts.reserve(chain.m);
            for (int j = 0; j <= chain.m; ++j)
                if (j != skip) face.verts.push_back(term.verts[j]);
            out.terms.push_back(std::move(face));
        }
    }
    return canonical(out);
}

/// Sum of |coefficient| times simplex volume; 0-simplices count volume 1.
inline double mass(const SimplicialChain& chain) {
    double total = 0.0;
    for (const auto& term : chain.terms)
        total += std::abs(static_cast<double>(term.coeff)) * simplex_volume(term.verts);
    return total;
}

/// Vertexwise map used for push-forwards; the caller guarantees it is affine
/// on every simplex it is applied to.
struct PLMap {
    int target_dim = 0;
    std::function<Vec(const Vec&)> map;
};

inline PLMap identity_map(int d) {
    return {d, [](const Vec& v) { return v; }};
}

/// Applies the map to every vertex; image simplices of deficient rank are
/// dropped, matching the restriction to points of positive Jacobian.
inline SimplicialChain pushforward(const PLMap& f, const SimplicialChain& chain) {
    SimplicialChain out{chain.m, f.target_dim, {}};
    for (const auto& term : chain.terms) {
        ChainTerm image;
        image.coeff = term.coeff;
        image.verts.reserve(term.verts.size());
        for (const auto& v : term.verts) {
            Vec w = f.map(v);
            if (static_cast<int>(w.size()) != f.target_dim)
                throw input_error("pushforward: map produced wrong dimension");
            image.verts.push_back(std::move(w));
        }
        Simplex sorted = image.verts;
        detail::sort_with_sign(sorted);
        if (detail::has_repeated_vertex(sorted, kVertexTol)) continue;
        if (detail::rank_degenerate(image.verts)) continue;
        out.terms.push_back(std::move(image));
    }
    return canonical(out);
}

/// Finite simplicial complex: shared vertex list plus, per dimension, sorted
/// index tuples closed under taking faces.
struct SimplicialComplex {
    int d = 0;
    Mat vertices;
    std::vector<std::vector<std::vector<int>>> cells;

    int top_dim() const { return static_cast<int>(cells.size()) - 1; }

    int cell_count(int k) const {
        return (k >= 0 && k <= top_dim()) ? static_cast<int>(cells[k].size()) : 0;
    }

    int find_vertex(const Vec& p, double tol = kVertexTol) const {
        for (std::size_t i = 0; i < vertices.size(); ++i)
            if (detail::vertex_eq(vertices[i], p, tol)) return static_cast<int>(i);
        return -1;
    }

    int find_cell(int k, const std::vector<int>& sorted_tuple) const {
        if (k < 0 || k > top_dim()) return -1;
        const auto& list = cells[k];
        const auto it = std::lower_bound(list.begin(), list.end(), sorted_tuple);
        if (it != list.end() && *it == sorted_tuple) return static_cast<int>(it - list.begin());
        return -1;
    }

    Simplex cell_verts(int k, int i) const {
        Simplex s;
        for (int vi : cells[k][i]) s.push_back(vertices[vi]);
        return s;
    }

    /// Signed incidence of (k-1)-cells (rows) against k-cells (columns).
    std::vector<std::vector<int>> boundary_matrix(int k) const {
        std::vector<std::vector<int>> b(cell_count(k - 1), std::vector<int>(cell_count(k), 0));
        for (int c = 0; c < cell_count(k); ++c) {
            const auto& tuple = cells[k][c];
            for (int skip = 0; skip <= k; ++skip) {
                std::vector<int> face;
                face.reserve(k);
                for (int j = 0; j <= k; ++j)
                    if (j != skip) face.push_back(tuple[j]);
                const int row = find_cell(k - 1, face);
                if (row < 0) throw invariant_error("complex is not closed under faces");
                b[row][c] += (skip % 2 == 0) ? 1 : -1;
            }
        }
        return b;
    }

    void validate() const {
        for (int k = 1; k <= top_dim(); ++k) {
            for (const auto& tuple : cells[k]) {
                if (static_cast<int>(tuple.size()) != k + 1)
                    throw invariant_error("complex: tuple of wrong length");
                if (!std::is_sorted(tuple.begin(), tuple.end()))
                    throw invariant_error("complex: tuple not sorted");
            }
            boundary_matrix(k); // throws when a face is missing
        }
        for (int k = 2; k <= top_dim(); ++k) {
            const auto b1 = boundary_matrix(k - 1);
            const auto b2 = boundary_matrix(k);
            for (std::size_t r = 0; r < b1.size(); ++r) {
                for (std::size_t c = 0; c < b2[0].size(); ++c) {
                    long long s = 0;
                    for (std::size_t j = 0; j < b2.size(); ++j) s += static_cast<long long>(b1[r][j]) * b2[j][c];
                    if (s != 0) throw invariant_error("complex: boundary of boundary is nonzero");
                }
            }
        }
    }

    static SimplicialComplex from_maximal(int d, Mat vertices,
                                          const std::vector<std::vector<int>>& maximal) {
        SimplicialComplex k;
        k.d = d;
        k.vertices = std::move(vertices);
        int top = 0;
        for (const auto& tuple : maximal) top = std::max(top, static_cast<int>(tuple.size()) - 1);
        k.cells.assign(top + 1, {});
        std::function<void(const std::vector<int>&)> insert_with_faces =
            [&](const std::vector<int>& tuple) {
                const int dim = static_cast<int>(tuple.size()) - 1;
                auto& list = k.cells[dim];
                list.push_back(tuple);
                if (dim == 0) return;
                for (int skip = 0; skip <= dim; ++skip) {
                    std::vector<int> face;
                    for (int j = 0; j <= dim; ++j)
                        if (j != skip) face.push_back(tuple[j]);
                    insert_with_faces(face);
                }
            };
        for (auto tuple : maximal) {
            std::sort(tuple.begin(), tuple.end());
            if (std::adjacent_find(tuple.begin(), tuple.end()) != tuple.end())
                throw input_error("complex: degenerate maximal cell");
            insert_with_faces(tuple);
        }
        for (auto& list : k.cells) {
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
        }
        return k;
    }
};

struct FlatNormResult {
    double value = 0.0;
    SimplicialChain rest;    // R
    SimplicialChain filling; // S with T = R + boundary(S)
    bool integral = true;
    double max_fraction = 0.0;
};

namespace detail {

inline int permutation_sign(std::vector<int> idx) {
    int sign = 1;
    for (std::size_t i = 1; i < idx.size(); ++i) {
        for (std::size_t j = i; j > 0 && idx[j] < idx[j - 1]; --j) {
            std::swap(idx[j], idx[j - 1]);
            sign = -sign;
        }
    }
    return sign;
}

} // namespace detail

/// Complex-restricted flat norm: minimizes mass(R) + mass(S) over real chains
/// with T = R + boundary(S) supported on the complex, as a linear program.
/// The chain must be supported on the m-cells of the complex.
inline FlatNormResult simplicial_flat_norm(const SimplicialChain& t_in, const SimplicialComplex& k) {
    const SimplicialChain t = canonical(t_in);
    const int m = t.m;
    FlatNormResult res;
    res.rest = SimplicialChain{m, t.d, {}};
    res.filling = SimplicialChain{m + 1, t.d, {}};
    if (t.d != k.d) throw input_error("flat norm: ambient dimension mismatch");

    const int nm = k.cell_count(m);
    const int ns = k.cell_count(m + 1);
    Vec t_vec(nm, 0.0);
    for (const auto& term : t.terms) {
        std::vector<int> idx;
        for (const auto& v : term.verts) {
            const int vi = k.find_vertex(v);
            if (vi < 0) throw input_error("flat norm: chain vertex not in complex");
            idx.push_back(vi);
        }
        const int sign = detail::permutation_sign(idx);
        std::sort(idx.begin(), idx.end());
        const int cell = k.find_cell(m, idx);
        if (cell < 0) throw input_error("flat norm: chain simplex not in complex");
        t_vec[cell] += static_cast<double>(sign * term.coeff);
    }

    Vec w(nm, 1.0), ws(ns, 1.0);
    for (int i = 0; i < nm; ++i) w[i] = simplex_volume(k.cell_verts(m, i));
    for (int j = 0; j < ns; ++j) ws[j] = simplex_volume(k.cell_verts(m + 1, j));
    std::vector<std::vector<int>> b;
    if (ns > 0) b = k.boundary_matrix(m + 1);

    // Variables: r+, r-, s+, s-.
    const int nv = 2 * nm + 2 * ns;
    Mat a(nm, Vec(nv, 0.0));
    Vec c(nv, 0.0);
    for (int i = 0; i < nm; ++i) {
        a[i][i] = 1.0;
        a[i][nm + i] = -1.0;
        c[i] = w[i];
        c[nm + i] = w[i];
    }
    for (int j = 0; j < ns; ++j) {
        for (int i = 0; i < nm; ++i) {
            a[i][2 * nm + j] = static_cast<double>(b[i][j]);
            a[i][2 * nm + ns + j] = -static_cast<double>(b[i][j]);
        }
        c[2 * nm + j] = ws[j];
        c[2 * nm + ns + j] = ws[j];
    }

    const LpResult lp = solve_lp(a, t_vec, c);
    if (!lp.feasible) throw solver_error("flat norm: linear program infeasible");
    res.value = lp.value;
    for (int v = 0; v < nv; ++v) {
        const double frac = std::abs(lp.x[v] - std::round(lp.x[v]));
        res.max_fraction = std::max(res.max_fraction, frac);
    }
    res.integral = res.max_fraction <= 1e-7;

    auto emit = [&](SimplicialChain& chain, int k_dim, int cell, double value) {
        const long long coeff = std::llround(value);
        if (coeff == 0) return;
        chain.terms.push_back({k.cell_verts(k_dim, cell), coeff});
    };
    for (int i = 0; i < nm; ++i) emit(res.rest, m, i, lp.x[i] - lp.x[nm + i]);
    for (int j = 0; j < ns; ++j) emit(res.filling, m + 1, j, lp.x[2 * nm + j] - lp.x[2 * nm + ns + j]);
    res.rest = canonical(res.rest);
    res.filling = canonical(res.filling);
    return res;
}

namespace detail {

inline SimplicialChain qpush_impl(const SampledQField& u, const SheetSelection& sel,
                                  const SimplicialChain& p, bool graph) {
    if (static_cast<int>(sel.branches.size()) != u.domain.size())
        throw input_error("push-forward: selection does not match the field");
    const int base_d = u.domain.dim();
    if (p.d != base_d) throw input_error("push-forward: chain dimension mismatch");
    SimplicialChain out{p.m, graph ? base_d + u.n : u.n, {}};
    const SimplicialChain pc = canonical(p);
    for (const auto& term : pc.terms) {
        std::vector<int> samples;
        for (const auto& v : term.verts) {
            const int s = u.domain.find_point(v, kVertexTol);
            if (s < 0) throw refinement_error("push-forward: chain vertex is not a sample point");
            samples.push_back(s);
        }
        for (std::size_t a = 1; a < samples.size(); ++a)
            if (sel.piece_of[samples[a]] != sel.piece_of[samples[0]])
                throw refinement_error("push-forward: simplex crosses selection pieces");
        for (int l = 0; l < u.q; ++l) {
            ChainTerm image;
            image.coeff = term.coeff;
            for (std::size_t a = 0; a < samples.size(); ++a) {
                const Vec& value = sel.branches[samples[a]][l];
                if (graph) {
                    Vec w = term.verts[a];
                    w.insert(w.end(), value.begin(), value.end());
                    image.verts.push_back(std::move(w));
                } else {
                    image.verts.push_back(value);
                }
            }
            Simplex sorted = image.verts;
            detail::sort_with_sign(sorted);
            if (detail::has_repeated_vertex(sorted, kVertexTol)) continue;
            if (detail::rank_degenerate(image.verts)) continue;
            out.terms.push_back(std::move(image));
        }
    }
    return canonical(out);
}

} // namespace detail

/// Push-forward of a chain through a piecewise affine Q-valued field: each
/// branch maps each simplex, coefficients are kept, degenerate images drop.
inline SimplicialChain qpushforward(const SampledQField& u, const SheetSelection& sel,
                                    const SimplicialChain& p) {
    return detail::qpush_impl(u, sel, p, false);
}

/// Chain of the graph of u over the chain p, the push-forward through
/// x -> (x, u(x)) branch by branch.
inline SimplicialChain graph_chain(const SampledQField& u, const SheetSelection& sel,
                                   const SimplicialChain& p) {
    return detail::qpush_impl(u, sel, p, true);
}

struct CommutationReport {
    bool pass = false;
    int lhs_terms = 0;
    int rhs_terms = 0;
    int diff_terms = 0;
};

/// Verifies boundary(u # P) == u # boundary(P) as canonical integer chains.
inline CommutationReport check_boundary_commutation(const SampledQField& u,
                                                    const SheetSelection& sel,
                                                    const SimplicialChain& p) {
    const SimplicialChain lhs = boundary(qpushforward(u, sel, p));
    const SimplicialChain rhs = qpushforward(u, sel, boundary(p));
    const SimplicialChain diff = canonical(lhs - rhs);
    return {diff.is_zero(), static_cast<int>(lhs.terms.size()),
            static_cast<int>(rhs.terms.size()), static_cast<int>(diff.terms.size())};
}

/// Prism fill of the straight-line homotopy between two maps affine on the
/// simplices of p.  Satisfies, exactly in canonical form,
///     boundary(fill(f, g, P)) = g#P - f#P - fill(f, g, boundary(P)).
inline SimplicialChain affine_homotopy_fill(const PLMap& f, const PLMap& g,
                                            const SimplicialChain& p) {
    if (f.target_dim != g.target_dim) throw input_error("homotopy fill: target dimension mismatch");
    SimplicialChain out{p.m + 1, f.target_dim, {}};
    const SimplicialChain pc = canonical(p);
    for (const auto& term : pc.terms) {
        std::vector<Vec> a, b;
        for (const auto& v : term.verts) {
            a.push_back(f.map(v));
            b.push_back(g.map(v));
        }
        for (int i = 0; i <= p.m; ++i) {
            ChainTerm prism;
            prism.coeff = (i % 2 == 0) ? term.coeff : -term.coeff;
            for (int j = 0; j <= i; ++j) prism.verts.push_back(a[j]);
            for (int j = i; j <= p.m; ++j) prism.verts.push_back(b[j]);
            out.terms.push_back(std::move(prism));
        }
    }
    return canonical(out);
}

inline constexpr double kStabilityCemp = 64.0;

struct StabilityReport {
    double base_flat = 0.0;
    double image_flat = 0.0;
    double ratio = 0.0;
    bool finite = true;
    double lhat = 0.0;
    double bound = 0.0;
    bool pass = false;
};

/// Compares the complex-restricted flat norms of P1 - P2 and of the image
/// difference under u, reporting the empirical stability ratio.
inline StabilityReport flat_pushforward_stability(const SampledQField& u, const SheetSelection& sel,
                                                  const SimplicialChain& p1, const SimplicialChain& p2,
                                                  const SimplicialComplex& k_base,
                                                  const SimplicialComplex& k_image) {
    StabilityReport rep;
    rep.lhat = lipschitz_estimate(u);
    rep.base_flat = simplicial_flat_norm(p1 - p2, k_base).value;
    const SimplicialChain image_diff = qpushforward(u, sel, p1) - qpushforward(u, sel, p2);
    rep.image_flat = simplicial_flat_norm(image_diff, k_image).value;
    if (rep.base_flat > 1e-12) {
        rep.ratio = rep.image_flat / rep.base_flat;
    } else if (rep.image_flat > 1e-12) {
        rep.finite = false;
        rep.ratio = std::numeric_limits<double>::infinity();
    }
    rep.bound = kStabilityCemp * std::pow(1.0 + rep.lhat, p1.m + 1);
    rep.pass = rep.finite && rep.ratio <= rep.bound;
    return rep;
}

} // namespace qgmt
