#pragma once

#include <vector>

#include "qgmt/chains.hpp"
#include "qgmt/multisection.hpp"
#include "qgmt/qfield.hpp"
#include "qgmt/rng.hpp"

namespace qgmt {

/// Random Q-point with the given total multiplicity: atoms drawn uniformly
/// from [-1, 1]^n, multiplicities split at random.
inline QPoint random_qpoint(Rng& rng, int q, int n) {
    std::vector<QAtom> atoms;
    int remaining = q;
    while (remaining > 0) {
        const int mult = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(remaining)));
        atoms.push_back({rng.vector(n, -1.0, 1.0), mult});
        remaining -= mult;
    }
    return QPoint::from_atoms(n, std::move(atoms));
}

/// Piecewise linear field on an interval or square grid with q branches at
/// well separated offsets plus independent per-vertex jitter.  The branch
/// layout makes sheet selection unambiguous.
inline SampledQField random_pl_field(Rng& rng, int dim, int q, int n, int res, double spread,
                                     double jitter) {
    SampledQField f;
    f.q = q;
    f.n = n;
    if (dim == 1) {
        f.domain = interval_domain(0.0, 1.0, res);
    } else {
        GridSpec g;
        g.shape.assign(dim, res);
        g.origin.assign(dim, 0.0);
        g.spacing.assign(dim, 1.0 / (res - 1));
        f.domain = grid_domain(g);
    }
    std::vector<Vec> offsets;
    for (int l = 0; l < q; ++l) {
        Vec c(n, 0.0);
        c[0] = spread * l;
        for (int i = 0; i < n; ++i) c[i] += 0.1 * rng.uniform(-1.0, 1.0);
        offsets.push_back(std::move(c));
    }
    for (int p = 0; p < f.domain.size(); ++p) {
        std::vector<QAtom> atoms;
        for (int l = 0; l < q; ++l) {
            Vec v = offsets[l];
            for (int i = 0; i < n; ++i) v[i] += jitter * rng.uniform(-1.0, 1.0);
            atoms.push_back({std::move(v), 1});
        }
        f.samples.push_back(QPoint::from_atoms(n, std::move(atoms)));
    }
    f.validate();
    return f;
}

/// Chain supported on the cells of the field's grid domain: all segments in
/// one dimension, all cell triangle pairs in two, with random small integer
/// coefficients.
inline SimplicialChain random_domain_chain(Rng& rng, const SampledDomain& dom, bool unit_coeffs) {
    const GridSpec& g = *dom.grid;
    const int dim = static_cast<int>(g.shape.size());
    auto coeff = [&]() -> long long {
        if (unit_coeffs) return 1;
        const long long c = static_cast<long long>(rng.index(4)) - 2;
        return c >= 0 ? c + 1 : c;
    };
    SimplicialChain p{dim, dim, {}};
    if (dim == 1) {
        for (int i = 0; i + 1 < g.shape[0]; ++i)
            p.terms.push_back({{dom.points[i], dom.points[i + 1]}, coeff()});
        return canonical(p);
    }
    auto at = [&](int i, int j) {
        return dom.points[static_cast<std::size_t>(i) * g.shape[1] + j];
    };
    for (int i = 0; i + 1 < g.shape[0]; ++i) {
        for (int j = 0; j + 1 < g.shape[1]; ++j) {
            const long long c = coeff();
            p.terms.push_back({{at(i, j), at(i + 1, j), at(i + 1, j + 1)}, c});
            p.terms.push_back({{at(i, j), at(i + 1, j + 1), at(i, j + 1)}, c});
        }
    }
    return canonical(p);
}

struct DecomposeInstance {
    SampledQField field;
    int p0 = 0;
    int i = 0;
    int j = 0;
};

/// Field whose values split into two clusters separated by far more than the
/// decomposition threshold; atoms i and j at p0 lie in different clusters.
inline DecomposeInstance random_separated_instance(Rng& rng, int q, int n, int dim, int res) {
    const int qa = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(q - 1)));
    DecomposeInstance inst;
    SampledQField f = random_pl_field(rng, dim, q, n, res, 1.0, 0.2);
    const double offset = 2000.0;
    for (auto& t : f.samples) {
        std::vector<QAtom> atoms = t.atoms;
        for (int a = qa; a < q; ++a) atoms[a].v[0] += offset;
        t = QPoint::from_atoms(n, std::move(atoms));
    }
    f.validate();
    inst.field = std::move(f);
    inst.p0 = static_cast<int>(rng.index(static_cast<std::size_t>(inst.field.domain.size())));
    const auto& t0 = inst.field.samples[inst.p0];
    inst.i = 0;
    inst.j = static_cast<int>(t0.atoms.size()) - 1;
    return inst;
}

/// Field whose branches ride one steep common slope with small offsets, so
/// the separation test fails for every atom pair.
inline DecomposeInstance random_entangled_instance(Rng& rng, int q, int n, int dim, int res) {
    DecomposeInstance inst;
    SampledQField f;
    f.q = q;
    f.n = n;
    if (dim == 1) {
        f.domain = interval_domain(0.0, 1.0, res);
    } else {
        GridSpec g;
        g.shape.assign(dim, res);
        g.origin.assign(dim, 0.0);
        g.spacing.assign(dim, 1.0 / (res - 1));
        f.domain = grid_domain(g);
    }
    Vec dir = rng.vector(n, -1.0, 1.0);
    const double dn = norm(dir);
    for (auto& v : dir) v /= dn > 1e-12 ? dn : 1.0;
    std::vector<double> delta;
    for (int l = 0; l < q; ++l) delta.push_back(0.1 + 0.9 * (l + rng.uniform()) / q);
    for (const auto& x : f.domain.points) {
        double sx = 0.0;
        for (double c : x) sx += 5.0 * c;
        std::vector<QAtom> atoms;
        for (int l = 0; l < q; ++l) {
            Vec v = scaled(dir, sx);
            v[0] += delta[l];
            atoms.push_back({std::move(v), 1});
        }
        f.samples.push_back(QPoint::from_atoms(n, std::move(atoms)));
    }
    f.validate();
    inst.field = std::move(f);
    inst.p0 = static_cast<int>(rng.index(static_cast<std::size_t>(inst.field.domain.size())));
    const int na = static_cast<int>(inst.field.samples[inst.p0].atoms.size());
    inst.i = 0;
    inst.j = na - 1;
    return inst;
}

struct HomotopyInstance {
    SimplicialChain p;
    PLMap f;
    PLMap g;
    double sup_diff = 0.0;
    double lip_sum = 0.0;
};

/// Two affine maps with derivative norms below one and a grid-cell chain
/// between them, together with the exact sup of |f - g| over the chain
/// support and the sum of the Frobenius derivative norms.  The target
/// dimension must be at least the chain dimension, otherwise every image
/// simplex collapses and the prism identity degenerates listwise.
inline HomotopyInstance random_homotopy_instance(Rng& rng, int dim, int target, int res) {
    if (target < dim) throw input_error("homotopy instance: target dimension below chain dimension");
    HomotopyInstance inst;
    GridSpec g;
    g.shape.assign(dim, res);
    g.origin.assign(dim, 0.0);
    g.spacing.assign(dim, 1.0 / (res - 1));
    const SampledDomain dom = grid_domain(g);
    inst.p = random_domain_chain(rng, dom, false);

    auto random_affine = [&](double& lip) {
        Mat a = zeros(target, dim);
        double fro2 = 0.0;
        for (int r = 0; r < target; ++r)
            for (int c = 0; c < dim; ++c) {
                a[r][c] = rng.uniform(-1.0, 1.0);
                fro2 += a[r][c] * a[r][c];
            }
        const double scale = 0.9 / std::max(1.0, std::sqrt(fro2));
        for (auto& row : a)
            for (auto& v : row) v *= scale;
        const Vec b = rng.vector(target, -1.0, 1.0);
        lip = std::sqrt(fro2) * scale;
        return PLMap{target, [a, b, target, dim](const Vec& x) {
                         Vec y = b;
                         for (int r = 0; r < target; ++r)
                             for (int c = 0; c < dim; ++c) y[r] += a[r][c] * x[c];
                         return y;
                     }};
    };
    double lf = 0.0, lg = 0.0;
    inst.f = random_affine(lf);
    inst.g = random_affine(lg);
    inst.lip_sum = lf + lg;
    for (const auto& term : inst.p.terms)
        for (const auto& v : term.verts)
            inst.sup_diff = std::max(inst.sup_diff, dist(inst.f.map(v), inst.g.map(v)));
    return inst;
}

/// Coherent multisection: separated smooth branches sampled on a grid, with
/// movement per step far below the branch separation.
inline Multisection random_coherent_multisection(Rng& rng, int q, int n, int dim, int res) {
    SampledQField f;
    f.q = q;
    f.n = n;
    GridSpec g;
    g.shape.assign(dim, res);
    g.origin.assign(dim, 0.0);
    g.spacing.assign(dim, 1.0 / (res - 1));
    f.domain = grid_domain(g);
    std::vector<Vec> freq, phase;
    for (int l = 0; l < q; ++l) {
        freq.push_back(rng.vector(dim, -2.0, 2.0));
        phase.push_back(rng.vector(n, 0.0, 6.28));
    }
    for (const auto& x : f.domain.points) {
        std::vector<QAtom> atoms;
        for (int l = 0; l < q; ++l) {
            Vec v(n, 0.0);
            v[0] = 10.0 * l;
            for (int i = 0; i < n; ++i)
                v[i] += 0.3 * std::sin(dot(freq[l], x) + phase[l][i]);
            atoms.push_back({std::move(v), 1});
        }
        f.samples.push_back(QPoint::from_atoms(n, std::move(atoms)));
    }
    f.validate();
    return from_qfield(f);
}

} // namespace qgmt
