#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "qgmt/chains.hpp"
#include "qgmt/reparam.hpp"

namespace qgmt {

struct EstimateReport {
    bool mass_pass = true;
    double residual_max = 0.0;
    bool residual_pass = true;
    double normality_max = 0.0;
    bool normality_pass = true;

    double lip_edge = 0.0;   // max_e G(N(x), N(y)) / |y - x|
    double sup_n = 0.0;      // max_x |N(Phi(x))|
    double bracket = 0.0;    // sup|N| ||D2phi|| + ||Dphi|| + Lip(f)
    double c_lip = 0.0;      // empirical constant of the Lipschitz estimate
    bool c_lip_finite = true;

    double th2_min_ratio = std::numeric_limits<double>::infinity();
    double th2_max_ratio = 0.0;
    bool th2_pass = true;

    double c_centering = 0.0; // empirical constant of the centering estimate
    bool c_centering_finite = true;

    bool th4_pass = true;
    double th4_max_ratio = 0.0;
    int th4_skipped = 0;

    double tau_coord = 0.0;  // max per-atom coordinate increment ratio
    double tau_atom = 0.0;   // same for full displacement atoms
    double c_vertical = 0.0; // empirical vertical-limitation constant
    bool c_vertical_finite = true;
    bool lip_vs_tau_pass = true;

    double lip_f = 0.0;

    bool pass() const {
        return mass_pass && residual_pass && normality_pass && th2_pass && th4_pass &&
               lip_vs_tau_pass && c_lip_finite && c_centering_finite && c_vertical_finite;
    }
};

/// Checks the quantitative content of the reparametrization at mesh level:
/// mass, residuals, normality, the two-sided height comparison and the
/// projected-point comparison are asserted; the Lipschitz, centering and
/// vertical-limitation constants are reported as empirical ratios.
inline EstimateReport verify_estimates(const NormalField& nf) {
    const GraphSurface& surf = nf.surface;
    const AnalyticQField& f = nf.field;
    const int q = f.q;
    const double sq = std::sqrt(static_cast<double>(q));
    EstimateReport rep;

    const SampledQField uf = f.sample(nf.mesh);
    rep.lip_f = lipschitz_estimate(uf);

    const int np = nf.mesh.size();
    std::vector<QPoint> disp;
    disp.reserve(np);
    for (int p = 0; p < np; ++p) disp.push_back(nf.displacement_at(p));

    for (int p = 0; p < np; ++p) {
        const auto& fiber = nf.fibers[p];
        if (fiber.mass() != q) rep.mass_pass = false;
        for (const auto& atom : fiber.atoms) rep.residual_max = std::max(rep.residual_max, atom.residual);
        const Mat t = surf.tangents(nf.mesh.points[p]);
        const Vec phi_p = surf.embed(nf.mesh.points[p]);
        for (const auto& atom : fiber.atoms) {
            const Vec d = sub(atom.xi, phi_p);
            for (int i = 0; i < surf.m; ++i)
                rep.normality_max = std::max(rep.normality_max, std::abs(dot(d, t[i])));
        }
        rep.sup_n = std::max(rep.sup_n, qpoint_norm(disp[p]));
    }
    rep.residual_pass = rep.residual_max <= 1e-10;
    rep.normality_pass = rep.normality_max <= 1e-9;

    // Height comparison at every vertex: the fiber spread against the sheet
    // spread over phi, with the exact sqrt(Q) factors.
    for (int p = 0; p < np; ++p) {
        const Vec& x = nf.mesh.points[p];
        const Vec phi_val = surf.phi.eval(x);
        // Accumulated through the same canonical atom order as the
        // displacement norm, so the flat-surface case gives ratio 1 exactly.
        std::vector<QAtom> datoms;
        for (const auto& sheet : f.sheets)
            datoms.push_back({sub(sheet.g.eval(x), phi_val), sheet.mult});
        const double spread = qpoint_norm(QPoint::from_atoms(surf.n, std::move(datoms)));
        const double nn = qpoint_norm(disp[p]);
        if (nn / (2.0 * sq) > spread + 1e-9 * (1.0 + spread)) rep.th2_pass = false;
        if (spread > 2.0 * sq * nn + 1e-9 * (1.0 + nn)) rep.th2_pass = false;
        if (spread > 1e-14) {
            rep.th2_min_ratio = std::min(rep.th2_min_ratio, nn / spread);
            rep.th2_max_ratio = std::max(rep.th2_max_ratio, nn / spread);
        }
    }
    if (!std::isfinite(rep.th2_min_ratio)) rep.th2_min_ratio = 0.0;

    // Centering estimate: |eta(N)| against |eta(f) - phi| plus the tilt term.
    for (int p = 0; p < np; ++p) {
        const Vec& x = nf.mesh.points[p];
        const Vec eta_n = center_of_mass(disp[p]);
        const double lhs = norm(eta_n);
        Vec eta_f(surf.n, 0.0);
        for (const auto& sheet : f.sheets) axpy(eta_f, static_cast<double>(sheet.mult), sheet.g.eval(x));
        for (auto& v : eta_f) v /= q;
        const double b = dist(eta_f, surf.phi.eval(x)) +
                         rep.lip_f * frobenius_norm(surf.phi.jacobian(x)) * qpoint_norm(disp[p]);
        if (b > 1e-15) {
            rep.c_centering = std::max(rep.c_centering, lhs / b);
        } else if (lhs > 1e-12) {
            rep.c_centering_finite = false;
        }
    }

    // Edge quantities: slope of N and the per-atom increment ratios in frame
    // coordinates and in the ambient space.
    for (std::size_t e = 0; e < nf.mesh.edges.size(); ++e) {
        const int a = nf.mesh.edges[e][0];
        const int b = nf.mesh.edges[e][1];
        const double step = nf.mesh.edge_lengths[e];
        rep.lip_edge = std::max(rep.lip_edge, distance(disp[a], disp[b]) / step);
        const QPoint ca = nf.fibers[a].coordinate_point(surf.n);
        const QPoint cb = nf.fibers[b].coordinate_point(surf.n);
        const auto sigma = matching(ca, cb);
        const auto va = ca.expand();
        const auto vb = cb.expand();
        const auto da = disp[a].expand();
        const auto db = disp[b].expand();
        const auto match_disp = matching(disp[a], disp[b]);
        for (int l = 0; l < q; ++l) {
            rep.tau_coord = std::max(rep.tau_coord, dist(va[l], vb[sigma[l]]) / step);
            rep.tau_atom = std::max(rep.tau_atom, dist(da[l], db[match_disp[l]]) / step);
        }
    }

    rep.bracket = rep.sup_n * surf.sup_d2phi + surf.sup_dphi + rep.lip_f;
    if (rep.bracket > 1e-15) {
        rep.c_lip = rep.lip_edge / rep.bracket;
        rep.c_vertical = rep.tau_coord / rep.bracket;
    } else {
        if (rep.lip_edge > 1e-12) rep.c_lip_finite = false;
        if (rep.tau_coord > 1e-12) rep.c_vertical_finite = false;
    }
    rep.lip_vs_tau_pass = rep.lip_edge <= sq * rep.tau_atom + 1e-9;

    // Projected-point comparison: split (x, eta(f(x))) = p + v with p on the
    // surface and v normal, then compare the fiber at p against Q copies of
    // v, bounded by twice sqrt(Q) times the spread of f around its mean.
    for (int p = 0; p < np; ++p) {
        const Vec& x = nf.mesh.points[p];
        Vec eta_f(surf.n, 0.0);
        for (const auto& sheet : f.sheets) axpy(eta_f, static_cast<double>(sheet.mult), sheet.g.eval(x));
        for (auto& v : eta_f) v /= q;
        Vec zeta = x;
        zeta.insert(zeta.end(), eta_f.begin(), eta_f.end());
        const auto y = nearest_point(surf, zeta);
        if (!y || norm(*y) > surf.s) {
            ++rep.th4_skipped;
            continue;
        }
        const Fiber fib = solve_fiber(surf, f, *y, nf.c0);
        double lhs2 = 0.0;
        for (const auto& atom : fib.atoms) lhs2 += atom.mult * dist2(atom.xi, zeta);
        const double lhs = std::sqrt(lhs2);
        double spread2 = 0.0;
        for (const auto& sheet : f.sheets) spread2 += sheet.mult * dist2(sheet.g.eval(x), eta_f);
        const double rhs = 2.0 * sq * std::sqrt(spread2);
        if (lhs > rhs + 1e-9 * (1.0 + rhs)) rep.th4_pass = false;
        if (rhs > 1e-14) rep.th4_max_ratio = std::max(rep.th4_max_ratio, lhs / rhs);
    }

    return rep;
}

struct ProbeCount {
    Vec probe;
    long long count_reparam = 0;
    long long count_graph = 0;
};

struct GraphIdentityReport {
    double hausdorff = 0.0;
    double bound = 0.0;
    bool hausdorff_pass = false;
    int cloud_reparam = 0;
    int cloud_graph = 0;
    int graph_outside_tube = 0;
    std::vector<ProbeCount> probes;
    bool probes_pass = true;

    bool pass() const { return hausdorff_pass && probes_pass; }
};

namespace detail {

inline bool base_contains(const Simplex& verts, int m, const Vec& probe) {
    if (m == 1) {
        const double lo = std::min(verts[0][0], verts[1][0]);
        const double hi = std::max(verts[0][0], verts[1][0]);
        return probe[0] >= lo - 1e-9 && probe[0] <= hi + 1e-9;
    }
    // Barycentric coordinates of the projected triangle.
    const double x1 = verts[1][0] - verts[0][0], y1 = verts[1][1] - verts[0][1];
    const double x2 = verts[2][0] - verts[0][0], y2 = verts[2][1] - verts[0][1];
    const double det = x1 * y2 - x2 * y1;
    if (std::abs(det) < 1e-14) return false;
    const double px = probe[0] - verts[0][0], py = probe[1] - verts[0][1];
    const double l1 = (px * y2 - py * x2) / det;
    const double l2 = (x1 * py - y1 * px) / det;
    return l1 >= -1e-9 && l2 >= -1e-9 && 1.0 - l1 - l2 >= -1e-9;
}

/// Base cells (segments or triangle pairs) of a regular grid over the ball
/// of the given radius, as vertex coordinate tuples.
inline std::vector<Simplex> coarse_base_cells(int m, double radius, int res) {
    std::vector<Simplex> cells;
    const double h = 2.0 * radius / (res - 1);
    if (m == 1) {
        for (int i = 0; i + 1 < res; ++i) {
            const double a = -radius + i * h;
            cells.push_back({{a}, {a + h}});
        }
        return cells;
    }
    for (int i = 0; i + 1 < res; ++i) {
        for (int j = 0; j + 1 < res; ++j) {
            const double x0 = -radius + i * h, y0 = -radius + j * h;
            const Vec p00{x0, y0}, p10{x0 + h, y0}, p01{x0, y0 + h}, p11{x0 + h, y0 + h};
            bool inside = true;
            for (const auto& p : {p00, p10, p01, p11})
                if (norm(p) > radius + 1e-12) inside = false;
            if (!inside) continue;
            cells.push_back({p00, p10, p11});
            cells.push_back({p00, p11, p01});
        }
    }
    return cells;
}

} // namespace detail

/// Sampled check that the reparametrized surface carries the same geometry
/// as the graph of f inside the tube: point clouds agree up to the mesh
/// bound, and coarse chains built from both descriptions meet vertical probe
/// fibers with the same total multiplicity.
inline GraphIdentityReport verify_graph_identity(const NormalField& nf, int coarse_res = 9,
                                                 int n_probes = 5) {
    const GraphSurface& surf = nf.surface;
    const AnalyticQField& f = nf.field;
    GraphIdentityReport rep;

    const SampledQField uf = f.sample(nf.mesh);
    const double lhat = lipschitz_estimate(uf);
    double h_mesh = 0.0;
    for (double sp : nf.mesh.grid->spacing) h_mesh = std::max(h_mesh, sp);
    rep.bound = h_mesh * (1.0 + lhat);

    // Cloud A: all fiber atoms.  Cloud B: graph samples over the same mesh
    // that lie inside the tube.
    std::vector<Vec> cloud_a, cloud_b;
    for (const auto& fiber : nf.fibers)
        for (const auto& atom : fiber.atoms) cloud_a.push_back(atom.xi);
    for (const auto& x : nf.mesh.points) {
        for (const auto& sheet : f.sheets) {
            Vec zeta = x;
            const Vec gx = sheet.g.eval(x);
            zeta.insert(zeta.end(), gx.begin(), gx.end());
            const auto y = nearest_point(surf, zeta);
            if (y && norm(*y) <= surf.s && dist(zeta, surf.embed(*y)) < nf.c0) {
                cloud_b.push_back(zeta);
            } else {
                ++rep.graph_outside_tube;
            }
        }
    }
    rep.cloud_reparam = static_cast<int>(cloud_a.size());
    rep.cloud_graph = static_cast<int>(cloud_b.size());
    auto one_sided = [](const std::vector<Vec>& from, const std::vector<Vec>& to) {
        double worst = 0.0;
        for (const auto& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& t : to) best = std::min(best, dist2(p, t));
            worst = std::max(worst, best);
        }
        return std::sqrt(worst);
    };
    rep.hausdorff = std::max(one_sided(cloud_a, cloud_b), one_sided(cloud_b, cloud_a));
    rep.hausdorff_pass = rep.hausdorff <= rep.bound;

    // Coarse chains: per cell and sheet, the simplex of fiber points versus
    // the simplex of graph points, counted against vertical probe fibers.
    const auto cells = detail::coarse_base_cells(surf.m, 0.9 * surf.s, coarse_res);
    std::vector<std::vector<Fiber>> cell_fibers(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
        for (const auto& v : cells[c]) cell_fibers[c].push_back(solve_fiber(surf, f, v, nf.c0));

    for (int pi = 0; pi < n_probes; ++pi) {
        Vec probe(surf.m, 0.0);
        const double rad = 0.45 * surf.s * (pi + 1) / n_probes;
        if (surf.m == 1) {
            probe[0] = -rad + 0.013 * surf.s * pi;
        } else {
            const double angle = 2.39996322972865332 * pi + 0.1709;
            probe[0] = rad * std::cos(angle);
            probe[1] = rad * std::sin(angle);
        }
        ProbeCount pc;
        pc.probe = probe;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            for (std::size_t sh = 0; sh < f.sheets.size(); ++sh) {
                Simplex rep_simplex, graph_simplex;
                for (std::size_t vi = 0; vi < cells[c].size(); ++vi) {
                    const Vec& base = cells[c][vi];
                    Vec zeta = base;
                    const Vec gx = f.sheets[sh].g.eval(base);
                    zeta.insert(zeta.end(), gx.begin(), gx.end());
                    graph_simplex.push_back(zeta);
                    // The fiber atom produced by this sheet: nearest to its
                    // own initial height among the merged roots.
                    const Fiber& fib = cell_fibers[c][vi];
                    Vec v0 = sub(gx, surf.phi.eval(base));
                    int best = 0;
                    double bd = std::numeric_limits<double>::infinity();
                    for (std::size_t ai = 0; ai < fib.atoms.size(); ++ai) {
                        const double d = dist(fib.atoms[ai].vcoord, v0);
                        if (d < bd) {
                            bd = d;
                            best = static_cast<int>(ai);
                        }
                    }
                    rep_simplex.push_back(fib.atoms[best].xi);
                }
                if (detail::base_contains(rep_simplex, surf.m, probe))
                    pc.count_reparam += f.sheets[sh].mult;
                if (detail::base_contains(graph_simplex, surf.m, probe))
                    pc.count_graph += f.sheets[sh].mult;
            }
        }
        if (pc.count_reparam != pc.count_graph) rep.probes_pass = false;
        rep.probes.push_back(std::move(pc));
    }
    return rep;
}

} // namespace qgmt
