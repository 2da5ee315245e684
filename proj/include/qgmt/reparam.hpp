#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qgmt/domain.hpp"
#include "qgmt/errors.hpp"
#include "qgmt/polynomial.hpp"
#include "qgmt/qfield.hpp"
#include "qgmt/qpoint.hpp"

namespace qgmt {

inline void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    const int used = std::min(threads, count);
    for (int t = 0; t < used; ++t) {
        pool.emplace_back([&, t] {
            for (int i = t; i < count; i += used) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("QGMT_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

/// Hard coded geometric gate constant for the tubular neighborhood tests.
inline double geometric_gate_constant(int m, int n) {
    return 16.0 * (m + n) * (m + n);
}

/// Graph of a polynomial map phi : B_s in R^m -> R^n, embedded in R^(m+n)
/// as x -> (x, phi(x)), with sampled sup norms of phi and its derivatives.
struct GraphSurface {
    int m = 0;
    int n = 0;
    double s = 0.0;
    PolyMap phi;
    double sup_phi = 0.0;
    double sup_dphi = 0.0;
    double sup_d2phi = 0.0;
    double sup_d3phi = 0.0;
    int norm_density = 0;

    Vec embed(const Vec& x) const {
        Vec p = x;
        const Vec y = phi.eval(x);
        p.insert(p.end(), y.begin(), y.end());
        return p;
    }

    /// Rows i = 0..m-1: unnormalized tangent e_i + (0, dphi/dx_i).
    Mat tangents(const Vec& x) const {
        const Mat j = phi.jacobian(x);
        Mat t = zeros(m, m + n);
        for (int i = 0; i < m; ++i) {
            t[i][i] = 1.0;
            for (int r = 0; r < n; ++r) t[i][m + r] = j[r][i];
        }
        return t;
    }

    double c2_norm() const { return sup_phi + sup_dphi + sup_d2phi; }
    double c3_norm() const { return c2_norm() + sup_d3phi; }

    static GraphSurface build(int m, int n, double s, PolyMap phi, int norm_density) {
        phi.validate();
        if (phi.m != m || phi.n != n) throw input_error("GraphSurface: phi has wrong shape");
        if (!(s > 0.0)) throw input_error("GraphSurface: radius must be positive");
        GraphSurface g;
        g.m = m;
        g.n = n;
        g.s = s;
        g.phi = std::move(phi);
        g.norm_density = norm_density;
        const SampledDomain dense = ball_grid_domain(m, s, norm_density);
        for (const auto& x : dense.points) {
            g.sup_phi = std::max(g.sup_phi, norm(g.phi.eval(x)));
            g.sup_dphi = std::max(g.sup_dphi, frobenius_norm(g.phi.jacobian(x)));
            g.sup_d2phi = std::max(g.sup_d2phi, g.phi.d2_norm(x));
            g.sup_d3phi = std::max(g.sup_d3phi, g.phi.d3_norm(x));
        }
        return g;
    }
};

/// Orthonormal basis of the normal space at x: the vertical unit vectors
/// e_(m+1)..e_(m+n) projected off the tangent space and Gram-Schmidt
/// orthogonalized in that order.  Rows are vectors in R^(m+n).
inline Mat normal_frame(const GraphSurface& surf, const Vec& x) {
    const Mat t = surf.tangents(x);
    Mat q = t;
    for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i < surf.m; ++i) {
            for (int j = 0; j < i; ++j) axpy(q[i], -dot(q[i], q[j]), q[j]);
            const double nm = norm(q[i]);
            if (nm < 1e-8) throw smallness_error("normal_frame: degenerate tangent space");
            for (auto& v : q[i]) v /= nm;
        }
    Mat nu = zeros(surf.n, surf.m + surf.n);
    for (int j = 0; j < surf.n; ++j) nu[j][surf.m + j] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
        for (int j = 0; j < surf.n; ++j) {
            for (int i = 0; i < surf.m; ++i) axpy(nu[j], -dot(nu[j], q[i]), q[i]);
            for (int i = 0; i < j; ++i) axpy(nu[j], -dot(nu[j], nu[i]), nu[i]);
            const double nm = norm(nu[j]);
            if (nm < 1e-8) throw smallness_error("normal_frame: tilt too large for a vertical frame");
            for (auto& v : nu[j]) v /= nm;
        }
    return nu;
}

struct SmallnessCondition {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

struct SmallnessReport {
    std::vector<SmallnessCondition> conditions;
    double lip_f = 0.0;
    double sup_f = 0.0;
    double c_geo = 0.0;
    int mesh_res = 0;
    bool pass = true;
};

/// All smallness gates for reparametrizing f over the graph of phi inside
/// the tube of radius c0 around it, with chart radius s inside ball radius r.
inline SmallnessReport check_smallness(const GraphSurface& surf, const AnalyticQField& f,
                                       double r, double s, double c0, int mesh_res = 33) {
    f.validate();
    if (f.m != surf.m || f.n != surf.n) throw input_error("check_smallness: field shape mismatch");
    if (!(r > s && s > 0.0)) throw input_error("check_smallness: need r > s > 0");
    SmallnessReport rep;
    rep.mesh_res = mesh_res;
    rep.c_geo = geometric_gate_constant(surf.m, surf.n);

    const SampledDomain mesh = ball_grid_domain(surf.m, s, mesh_res);
    const SampledQField uf = f.sample(mesh);
    rep.lip_f = lipschitz_estimate(uf);
    for (const auto& t : uf.samples) rep.sup_f = std::max(rep.sup_f, qpoint_norm(t));

    auto add = [&](const std::string& name, double lhs, double rhs) {
        const bool ok = lhs <= rhs;
        rep.conditions.push_back({name, lhs, rhs, ok});
        rep.pass = rep.pass && ok;
    };
    add("regularity", surf.c2_norm() + rep.lip_f, c0);
    add("height", surf.sup_phi + rep.sup_f, c0 * s);
    add("margin", c0, 0.5 * (r - s));
    add("curvature", c0 * c0, (1.0 - (s / r) * (s / r)) / rep.c_geo);
    add("tilt", rep.c_geo * c0 * c0, 0.5);
    add("third_derivative", surf.c3_norm(), 1.0);
    return rep;
}

struct FiberAtom {
    Vec xi;      // point in R^(m+n)
    Vec vcoord;  // normal frame coordinates, length n
    int mult = 1;
    double residual = 0.0;
    int iters = 0;
};

struct Fiber {
    Vec x;
    std::vector<FiberAtom> atoms;

    int mass() const {
        int s = 0;
        for (const auto& a : atoms) s += a.mult;
        return s;
    }

    /// N at this base point: atoms are displacements from Phi(x).
    QPoint displacement_point(const Vec& phi_x, int ambient) const {
        std::vector<QAtom> out;
        for (const auto& a : atoms) out.push_back({sub(a.xi, phi_x), a.mult});
        return QPoint::from_atoms(ambient, std::move(out));
    }

    QPoint point(int ambient) const {
        std::vector<QAtom> out;
        for (const auto& a : atoms) out.push_back({a.xi, a.mult});
        return QPoint::from_atoms(ambient, std::move(out));
    }

    QPoint coordinate_point(int n) const {
        std::vector<QAtom> out;
        for (const auto& a : atoms) out.push_back({a.vcoord, a.mult});
        return QPoint::from_atoms(n, std::move(out));
    }
};

/// Intersects every sheet of f with the normal fiber through Phi(x): Newton
/// iteration in the frame coordinates v for
///     tail(xi(v)) = g_l(head(xi(v))),   xi(v) = Phi(x) + sum_i v_i nu_i.
/// Roots from different sheets closer than 1e-8 merge with summed
/// multiplicity.
inline Fiber solve_fiber(const GraphSurface& surf, const AnalyticQField& f, const Vec& x,
                         double c0) {
    const int m = surf.m, n = surf.n;
    const Mat nu = normal_frame(surf, x);
    const Vec phi_x = surf.embed(x);
    Fiber fiber;
    fiber.x = x;

    for (const auto& sheet : f.sheets) {
        Vec v = sub(sheet.g.eval(x), surf.phi.eval(x));
        auto xi_of = [&](const Vec& vv) {
            Vec xi = phi_x;
            for (int i = 0; i < n; ++i) axpy(xi, vv[i], nu[i]);
            return xi;
        };
        auto residual_of = [&](const Vec& vv) {
            const Vec xi = xi_of(vv);
            Vec head(xi.begin(), xi.begin() + m);
            const Vec img = sheet.g.eval(head);
            Vec r(n);
            for (int i = 0; i < n; ++i) r[i] = xi[m + i] - img[i];
            return r;
        };

        Vec r = residual_of(v);
        double rn = norm(r);
        int it = 0;
        while (rn > 1e-13 && it < 50) {
            const Vec xi = xi_of(v);
            Vec head(xi.begin(), xi.begin() + m);
            const Mat dg = sheet.g.jacobian(head);
            Mat jac = zeros(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double a = nu[j][m + i];
                    for (int k = 0; k < m; ++k) a -= dg[i][k] * nu[j][k];
                    jac[i][j] = a;
                }
            Vec step;
            if (!solve_linear(jac, r, step))
                throw solver_error("solve_fiber: singular Newton system");
            double lambda = 1.0;
            Vec v_next = v;
            Vec r_next = r;
            double rn_next = rn;
            for (int halving = 0; halving < 30; ++halving) {
                v_next = v;
                axpy(v_next, -lambda, step);
                r_next = residual_of(v_next);
                rn_next = norm(r_next);
                if (rn_next < rn) break;
                lambda *= 0.5;
            }
            if (!(rn_next < rn)) break; // no progress, bail to the residual gate
            v = v_next;
            r = r_next;
            rn = rn_next;
            ++it;
        }
        if (rn > 1e-10) throw solver_error("solve_fiber: Newton residual above 1e-10");
        if (!(norm(v) < c0)) throw thickness_error("solve_fiber: root escaped the fiber radius");
        fiber.atoms.push_back({xi_of(v), v, sheet.mult, rn, it});
    }

    // Merge coincident roots of distinct sheets.
    std::vector<FiberAtom> merged;
    std::vector<char> used(fiber.atoms.size(), false);
    for (std::size_t i = 0; i < fiber.atoms.size(); ++i) {
        if (used[i]) continue;
        FiberAtom acc = fiber.atoms[i];
        Vec vsum = scaled(acc.vcoord, acc.mult);
        for (std::size_t j = i + 1; j < fiber.atoms.size(); ++j) {
            if (used[j]) continue;
            if (dist(fiber.atoms[j].vcoord, acc.vcoord) <= 1e-8) {
                used[j] = true;
                axpy(vsum, static_cast<double>(fiber.atoms[j].mult), fiber.atoms[j].vcoord);
                acc.mult += fiber.atoms[j].mult;
                acc.residual = std::max(acc.residual, fiber.atoms[j].residual);
                acc.iters = std::max(acc.iters, fiber.atoms[j].iters);
            }
        }
        acc.vcoord = scaled(vsum, 1.0 / acc.mult);
        Vec xi = phi_x;
        for (int i2 = 0; i2 < n; ++i2) axpy(xi, acc.vcoord[i2], nu[i2]);
        acc.xi = xi;
        merged.push_back(std::move(acc));
    }
    fiber.atoms = std::move(merged);
    return fiber;
}

/// The reparametrized field N sampled on a grid over B_s: per mesh vertex
/// the normal frame and the fiber of f through it.
struct NormalField {
    GraphSurface surface;
    AnalyticQField field;
    double c0 = 0.0;
    int mesh_res = 0;
    SampledDomain mesh;
    std::vector<Mat> frames;
    std::vector<Fiber> fibers;

    QPoint displacement_at(int p) const {
        return fibers[p].displacement_point(surface.embed(mesh.points[p]),
                                            surface.m + surface.n);
    }

    double sup_norm() const {
        double s = 0.0;
        for (int p = 0; p < mesh.size(); ++p) s = std::max(s, qpoint_norm(displacement_at(p)));
        return s;
    }
};

inline NormalField build_normal_field(const GraphSurface& surf, const AnalyticQField& f,
                                      double r, double c0, int mesh_res = 33, int threads = 1) {
    const SmallnessReport gates = check_smallness(surf, f, r, surf.s, c0, mesh_res);
    if (!gates.pass) throw smallness_error("build_normal_field: smallness gates failed");
    NormalField nf;
    nf.surface = surf;
    nf.field = f;
    nf.c0 = c0;
    nf.mesh_res = mesh_res;
    nf.mesh = ball_grid_domain(surf.m, surf.s, mesh_res);
    const int np = nf.mesh.size();
    nf.frames.resize(np);
    nf.fibers.resize(np);
    parallel_for(np, threads, [&](int p) {
        nf.frames[p] = normal_frame(surf, nf.mesh.points[p]);
        nf.fibers[p] = solve_fiber(surf, f, nf.mesh.points[p], c0);
    });
    return nf;
}

/// Orthogonal projection onto the surface: the base point y with
/// zeta - Phi(y) orthogonal to every tangent, found by Newton iteration.
inline std::optional<Vec> nearest_point(const GraphSurface& surf, const Vec& zeta) {
    const int m = surf.m, n = surf.n;
    Vec y(zeta.begin(), zeta.begin() + m);
    for (int it = 0; it < 50; ++it) {
        const Vec phi_y = surf.embed(y);
        const Mat t = surf.tangents(y);
        const Vec diff = sub(zeta, phi_y);
        Vec res(m);
        for (int i = 0; i < m; ++i) res[i] = dot(diff, t[i]);
        if (norm(res) <= 1e-12) return y;
        std::vector<Mat> hess(n);
        for (int rr = 0; rr < n; ++rr) hess[rr] = surf.phi.hessian(rr, y);
        Mat jac = zeros(m, m);
        for (int i = 0; i < m; ++i) {
            for (int k = 0; k < m; ++k) {
                double a = -dot(t[k], t[i]);
                for (int rr = 0; rr < n; ++rr) a += diff[m + rr] * hess[rr][i][k];
                jac[i][k] = a;
            }
        }
        Vec step;
        if (!solve_linear(jac, res, step)) return std::nullopt;
        axpy(y, -1.0, step);
    }
    return std::nullopt;
}

} // namespace qgmt
