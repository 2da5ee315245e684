#pragma once

#include <cmath>
#include <vector>

#include "qgmt/errors.hpp"
#include "qgmt/linalg.hpp"
#include "qgmt/qpoint.hpp"
#include "qgmt/qfield.hpp"

namespace qgmt {

struct Monomial {
    double c = 0.0;
    std::vector<int> e;
};

/// Real polynomial in a fixed number of variables with exact symbolic
/// partial derivatives.
struct Polynomial {
    int vars = 0;
    std::vector<Monomial> terms;

    double eval(const Vec& x) const {
        double s = 0.0;
        for (const auto& t : terms) {
            double v = t.c;
            for (int a = 0; a < vars; ++a)
                for (int k = 0; k < t.e[a]; ++k) v *= x[a];
            s += v;
        }
        return s;
    }

    Polynomial partial(int axis) const {
        Polynomial p{vars, {}};
        for (const auto& t : terms) {
            if (t.e[axis] == 0) continue;
            Monomial d = t;
            d.c *= t.e[axis];
            --d.e[axis];
            p.terms.push_back(std::move(d));
        }
        return p;
    }
};

inline Polynomial constant_poly(int vars, double c) {
    Monomial m{c, std::vector<int>(vars, 0)};
    return {vars, {m}};
}

inline Polynomial linear_poly(int vars, double c0, const Vec& slope) {
    Polynomial p = constant_poly(vars, c0);
    for (int a = 0; a < vars; ++a) {
        Monomial m{slope[a], std::vector<int>(vars, 0)};
        m.e[a] = 1;
        p.terms.push_back(std::move(m));
    }
    return p;
}

/// Polynomial map R^m -> R^n, one polynomial per output component.
struct PolyMap {
    int m = 0;
    int n = 0;
    std::vector<Polynomial> comp;

    void validate() const {
        if (static_cast<int>(comp.size()) != n) throw input_error("PolyMap: wrong component count");
        for (const auto& p : comp)
            if (p.vars != m) throw input_error("PolyMap: component with wrong variable count");
    }

    Vec eval(const Vec& x) const {
        Vec y(n);
        for (int i = 0; i < n; ++i) y[i] = comp[i].eval(x);
        return y;
    }

    /// n x m matrix of first partials.
    Mat jacobian(const Vec& x) const {
        Mat j = zeros(n, m);
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < m; ++a) j[i][a] = comp[i].partial(a).eval(x);
        return j;
    }

    /// m x m second partial matrix of one component.
    Mat hessian(int i, const Vec& x) const {
        Mat h = zeros(m, m);
        for (int a = 0; a < m; ++a) {
            const Polynomial pa = comp[i].partial(a);
            for (int b = 0; b < m; ++b) h[a][b] = pa.partial(b).eval(x);
        }
        return h;
    }

    /// Frobenius norm of the full second derivative tensor.
    double d2_norm(const Vec& x) const {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            const Mat h = hessian(i, x);
            for (const auto& row : h) s += norm2(row);
        }
        return std::sqrt(s);
    }

    /// Frobenius norm of the full third derivative tensor.
    double d3_norm(const Vec& x) const {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < m; ++a) {
                const Polynomial pa = comp[i].partial(a);
                for (int b = 0; b < m; ++b) {
                    const Polynomial pab = pa.partial(b);
                    for (int c = 0; c < m; ++c) {
                        const double v = pab.partial(c).eval(x);
                        s += v * v;
                    }
                }
            }
        return std::sqrt(s);
    }
};

inline PolyMap zero_map(int m, int n) {
    PolyMap f{m, n, {}};
    for (int i = 0; i < n; ++i) f.comp.push_back(constant_poly(m, 0.0));
    return f;
}

/// Q-valued function given in closed form as polynomial sheets with
/// multiplicities.
struct AnalyticSheet {
    PolyMap g;
    int mult = 1;
};

struct AnalyticQField {
    int m = 0;
    int n = 0;
    int q = 0;
    std::vector<AnalyticSheet> sheets;

    void validate() const {
        int total = 0;
        for (const auto& s : sheets) {
            s.g.validate();
            if (s.g.m != m || s.g.n != n) throw input_error("AnalyticQField: sheet shape mismatch");
            if (s.mult <= 0) throw input_error("AnalyticQField: nonpositive sheet multiplicity");
            total += s.mult;
        }
        if (total != q) throw input_error("AnalyticQField: sheet multiplicities do not sum to Q");
    }

    QPoint eval(const Vec& x) const {
        std::vector<QAtom> atoms;
        for (const auto& s : sheets) atoms.push_back({s.g.eval(x), s.mult});
        return QPoint::from_atoms(n, std::move(atoms));
    }

    SampledQField sample(const SampledDomain& domain) const {
        validate();
        SampledQField u{domain, {}, q, n};
        u.samples.reserve(domain.points.size());
        for (const auto& p : domain.points) u.samples.push_back(eval(p));
        return u;
    }
};

} // namespace qgmt
