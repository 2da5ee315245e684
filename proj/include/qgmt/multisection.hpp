#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "qgmt/errors.hpp"
#include "qgmt/qfield.hpp"

namespace qgmt {

/// Integer multiplicity assignment on the sampled trivial bundle
/// base x R^n: per base point, a list of carried values with multiplicities.
/// Unlike a Q-valued field, the per point mass is not forced to be Q, which
/// is exactly what the conservation check is for.
struct Multisection {
    SampledDomain base;
    int q = 0;
    int n = 0;
    std::vector<std::vector<QAtom>> entries;

    void validate_shape() const {
        if (entries.size() != base.points.size())
            throw input_error("Multisection: one entry list per base point required");
        for (const auto& list : entries)
            for (const auto& a : list) {
                if (static_cast<int>(a.v.size()) != n)
                    throw input_error("Multisection: value dimension mismatch");
                if (a.mult <= 0) throw input_error("Multisection: nonpositive multiplicity");
            }
    }

    int mass_at(int p) const {
        int s = 0;
        for (const auto& a : entries[p]) s += a.mult;
        return s;
    }
};

inline Multisection from_qfield(const SampledQField& u) {
    u.validate();
    Multisection m{u.domain, u.q, u.n, {}};
    for (const auto& s : u.samples) m.entries.push_back(s.atoms);
    return m;
}

/// Rebuilds the Q-valued field; every base point must carry total mass Q.
inline SampledQField to_qfield(const Multisection& m) {
    m.validate_shape();
    SampledQField u{m.base, {}, m.q, m.n};
    for (std::size_t p = 0; p < m.entries.size(); ++p) {
        if (m.mass_at(static_cast<int>(p)) != m.q)
            throw invariant_error("to_qfield: base point with total multiplicity != Q");
        u.samples.push_back(QPoint::from_atoms(m.n, m.entries[p]));
    }
    return u;
}

/// Smallest distance between distinct values in one fiber, over all base
/// points; infinity when every fiber carries a single value.
inline double min_intra_fiber_gap(const Multisection& m) {
    double gap = std::numeric_limits<double>::infinity();
    for (const auto& list : m.entries)
        for (std::size_t i = 0; i < list.size(); ++i)
            for (std::size_t j = i + 1; j < list.size(); ++j)
                gap = std::min(gap, dist(list[i].v, list[j].v));
    return gap;
}

struct CoherenceViolation {
    int p = 0;
    int neighbor = 0;
    int atom = 0;
    int ball_mass = 0;
    int expected = 0;
};

struct CoherenceReport {
    bool pass = true;
    double sep = 0.0;
    int checked = 0;
    std::vector<CoherenceViolation> violations;
};

/// Multiplicity conservation across adjacent fibers: for every value v at p,
/// the mass of the neighboring fiber inside the ball of radius sep around v
/// must equal the mass at v.  Requires sep at most half the smallest
/// intra-fiber gap so the balls are disjoint.
inline CoherenceReport check_coherence(const Multisection& m, double sep) {
    m.validate_shape();
    if (!(sep > 0.0)) throw input_error("check_coherence: sep must be positive");
    const double gap = min_intra_fiber_gap(m);
    if (sep > 0.5 * gap) throw input_error("check_coherence: sep exceeds half the fiber gap, balls overlap");

    CoherenceReport rep;
    rep.sep = sep;
    for (const auto& e : m.base.edges) {
        for (int dir = 0; dir < 2; ++dir) {
            const int p = e[dir];
            const int nb = e[1 - dir];
            for (std::size_t ai = 0; ai < m.entries[p].size(); ++ai) {
                const auto& atom = m.entries[p][ai];
                int ball = 0;
                for (const auto& w : m.entries[nb])
                    if (dist(w.v, atom.v) < sep) ball += w.mult;
                ++rep.checked;
                if (ball != atom.mult) {
                    rep.pass = false;
                    rep.violations.push_back({p, nb, static_cast<int>(ai), ball, atom.mult});
                }
            }
        }
    }
    return rep;
}

struct ConeViolation {
    int p = 0;
    int neighbor = 0;
    int atom = 0;
    int neighbor_atom = 0;
    double ratio = 0.0;
};

struct ConeReport {
    bool pass = true;
    double tau = 0.0;
    double empirical_tau = 0.0;
    int checked = 0;
    std::vector<ConeViolation> violations;
};

/// Sampled cone condition: values at adjacent base points that track a value
/// v (those closer to v than half its fiber gap) must stay inside the cone
/// of slope tau.  Also reports the smallest slope that would pass.
inline ConeReport check_cone(const Multisection& m, double tau) {
    m.validate_shape();
    ConeReport rep;
    rep.tau = tau;
    for (std::size_t ei = 0; ei < m.base.edges.size(); ++ei) {
        const auto& e = m.base.edges[ei];
        const double step = m.base.edge_lengths[ei];
        if (!(step > 0.0)) throw input_error("check_cone: zero length edge");
        for (int dir = 0; dir < 2; ++dir) {
            const int p = e[dir];
            const int nb = e[1 - dir];
            for (std::size_t ai = 0; ai < m.entries[p].size(); ++ai) {
                const auto& atom = m.entries[p][ai];
                double scale = std::numeric_limits<double>::infinity();
                for (std::size_t aj = 0; aj < m.entries[p].size(); ++aj)
                    if (aj != ai) scale = std::min(scale, 0.5 * dist(atom.v, m.entries[p][aj].v));
                for (std::size_t bi = 0; bi < m.entries[nb].size(); ++bi) {
                    const double move = dist(m.entries[nb][bi].v, atom.v);
                    if (!(move < scale)) continue;
                    ++rep.checked;
                    const double ratio = move / step;
                    rep.empirical_tau = std::max(rep.empirical_tau, ratio);
                    if (ratio > tau) {
                        rep.pass = false;
                        rep.violations.push_back({p, nb, static_cast<int>(ai),
                                                  static_cast<int>(bi), ratio});
                    }
                }
            }
        }
    }
    return rep;
}

/// Slope bound of the induced Q-valued field from the cone constant: checks
/// coherence at the widest admissible ball radius, then certifies
/// lipschitz_estimate <= sqrt(Q) * empirical cone slope.
inline double lipschitz_from_cone(const Multisection& m) {
    const SampledQField u = to_qfield(m);
    const double gap = min_intra_fiber_gap(m);
    if (std::isfinite(gap)) {
        const CoherenceReport coh = check_coherence(m, 0.5 * gap);
        if (!coh.pass) throw invariant_error("lipschitz_from_cone: multisection is not coherent");
    }
    const double tau = check_cone(m, std::numeric_limits<double>::infinity()).empirical_tau;
    const double lhat = lipschitz_estimate(u);
    if (lhat > std::sqrt(static_cast<double>(m.q)) * tau + 1e-9)
        throw invariant_error("lipschitz_from_cone: slope exceeds sqrt(Q) times the cone constant");
    return lhat;
}

} // namespace qgmt
