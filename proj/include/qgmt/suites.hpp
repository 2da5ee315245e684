#pragma once

#include <string>

#include "qgmt/brute_force.hpp"
#include "qgmt/generators.hpp"
#include "qgmt/reparam_checks.hpp"
#include "qgmt/scenario_bank.hpp"
#include "qgmt/serialization.hpp"

namespace qgmt {

struct SuiteResult {
    std::string name;
    std::uint64_t seed = 0;
    int cases = 0;
    int failures = 0;
    json details;

    bool pass() const { return failures == 0; }
};

/// Metric axioms of the matching distance under randomized inputs: agreement
/// with the factorial matching oracle, symmetry, identity and the triangle
/// inequality.
inline SuiteResult metric_axioms_suite(std::uint64_t seed, int cases) {
    Rng rng(seed);
    SuiteResult res{"metric-axioms", seed, cases, 0, {}};
    double max_dev = 0.0;
    double min_slack = std::numeric_limits<double>::infinity();
    for (int c = 0; c < cases; ++c) {
        const int q = 1 + static_cast<int>(rng.index(6));
        const int n = 1 + static_cast<int>(rng.index(4));
        const QPoint a = random_qpoint(rng, q, n);
        const QPoint b = random_qpoint(rng, q, n);
        const QPoint t = random_qpoint(rng, q, n);
        bool ok = true;
        const double d = distance(a, b);
        const double dev = std::abs(d - brute_force_distance(a, b));
        max_dev = std::max(max_dev, dev);
        if (dev > 1e-12) ok = false;
        if (std::abs(distance(b, a) - d) > 1e-12) ok = false;
        if (distance(a, a) > 1e-12) ok = false;
        const double slack = distance(a, t) + distance(t, b) - d;
        min_slack = std::min(min_slack, slack);
        if (slack < -1e-12) ok = false;
        if (!ok) ++res.failures;
    }
    res.details = {{"max_oracle_deviation", max_dev}, {"min_triangle_slack", min_slack}};
    return res;
}

/// Push-forward boundary compatibility on random piecewise linear fields:
/// boundary and push-forward commute exactly, for the image chain and for
/// the graph chain, and the boundary of a boundary vanishes.
inline SuiteResult boundary_commutation_suite(std::uint64_t seed, int cases) {
    Rng rng(seed);
    SuiteResult res{"boundary-commutation", seed, cases, 0, {}};
    int max_terms = 0;
    for (int c = 0; c < cases; ++c) {
        const int dim = 1 + static_cast<int>(rng.index(2));
        const int q = 1 + static_cast<int>(rng.index(3));
        // Target dimension at least the chain dimension: collapsed images
        // drop out of the push-forward and listwise equality cannot see the
        // cancellation that happens at the level of currents.
        const int n = dim == 1 ? 1 + static_cast<int>(rng.index(2)) : 2;
        const int res_pts = dim == 1 ? 5 + static_cast<int>(rng.index(5))
                                     : 3 + static_cast<int>(rng.index(2));
        const SampledQField u = random_pl_field(rng, dim, q, n, res_pts, 10.0, 1.0);
        const SheetSelection sel = select_sheets(u);
        const SimplicialChain p = random_domain_chain(rng, u.domain, false);
        bool ok = true;
        const CommutationReport image_rep = check_boundary_commutation(u, sel, p);
        if (!image_rep.pass) ok = false;
        const SimplicialChain gp = graph_chain(u, sel, p);
        if (!chains_equal(boundary(gp), graph_chain(u, sel, boundary(p)))) ok = false;
        if (!canonical(boundary(boundary(qpushforward(u, sel, p)))).is_zero()) ok = false;
        max_terms = std::max(max_terms, image_rep.lhs_terms);
        if (!ok) ++res.failures;
    }
    res.details = {{"max_boundary_terms", max_terms}};
    return res;
}

/// Multisection round trips, coherence of smooth separated instances and the
/// cone-to-slope bound.
inline SuiteResult multisection_equivalence_suite(std::uint64_t seed, int cases) {
    Rng rng(seed);
    SuiteResult res{"multisection-equivalence", seed, cases, 0, {}};
    double max_tau = 0.0;
    for (int c = 0; c < cases; ++c) {
        const int dim = 1 + static_cast<int>(rng.index(2));
        const int q = 1 + static_cast<int>(rng.index(4));
        const int n = 1 + static_cast<int>(rng.index(3));
        const int res_pts = 4 + static_cast<int>(rng.index(4));
        bool ok = true;

        const SampledQField u = random_pl_field(rng, dim, q, n, res_pts, 10.0, 1.0);
        const Multisection ms_u = from_qfield(u);
        const SampledQField back = to_qfield(ms_u);
        if (back.q != u.q || back.n != u.n) ok = false;
        for (int p = 0; ok && p < u.domain.size(); ++p)
            if (!(back.samples[p] == u.samples[p])) ok = false;

        const Multisection ms = random_coherent_multisection(rng, q, n, dim, res_pts);
        const double gap = min_intra_fiber_gap(ms);
        if (std::isfinite(gap) && !check_coherence(ms, 0.5 * gap).pass) ok = false;
        const double tau = check_cone(ms, std::numeric_limits<double>::infinity()).empirical_tau;
        max_tau = std::max(max_tau, tau);
        try {
            const double lhat = lipschitz_from_cone(ms);
            if (lhat > std::sqrt(static_cast<double>(q)) * tau + 1e-9) ok = false;
        } catch (const error&) {
            ok = false;
        }
        if (!ok) ++res.failures;
    }
    res.details = {{"max_empirical_tau", max_tau}};
    return res;
}

/// Randomized reparametrization scenarios at a light mesh: construction must
/// clear the smallness gates and every asserted estimate must hold.
inline SuiteResult reparam_estimates_suite(std::uint64_t seed, int cases, int threads = 1) {
    Rng rng(seed);
    SuiteResult res{"reparam-estimates", seed, cases, 0, {}};
    json runs = json::array();
    for (int c = 0; c < cases; ++c) {
        const int m = 1 + static_cast<int>(rng.index(2));
        const int n = 1 + static_cast<int>(rng.index(2));
        const int q = 1 + static_cast<int>(rng.index(3));
        const int deg = static_cast<int>(rng.index(3));
        ReparamScenario sc = detail::scenario_from(rng, m, n, q, deg);
        sc.mesh_res = 17;
        sc.name = "suite-" + std::to_string(c);
        bool ok = true;
        json entry{{"name", sc.name}, {"m", m}, {"n", n}, {"Q", q}, {"degree", deg}};
        try {
            const GraphSurface surf = sc.surface();
            const AnalyticQField f = sc.field();
            const NormalField nf =
                build_normal_field(surf, f, sc.r, sc.c0, sc.mesh_res, threads);
            const EstimateReport rep = verify_estimates(nf);
            ok = rep.pass();
            entry["estimates_pass"] = rep.pass();
            entry["c_lip"] = rep.c_lip;
            entry["c_centering"] = rep.c_centering;
            entry["c_vertical"] = rep.c_vertical;
        } catch (const error& e) {
            ok = false;
            entry["error"] = e.what();
        }
        runs.push_back(std::move(entry));
        if (!ok) ++res.failures;
    }
    res.details = {{"runs", runs}};
    return res;
}

inline json to_json(const SuiteResult& r) {
    return {{"suite", r.name},       {"seed", r.seed},       {"cases", r.cases},
            {"failures", r.failures}, {"pass", r.pass()},    {"details", r.details}};
}

} // namespace qgmt
