#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qgmt/qgmt.hpp"
#include "test_support.hpp"

using namespace qgmt;
using qgmt::testing::field_on;
using qgmt::testing::path_complex;
using qgmt::testing::tri_grid_complex;
using qgmt::testing::vertex_chain;

namespace {

int g_failures = 0;

void require(bool ok, const std::string& what) {
    if (!ok) throw std::runtime_error(what);
}

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

/// Runs one acceptance criterion, times it and prints a single verdict line.
/// The body returns a detail string on success and throws on failure.
template <class Body>
void criterion(int number, const char* tag, double time_limit, Body&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
        detail = body();
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (ok && secs > time_limit) {
        ok = false;
        detail = "exceeded time budget of " + fmt("%.0f", time_limit) + " s";
    }
    std::printf("criterion %d %s: %s (%.2f s%s%s)\n", number, tag, ok ? "PASS" : "FAIL", secs,
                detail.empty() ? "" : "; ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

struct BankRun {
    ReparamScenario sc;
    NormalField nf;
    EstimateReport est;
};

std::vector<BankRun> g_bank_runs;

std::string metric_oracle() {
    Rng rng(101);
    double worst = 0.0;
    for (int c = 0; c < 1000; ++c) {
        const int q = 1 + rng.index(6);
        const int n = 1 + rng.index(4);
        const QPoint a = random_qpoint(rng, q, n);
        const QPoint b = random_qpoint(rng, q, n);
        worst = std::max(worst, std::abs(distance(a, b) - brute_force_distance(a, b)));
    }
    require(worst <= 1e-12, "oracle deviation " + fmt("%.3e", worst));

    double min_slack = std::numeric_limits<double>::infinity();
    for (int c = 0; c < 1000; ++c) {
        const int q = 1 + rng.index(6);
        const int n = 1 + rng.index(4);
        const QPoint a = random_qpoint(rng, q, n);
        const QPoint b = random_qpoint(rng, q, n);
        const QPoint cc = random_qpoint(rng, q, n);
        min_slack = std::min(min_slack, distance(a, b) + distance(b, cc) - distance(a, cc));
    }
    require(min_slack >= -1e-12, "triangle slack " + fmt("%.3e", min_slack));
    return "max oracle gap " + fmt("%.1e", worst) + ", min triangle slack " +
           fmt("%.1e", min_slack);
}

std::string decompose_bank() {
    Rng rng(202);
    for (int c = 0; c < 100; ++c) {
        const int q = 2 + rng.index(3);
        const int n = 1 + rng.index(2);
        const int dim = 1 + rng.index(2);
        const DecomposeInstance inst = random_separated_instance(rng, q, n, dim, 4);
        const auto split = decompose(inst.field, inst.p0, inst.i, inst.j);
        require(split.has_value(), "separated case " + std::to_string(c) + " rejected");
        const double lhat = lipschitz_estimate(inst.field);
        require(lipschitz_estimate(split->first) <= lhat + 1e-9 &&
                    lipschitz_estimate(split->second) <= lhat + 1e-9,
                "part slope exceeds field slope in case " + std::to_string(c));
        for (int p = 0; p < inst.field.domain.size(); ++p) {
            std::vector<QAtom> atoms;
            for (const auto& a : split->first.samples[p].atoms) atoms.push_back(a);
            for (const auto& a : split->second.samples[p].atoms) atoms.push_back(a);
            require(QPoint::from_atoms(n, std::move(atoms)) == inst.field.samples[p],
                    "merge mismatch in case " + std::to_string(c));
            for (const auto& a : split->first.samples[p].atoms)
                for (const auto& b : split->second.samples[p].atoms)
                    require(dist(a.v, b.v) > 0.0,
                            "part supports meet in case " + std::to_string(c));
        }
    }
    for (int c = 0; c < 100; ++c) {
        const int q = 2 + rng.index(3);
        const int n = 1 + rng.index(2);
        const int dim = 1 + rng.index(2);
        const DecomposeInstance inst = random_entangled_instance(rng, q, n, dim, 4);
        require(!decompose(inst.field, inst.p0, inst.i, inst.j).has_value(),
                "entangled case " + std::to_string(c) + " accepted");
    }
    return "100 separated split, 100 entangled refused";
}

std::string boundary_commutation() {
    const SuiteResult res = boundary_commutation_suite(303, 50);
    require(res.failures == 0,
            std::to_string(res.failures) + "/" + std::to_string(res.cases) + " cases failed");

    Rng rng(304);
    for (int c = 0; c < 200; ++c) {
        const int dim = 1 + rng.index(2);
        const SampledDomain dom = dim == 1 ? grid_domain({{5}, {0.0}, {0.25}})
                                           : grid_domain({{4, 4}, {0.0, 0.0}, {1.0 / 3, 1.0 / 3}});
        const SimplicialChain chain = random_domain_chain(rng, dom, c % 2 == 0);
        require(boundary(boundary(chain)).is_zero(),
                "boundary of boundary nonzero in case " + std::to_string(c));
    }
    return std::to_string(res.cases) + " commutation cases, 200 closed boundaries";
}

std::string homotopy_identities() {
    Rng rng(404);
    for (int c = 0; c < 100; ++c) {
        const int dim = 1 + rng.index(2);
        const int target = dim + rng.index(4 - dim);
        const HomotopyInstance inst = random_homotopy_instance(rng, dim, target, 3);
        const SimplicialChain fill = affine_homotopy_fill(inst.f, inst.g, inst.p);
        const SimplicialChain rhs =
            canonical(pushforward(inst.g, inst.p) - pushforward(inst.f, inst.p) -
                      affine_homotopy_fill(inst.f, inst.g, boundary(inst.p)));
        require(chains_equal(boundary(fill), rhs),
                "prism boundary identity failed in case " + std::to_string(c));
        require(mass(fill) <= inst.sup_diff * inst.lip_sum * mass(inst.p) + 1e-9,
                "prism mass bound failed in case " + std::to_string(c));
    }
    return "100 prism identities and mass bounds";
}

std::string flat_norm() {
    const SimplicialComplex path = path_complex(0.0, 1.0, 5);
    const FlatNormResult unit = simplicial_flat_norm(vertex_chain({1.0}) - vertex_chain({0.0}), path);
    require(unit.value == 1.0, "endpoint difference flat norm " + fmt("%.17g", unit.value));

    const GridSpec base_grid{{4, 4}, {0.0, 0.0}, {1.0 / 3, 1.0 / 3}};
    const SimplicialComplex k_small = tri_grid_complex(base_grid);
    const SampledDomain dom_small = grid_domain(base_grid);
    Rng rng(505);
    for (int c = 0; c < 20; ++c) {
        const SimplicialChain t = random_domain_chain(rng, dom_small, false);
        require(simplicial_flat_norm(t, k_small).value <= mass(t) + 1e-9,
                "flat norm exceeds mass in case " + std::to_string(c));
    }

    const GridSpec g{{5, 5}, {0.0, 0.0}, {0.25, 0.25}};
    const SampledDomain dom = grid_domain(g);
    const SimplicialComplex k_base = tri_grid_complex(g);
    const SimplicialComplex k_image = tri_grid_complex({{9, 9}, {0.0, 0.0}, {0.125, 0.125}});
    auto row_chain = [](double y) {
        SimplicialChain c{1, 2, {}};
        for (int i = 0; i < 4; ++i)
            c.terms.push_back({{Vec{0.25 * i, y}, Vec{0.25 * (i + 1), y}}, 1});
        return canonical(c);
    };
    double max_ratio = 0.0;
    int cases = 0;
    for (int q = 1; q <= 2; ++q) {
        const SampledQField u = field_on(dom, q, 2, [q](const Vec& x) {
            std::vector<QAtom> atoms{{{0.5 * x[0], 0.5 * x[1]}, 1}};
            if (q == 2) atoms.push_back({{0.5 * x[0], 0.5 * x[1] + 0.5}, 1});
            return QPoint::from_atoms(2, std::move(atoms));
        });
        const SheetSelection sel = select_sheets(u);
        for (int r1 = 0; r1 < 5; ++r1)
            for (int r2 = r1 + 1; r2 < 5; ++r2) {
                const StabilityReport rep = flat_pushforward_stability(
                    u, sel, row_chain(0.25 * r1), row_chain(0.25 * r2), k_base, k_image);
                require(rep.finite && rep.pass,
                        "stability ratio not finite or above bound for rows " +
                            std::to_string(r1) + "," + std::to_string(r2));
                max_ratio = std::max(max_ratio, rep.ratio);
                ++cases;
            }
    }
    require(cases == 20, "expected 20 stability cases");
    return "flat norm of endpoint pair exactly 1, max stability ratio " + fmt("%.3f", max_ratio);
}

std::string multisection_equivalence() {
    Rng rng(606);
    for (int c = 0; c < 100; ++c) {
        const int dim = 1 + rng.index(2);
        const int q = 1 + rng.index(4);
        const int n = 1 + rng.index(3);
        const SampledQField u = random_pl_field(rng, dim, q, n, 4, 8.0, 0.3);
        const SampledQField back = to_qfield(from_qfield(u));
        for (int p = 0; p < u.domain.size(); ++p)
            require(back.samples[p] == u.samples[p],
                    "roundtrip changed sample " + std::to_string(p) + " in case " +
                        std::to_string(c));
    }

    double max_tau = 0.0;
    for (int c = 0; c < 100; ++c) {
        const int dim = 1 + rng.index(2);
        const int q = 1 + rng.index(4);
        const int n = 1 + rng.index(3);
        const Multisection m = random_coherent_multisection(rng, q, n, dim, 5);
        const double tau = check_cone(m, std::numeric_limits<double>::infinity()).empirical_tau;
        const double lhat = lipschitz_from_cone(m);
        require(lhat <= std::sqrt(static_cast<double>(q)) * tau + 1e-9,
                "slope transfer failed in case " + std::to_string(c));
        max_tau = std::max(max_tau, tau);
    }

    const SampledQField jump = field_on(interval_domain(-1.0, 1.0, 9), 1, 1, [](const Vec& x) {
        return splat({x[0] < 0.0 ? -1.0 : 1.0}, 1);
    });
    require(!check_coherence(from_qfield(jump), 0.5).pass, "sign jump passed coherence");
    return "100 exact roundtrips, 100 cone transfers (max tau " + fmt("%.2f", max_tau) +
           "), sign jump flagged";
}

std::string reparam_estimates() {
    const std::vector<ReparamScenario> bank = reparam_bank();
    require(bank.size() >= 20, "bank holds only " + std::to_string(bank.size()) + " scenarios");

    g_bank_runs.clear();
    g_bank_runs.reserve(bank.size());
    for (const ReparamScenario& sc : bank) {
        NormalField nf = build_normal_field(sc.surface(), sc.field(), sc.r, sc.c0, sc.mesh_res, 4);
        EstimateReport est = verify_estimates(nf);
        require(est.pass(), sc.name + ": mesh level estimates failed");

        if (sc.name.find("-flat-") != std::string::npos) {
            const AnalyticQField f = sc.field();
            for (int p = 0; p < nf.mesh.size(); ++p) {
                const QPoint disp = nf.displacement_at(p);
                std::vector<QAtom> tail;
                for (const auto& a : disp.atoms) {
                    for (int i = 0; i < sc.m; ++i)
                        require(std::abs(a.v[i]) <= 1e-12, sc.name + ": tangential displacement");
                    tail.push_back({Vec(a.v.begin() + sc.m, a.v.end()), a.mult});
                }
                require(distance(QPoint::from_atoms(sc.n, std::move(tail)),
                                 f.eval(nf.mesh.points[p])) <= 1e-12,
                        sc.name + ": flat scenario does not reproduce the field");
            }
        }
        g_bank_runs.push_back({sc, std::move(nf), est});
    }

    double max_c_lip = 0.0, max_c_cent = 0.0, max_c_vert = 0.0, max_drift = 0.0;
    auto drift = [](double coarse, double fine) {
        return std::abs(fine - coarse) / std::max(std::abs(coarse), 1e-12);
    };
    for (const BankRun& run : g_bank_runs) {
        ReparamScenario sc = run.sc;
        sc.mesh_res = 65;
        const NormalField nf =
            build_normal_field(sc.surface(), sc.field(), sc.r, sc.c0, sc.mesh_res, 4);
        const EstimateReport est = verify_estimates(nf);
        require(est.pass(), sc.name + ": estimates failed at refinement 65");
        for (double d : {drift(run.est.c_lip, est.c_lip),
                         drift(run.est.c_centering, est.c_centering),
                         drift(run.est.c_vertical, est.c_vertical)}) {
            max_drift = std::max(max_drift, d);
            require(d <= 0.20, sc.name + ": constant drifted " + fmt("%.1f", 100.0 * d) +
                                   "% under refinement");
        }
        max_c_lip = std::max(max_c_lip, est.c_lip);
        max_c_cent = std::max(max_c_cent, est.c_centering);
        max_c_vert = std::max(max_c_vert, est.c_vertical);
    }
    return std::to_string(bank.size()) + " scenarios; empirical constants: lip " +
           fmt("%.3f", max_c_lip) + ", centering " + fmt("%.3f", max_c_cent) + ", vertical " +
           fmt("%.3f", max_c_vert) + "; max refinement drift " + fmt("%.1f", 100.0 * max_drift) +
           "%";
}

std::string graph_identity() {
    if (g_bank_runs.empty()) {
        for (const ReparamScenario& sc : reparam_bank()) {
            NormalField nf =
                build_normal_field(sc.surface(), sc.field(), sc.r, sc.c0, sc.mesh_res, 4);
            EstimateReport est = verify_estimates(nf);
            g_bank_runs.push_back({sc, std::move(nf), est});
        }
    }
    double max_fill = 0.0;
    for (const BankRun& run : g_bank_runs) {
        const GraphIdentityReport gid = verify_graph_identity(run.nf);
        require(gid.hausdorff_pass && gid.hausdorff <= gid.bound,
                run.sc.name + ": Hausdorff gap " + fmt("%.3e", gid.hausdorff) + " above bound " +
                    fmt("%.3e", gid.bound));
        for (const auto& probe : gid.probes)
            require(probe.count_reparam == probe.count_graph,
                    run.sc.name + ": probe fiber multiplicities differ");
        require(gid.pass(), run.sc.name + ": graph identity failed");
        if (gid.bound > 0.0) max_fill = std::max(max_fill, gid.hausdorff / gid.bound);
    }
    return std::to_string(g_bank_runs.size()) + " scenarios, max gap/bound " +
           fmt("%.4f", max_fill);
}

} // namespace

int main() {
    criterion(1, "metric-oracle", 5.0, metric_oracle);
    criterion(2, "decomposition", 5.0, decompose_bank);
    criterion(3, "boundary-commutation", 10.0, boundary_commutation);
    criterion(4, "homotopy-identities", 5.0, homotopy_identities);
    criterion(5, "flat-norm", 10.0, flat_norm);
    criterion(6, "multisection", 5.0, multisection_equivalence);
    criterion(7, "reparametrization", 60.0, reparam_estimates);
    criterion(8, "graph-identity", 10.0, graph_identity);
    if (g_failures == 0) {
        std::printf("all 8 criteria passed\n");
    } else {
        std::printf("%d criteria failed\n", g_failures);
    }
    return g_failures;
}
