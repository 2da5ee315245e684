#pragma once

#include <filesystem>
#include <string>

#include "qgmt/suites.hpp"

namespace qgmt {

/// Exit codes of the command line driver.
enum ExitCode : int { kExitPass = 0, kExitAssertionFailure = 1, kExitBadInput = 2 };

namespace detail {

inline void write_report(const std::string& out_dir, const std::string& file, const json& j) {
    std::filesystem::create_directories(out_dir);
    write_text_file((std::filesystem::path(out_dir) / file).string(), j.dump(2) + "\n");
}

inline json run_metric_scenario(const json& spec) {
    json results = json::array();
    bool all_pass = true;
    for (const auto& pair : require(spec, "pairs")) {
        const QPoint a = qpoint_from_json(require(pair, "T1"));
        const QPoint b = qpoint_from_json(require(pair, "T2"));
        const double d = distance(a, b);
        json entry{{"distance", d}};
        if (pair.contains("expected")) {
            const double expected = pair["expected"].get<double>();
            const bool ok = std::abs(d - expected) <= 1e-12;
            entry["expected"] = expected;
            entry["pass"] = ok;
            if (!ok) all_pass = false;
        }
        results.push_back(std::move(entry));
    }
    return {{"kind", "metric"}, {"pairs", results}, {"pass", all_pass}};
}

inline json run_decompose_scenario(const json& spec) {
    const SampledQField u = field_from_json(require(spec, "field"));
    const int p0 = require(spec, "p0").get<int>();
    const int i = require(spec, "i").get<int>();
    const int jj = require(spec, "j").get<int>();
    const auto parts = decompose(u, p0, i, jj);
    json rep{{"kind", "decompose"}, {"separated", parts.has_value()}};
    bool pass = true;
    if (parts) {
        rep["part1"] = to_json(parts->first);
        rep["part2"] = to_json(parts->second);
        rep["lipschitz"] = {{"field", lipschitz_estimate(u)},
                            {"part1", lipschitz_estimate(parts->first)},
                            {"part2", lipschitz_estimate(parts->second)}};
    }
    if (spec.contains("expect")) {
        const std::string want = spec["expect"].get<std::string>();
        if (want != "separated" && want != "not-separated")
            throw input_error("expect must be \"separated\" or \"not-separated\"");
        pass = (want == "separated") == parts.has_value();
        rep["expect"] = want;
    }
    rep["pass"] = pass;
    return rep;
}

inline json run_pushforward_scenario(const json& spec) {
    const SampledQField u = field_from_json(require(spec, "field"));
    const SheetSelection sel = select_sheets(u);
    const SimplicialChain p = chain_from_json(require(spec, "chain"));
    const bool graph = spec.value("graph", false);
    const SimplicialChain image = graph ? graph_chain(u, sel, p) : qpushforward(u, sel, p);
    const CommutationReport comm = check_boundary_commutation(u, sel, p);
    return {{"kind", "pushforward"},
            {"graph", graph},
            {"image", to_json(image)},
            {"image_mass", mass(image)},
            {"commutation", comm.pass},
            {"pass", comm.pass}};
}

inline json run_multisection_scenario(const json& spec) {
    const Multisection ms = multisection_from_json(require(spec, "multisection"));
    json rep{{"kind", "multisection"}};
    bool pass = true;
    double sep = spec.value("sep", 0.0);
    if (!(sep > 0.0)) {
        const double gap = min_intra_fiber_gap(ms);
        sep = std::isfinite(gap) ? 0.5 * gap : 1.0;
    }
    const CoherenceReport coh = check_coherence(ms, sep);
    rep["sep"] = sep;
    rep["coherent"] = coh.pass;
    rep["coherence_violations"] = static_cast<int>(coh.violations.size());
    if (!coh.pass) pass = false;
    const double tau_limit = spec.value("tau", std::numeric_limits<double>::infinity());
    const ConeReport cone = check_cone(ms, tau_limit);
    rep["empirical_tau"] = cone.empirical_tau;
    rep["cone_pass"] = cone.pass;
    if (!cone.pass) pass = false;
    if (coh.pass) {
        const double lhat = lipschitz_from_cone(ms);
        rep["lipschitz"] = lhat;
        rep["slope_bound"] = std::sqrt(static_cast<double>(ms.q)) * cone.empirical_tau;
    }
    rep["pass"] = pass;
    return rep;
}

inline json smallness_to_json(const SmallnessReport& rep) {
    json gates = json::array();
    for (const auto& g : rep.conditions)
        gates.push_back({{"name", g.name}, {"lhs", g.lhs}, {"rhs", g.rhs}, {"pass", g.pass}});
    return {{"pass", rep.pass}, {"conditions", gates},
            {"lip_f", rep.lip_f},  {"sup_f", rep.sup_f},
            {"c_geo", rep.c_geo},  {"mesh_res", rep.mesh_res}};
}

inline json estimates_to_json(const EstimateReport& rep) {
    return {{"pass", rep.pass()},
            {"mass_pass", rep.mass_pass},
            {"residual_max", rep.residual_max},
            {"residual_pass", rep.residual_pass},
            {"normality_max", rep.normality_max},
            {"normality_pass", rep.normality_pass},
            {"lip_edge", rep.lip_edge},
            {"sup_n", rep.sup_n},
            {"bracket", rep.bracket},
            {"c_lip", rep.c_lip},
            {"th2_min_ratio", rep.th2_min_ratio},
            {"th2_max_ratio", rep.th2_max_ratio},
            {"th2_pass", rep.th2_pass},
            {"c_centering", rep.c_centering},
            {"th4_pass", rep.th4_pass},
            {"th4_max_ratio", rep.th4_max_ratio},
            {"th4_skipped", rep.th4_skipped},
            {"tau_coord", rep.tau_coord},
            {"tau_atom", rep.tau_atom},
            {"c_vertical", rep.c_vertical},
            {"lip_vs_tau_pass", rep.lip_vs_tau_pass},
            {"lip_f", rep.lip_f}};
}

inline json graph_identity_to_json(const GraphIdentityReport& rep) {
    json probes = json::array();
    for (const auto& p : rep.probes)
        probes.push_back({{"probe", p.probe},
                          {"count_reparam", p.count_reparam},
                          {"count_graph", p.count_graph}});
    return {{"pass", rep.pass()},
            {"hausdorff", rep.hausdorff},
            {"bound", rep.bound},
            {"cloud_reparam", rep.cloud_reparam},
            {"cloud_graph", rep.cloud_graph},
            {"graph_outside_tube", rep.graph_outside_tube},
            {"probes", probes}};
}

inline std::string vertices_csv(const NormalField& nf) {
    std::string csv = "vertex";
    for (int a = 0; a < nf.surface.m; ++a) csv += ",x" + std::to_string(a);
    csv += ",mass,residual_max,displacement_norm\n";
    for (int p = 0; p < nf.mesh.size(); ++p) {
        csv += std::to_string(p);
        for (int a = 0; a < nf.surface.m; ++a)
            csv += "," + format_double(nf.mesh.points[p][a]);
        double rmax = 0.0;
        for (const auto& atom : nf.fibers[p].atoms) rmax = std::max(rmax, atom.residual);
        csv += "," + std::to_string(nf.fibers[p].mass());
        csv += "," + format_double(rmax);
        csv += "," + format_double(qpoint_norm(nf.displacement_at(p)));
        csv += "\n";
    }
    return csv;
}

inline json run_reparam_scenario(const json& spec, const std::string& out_dir, int threads) {
    const ReparamScenario sc = reparam_scenario_from_json(spec);
    const GraphSurface surf = sc.surface();
    const AnalyticQField f = sc.field();
    json rep{{"kind", "reparam"}, {"scenario", to_json(sc)}, {"norm_density", surf.norm_density}};
    const SmallnessReport gates = check_smallness(surf, f, sc.r, sc.s, sc.c0, sc.mesh_res);
    rep["smallness"] = smallness_to_json(gates);
    if (!gates.pass) {
        rep["pass"] = false;
        return rep;
    }
    const NormalField nf = build_normal_field(surf, f, sc.r, sc.c0, sc.mesh_res, threads);
    const EstimateReport est = verify_estimates(nf);
    const GraphIdentityReport ident = verify_graph_identity(nf);
    rep["estimates"] = estimates_to_json(est);
    rep["graph_identity"] = graph_identity_to_json(ident);
    rep["pass"] = est.pass() && ident.pass();
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_text_file((std::filesystem::path(out_dir) / "vertices.csv").string(),
                        vertices_csv(nf));
    }
    return rep;
}

} // namespace detail

/// Runs one scenario file and writes report.json (plus per-vertex CSV data
/// for reparametrization scenarios) into out_dir.  Returns the process exit
/// code: 0 when every asserted check passes, 1 otherwise.
inline int run_scenario_file(const std::string& path, const std::string& out_dir, int threads) {
    const json spec = load_json_file(path);
    if (!spec.is_object()) throw input_error("scenario file must hold a JSON object");
    const std::string kind = detail::require(spec, "kind").get<std::string>();
    json rep;
    if (kind == "metric") {
        rep = detail::run_metric_scenario(spec);
    } else if (kind == "decompose") {
        rep = detail::run_decompose_scenario(spec);
    } else if (kind == "pushforward") {
        rep = detail::run_pushforward_scenario(spec);
    } else if (kind == "multisection") {
        rep = detail::run_multisection_scenario(spec);
    } else if (kind == "reparam") {
        rep = detail::run_reparam_scenario(spec, out_dir, threads);
    } else {
        throw input_error("unknown scenario kind \"" + kind + "\"");
    }
    const bool pass = rep.value("pass", false);
    if (!out_dir.empty()) detail::write_report(out_dir, "report.json", rep);
    std::printf("%s: %s\n", kind.c_str(), pass ? "PASS" : "FAIL");
    return pass ? kExitPass : kExitAssertionFailure;
}

/// Runs a named randomized suite and writes its report into out_dir.
inline int run_suite(const std::string& name, std::uint64_t seed, int cases,
                     const std::string& out_dir, int threads) {
    SuiteResult res;
    if (name == "metric-axioms") {
        res = metric_axioms_suite(seed, cases > 0 ? cases : 1000);
    } else if (name == "boundary-commutation") {
        res = boundary_commutation_suite(seed, cases > 0 ? cases : 50);
    } else if (name == "multisection-equivalence") {
        res = multisection_equivalence_suite(seed, cases > 0 ? cases : 100);
    } else if (name == "reparam-estimates") {
        res = reparam_estimates_suite(seed, cases > 0 ? cases : 8, threads);
    } else {
        throw input_error("unknown suite \"" + name + "\"");
    }
    if (!out_dir.empty()) detail::write_report(out_dir, "report.json", to_json(res));
    std::printf("%s: %d/%d cases passed: %s\n", res.name.c_str(), res.cases - res.failures,
                res.cases, res.pass() ? "PASS" : "FAIL");
    return res.pass() ? kExitPass : kExitAssertionFailure;
}

} // namespace qgmt
