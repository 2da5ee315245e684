#pragma once

#include <string>
#include <vector>

#include "qgmt/reparam.hpp"
#include "qgmt/rng.hpp"
#include "qgmt/serialization.hpp"

namespace qgmt {

/// One reparametrization test configuration: base dimension m, ambient fiber
/// dimension n, multiplicity Q, chart radius s inside ball radius r, tube
/// radius c0, the base surface phi and the sheets of the field.
struct ReparamScenario {
    std::string name;
    int m = 1;
    int n = 1;
    int q = 1;
    double s = 0.5;
    double r = 1.0;
    double c0 = 0.01;
    PolyMap phi;
    std::vector<AnalyticSheet> sheets;
    int mesh_res = 33;

    /// Sup norms sampled at four times the mesh density by default.
    GraphSurface surface(int norm_density = 0) const {
        return GraphSurface::build(m, n, s, phi,
                                   norm_density > 0 ? norm_density : 4 * mesh_res);
    }

    AnalyticQField field() const {
        AnalyticQField f;
        f.m = m;
        f.n = n;
        f.q = q;
        f.sheets = sheets;
        f.validate();
        return f;
    }
};

inline json to_json(const ReparamScenario& sc) {
    json sheets = json::array();
    for (const auto& sh : sc.sheets) sheets.push_back({{"mult", sh.mult}, {"g", to_json(sh.g)}});
    return {{"name", sc.name}, {"m", sc.m},   {"n", sc.n},
            {"Q", sc.q},       {"s", sc.s},   {"r", sc.r},
            {"c0", sc.c0},     {"phi", to_json(sc.phi)}, {"sheets", sheets},
            {"mesh", {{"resolution", sc.mesh_res}}}};
}

inline ReparamScenario reparam_scenario_from_json(const json& j) {
    ReparamScenario sc;
    sc.name = j.value("name", std::string("scenario"));
    sc.m = detail::require(j, "m").get<int>();
    sc.n = detail::require(j, "n").get<int>();
    sc.q = detail::require(j, "Q").get<int>();
    sc.s = detail::require(j, "s").get<double>();
    sc.r = detail::require(j, "r").get<double>();
    sc.c0 = detail::require(j, "c0").get<double>();
    sc.phi = polymap_from_json(detail::require(j, "phi"), sc.m, sc.n);
    for (const auto& s : detail::require(j, "sheets")) {
        AnalyticSheet sheet;
        sheet.mult = detail::require(s, "mult").get<int>();
        sheet.g = polymap_from_json(detail::require(s, "g"), sc.m, sc.n);
        sc.sheets.push_back(std::move(sheet));
    }
    if (j.contains("mesh")) sc.mesh_res = detail::require(j["mesh"], "resolution").get<int>();
    if (sc.m < 1 || sc.n < 1 || sc.q < 1) throw input_error("scenario dimensions must be positive");
    int total = 0;
    for (const auto& sh : sc.sheets) total += sh.mult;
    if (total != sc.q) throw input_error("sheet multiplicities must sum to Q");
    return sc;
}

namespace detail {

/// Random polynomial map with coefficient scales per degree, small enough to
/// stay inside the tubular-neighborhood gates at c0 = 0.01.
inline PolyMap bank_polymap(Rng& rng, int m, int n, double c_const, double c_lin, double c_quad) {
    PolyMap f;
    f.m = m;
    f.n = n;
    for (int i = 0; i < n; ++i) {
        Polynomial p;
        p.vars = m;
        if (c_const != 0.0) {
            Monomial mono;
            mono.c = c_const * rng.uniform(-1.0, 1.0);
            mono.e.assign(m, 0);
            p.terms.push_back(mono);
        }
        if (c_lin != 0.0) {
            for (int a = 0; a < m; ++a) {
                Monomial mono;
                mono.c = c_lin * rng.uniform(-1.0, 1.0);
                mono.e.assign(m, 0);
                mono.e[a] = 1;
                p.terms.push_back(mono);
            }
        }
        if (c_quad != 0.0) {
            for (int a = 0; a < m; ++a) {
                for (int b = a; b < m; ++b) {
                    Monomial mono;
                    mono.c = c_quad * rng.uniform(-1.0, 1.0);
                    mono.e.assign(m, 0);
                    mono.e[a] += 1;
                    mono.e[b] += 1;
                    p.terms.push_back(mono);
                }
            }
        }
        if (p.terms.empty()) {
            Monomial mono;
            mono.c = 0.0;
            mono.e.assign(m, 0);
            p.terms.push_back(mono);
        }
        f.comp.push_back(std::move(p));
    }
    return f;
}

inline ReparamScenario scenario_from(Rng& rng, int m, int n, int q, int phi_degree) {
    ReparamScenario sc;
    sc.m = m;
    sc.n = n;
    sc.q = q;
    if (phi_degree == 0) {
        sc.phi = zero_map(m, n);
    } else if (phi_degree == 1) {
        sc.phi = bank_polymap(rng, m, n, 0.0, 8e-4, 0.0);
    } else {
        sc.phi = bank_polymap(rng, m, n, 0.0, 8e-4, 3e-4);
    }
    // Sheets sit at staggered heights around phi with gentle slopes; quadratic
    // terms only when phi is quadratic.
    const double sheet_quad = phi_degree == 2 ? 2e-4 : 0.0;
    for (int l = 0; l < q; ++l) {
        AnalyticSheet sheet;
        sheet.mult = 1;
        sheet.g = bank_polymap(rng, m, n, 0.0, 5e-4, sheet_quad);
        const double offset = 4e-4 * (l - 0.5 * (q - 1)) + 4e-5 * rng.uniform(-1.0, 1.0);
        for (int i = 0; i < n; ++i) {
            Monomial mono;
            mono.c = offset * (i == 0 ? 1.0 : 0.35);
            mono.e.assign(m, 0);
            sheet.g.comp[i].terms.push_back(mono);
        }
        sc.sheets.push_back(std::move(sheet));
    }
    return sc;
}

inline ReparamScenario bank_scenario(int index, int m, int n, int q, int phi_degree) {
    Rng rng(900100 + 17 * static_cast<std::uint64_t>(index));
    ReparamScenario sc = scenario_from(rng, m, n, q, phi_degree);
    const char* kind = phi_degree == 0 ? "flat" : (phi_degree == 1 ? "linear" : "quadratic");
    sc.name = "m" + std::to_string(m) + "n" + std::to_string(n) + "q" + std::to_string(q) + "-" +
              kind + "-" + std::to_string(index);
    return sc;
}

} // namespace detail

/// Deterministic bank of reparametrization scenarios covering every
/// combination of m in {1,2}, n in {1,2}, Q in {1,2,3} with flat, linear and
/// quadratic base surfaces.  All scenarios pass the smallness gates at
/// c0 = 0.01, s = 0.5, r = 1.
inline std::vector<ReparamScenario> reparam_bank() {
    std::vector<ReparamScenario> bank;
    int index = 0;
    for (int m = 1; m <= 2; ++m)
        for (int n = 1; n <= 2; ++n)
            for (int q = 1; q <= 3; ++q) bank.push_back(detail::bank_scenario(index++, m, n, q, 1));
    for (int m = 1; m <= 2; ++m)
        for (int n = 1; n <= 2; ++n)
            for (int q = 2; q <= 3; ++q) bank.push_back(detail::bank_scenario(index++, m, n, q, 2));
    bank.push_back(detail::bank_scenario(index++, 1, 1, 1, 0));
    bank.push_back(detail::bank_scenario(index++, 1, 2, 2, 0));
    bank.push_back(detail::bank_scenario(index++, 2, 1, 2, 0));
    bank.push_back(detail::bank_scenario(index++, 2, 2, 3, 0));
    return bank;
}

} // namespace qgmt
