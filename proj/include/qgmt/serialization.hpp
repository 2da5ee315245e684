#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qgmt/chains.hpp"
#include "qgmt/multisection.hpp"
#include "qgmt/polynomial.hpp"
#include "qgmt/qfield.hpp"
#include "qgmt/qpoint.hpp"

namespace qgmt {

using nlohmann::json;

namespace detail {

inline const json& require(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw input_error(std::string("missing field \"") + key + "\"");
    return *it;
}

inline Vec read_vec(const json& j) {
    if (!j.is_array()) throw input_error("expected an array of numbers");
    Vec v;
    v.reserve(j.size());
    for (const auto& x : j) {
        if (!x.is_number()) throw input_error("expected an array of numbers");
        v.push_back(x.get<double>());
    }
    return v;
}

inline std::vector<int> read_ints(const json& j) {
    if (!j.is_array()) throw input_error("expected an array of integers");
    std::vector<int> v;
    v.reserve(j.size());
    for (const auto& x : j) {
        if (!x.is_number_integer()) throw input_error("expected an array of integers");
        v.push_back(x.get<int>());
    }
    return v;
}

} // namespace detail

inline json to_json(const QPoint& t) {
    json atoms = json::array();
    for (const auto& a : t.atoms) atoms.push_back({{"v", a.v}, {"m", a.mult}});
    return {{"Q", t.q}, {"n", t.n}, {"atoms", atoms}};
}

inline QPoint qpoint_from_json(const json& j) {
    const int n = detail::require(j, "n").get<int>();
    std::vector<QAtom> atoms;
    for (const auto& a : detail::require(j, "atoms")) {
        QAtom atom;
        atom.v = detail::read_vec(detail::require(a, "v"));
        atom.mult = detail::require(a, "m").get<int>();
        atoms.push_back(std::move(atom));
    }
    QPoint t = QPoint::from_atoms(n, std::move(atoms));
    if (j.contains("Q") && j["Q"].get<int>() != t.q)
        throw input_error("declared Q does not match total multiplicity");
    return t;
}

inline json to_json(const GridSpec& g) {
    return {{"shape", g.shape}, {"origin", g.origin}, {"spacing", g.spacing}};
}

inline GridSpec grid_from_json(const json& j) {
    GridSpec g;
    g.shape = detail::read_ints(detail::require(j, "shape"));
    g.origin = detail::read_vec(detail::require(j, "origin"));
    g.spacing = detail::read_vec(detail::require(j, "spacing"));
    if (g.shape.empty() || g.origin.size() != g.shape.size() || g.spacing.size() != g.shape.size())
        throw input_error("grid shape, origin and spacing must have equal nonzero length");
    for (int s : g.shape)
        if (s < 2) throw input_error("grid shape entries must be at least 2");
    for (double h : g.spacing)
        if (!(h > 0.0)) throw input_error("grid spacing entries must be positive");
    return g;
}

inline json to_json(const SampledQField& f) {
    json samples = json::array();
    for (const auto& t : f.samples) samples.push_back(to_json(t));
    json j = {{"Q", f.q}, {"n", f.n}, {"samples", samples}};
    if (f.domain.grid) j["grid"] = to_json(*f.domain.grid);
    return j;
}

inline json to_json(const Polynomial& p) {
    json terms = json::array();
    for (const auto& t : p.terms) terms.push_back({{"c", t.c}, {"e", t.e}});
    return terms;
}

inline Polynomial polynomial_from_json(const json& j, int vars) {
    if (!j.is_array()) throw input_error("polynomial must be an array of terms");
    Polynomial p;
    p.vars = vars;
    for (const auto& t : j) {
        Monomial mono;
        mono.c = detail::require(t, "c").get<double>();
        mono.e = detail::read_ints(detail::require(t, "e"));
        if (static_cast<int>(mono.e.size()) != vars)
            throw input_error("monomial exponent count does not match variable count");
        for (int e : mono.e)
            if (e < 0) throw input_error("monomial exponents must be nonnegative");
        p.terms.push_back(std::move(mono));
    }
    return p;
}

inline json to_json(const PolyMap& f) {
    json comps = json::array();
    for (const auto& c : f.comp) comps.push_back(to_json(c));
    return comps;
}

inline PolyMap polymap_from_json(const json& j, int m, int n) {
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        throw input_error("polynomial map must list one component per target coordinate");
    PolyMap f;
    f.m = m;
    f.n = n;
    for (const auto& c : j) f.comp.push_back(polynomial_from_json(c, m));
    return f;
}

inline json to_json(const SimplicialChain& c) {
    json terms = json::array();
    for (const auto& t : c.terms) {
        json verts = json::array();
        for (const auto& v : t.verts) verts.push_back(v);
        terms.push_back({{"verts", verts}, {"c", t.coeff}});
    }
    return {{"m", c.m}, {"d", c.d}, {"terms", terms}};
}

inline SimplicialChain chain_from_json(const json& j) {
    const int m = detail::require(j, "m").get<int>();
    const int d = detail::require(j, "d").get<int>();
    std::vector<ChainTerm> terms;
    for (const auto& t : detail::require(j, "terms")) {
        ChainTerm term;
        term.coeff = detail::require(t, "c").get<long long>();
        for (const auto& v : detail::require(t, "verts")) term.verts.push_back(detail::read_vec(v));
        terms.push_back(std::move(term));
    }
    return canonical(SimplicialChain{m, d, std::move(terms)});
}

inline json to_json(const Multisection& ms) {
    json entries = json::array();
    for (int p = 0; p < static_cast<int>(ms.base.points.size()); ++p) {
        json atoms = json::array();
        for (const auto& a : ms.entries[p]) atoms.push_back({{"v", a.v}, {"m", a.mult}});
        entries.push_back({{"p", ms.base.points[p]}, {"atoms", atoms}});
    }
    json j = {{"Q", ms.q}, {"n", ms.n}, {"entries", entries}};
    if (ms.base.grid) j["grid"] = to_json(*ms.base.grid);
    return j;
}

/// Fields enter either as explicit samples over a grid or as polynomial
/// sheets evaluated over a grid.
inline SampledQField field_from_json(const json& j) {
    const GridSpec grid = grid_from_json(detail::require(j, "grid"));
    const int m = static_cast<int>(grid.shape.size());
    SampledDomain dom = grid_domain(grid);
    const int n = detail::require(j, "n").get<int>();
    const int q = detail::require(j, "Q").get<int>();
    if (q < 1) throw input_error("Q must be positive");
    SampledQField f;
    f.n = n;
    f.q = q;
    f.domain = std::move(dom);
    if (j.contains("samples")) {
        const auto& samples = j["samples"];
        if (static_cast<int>(samples.size()) != static_cast<int>(f.domain.points.size()))
            throw input_error("sample count does not match grid point count");
        for (const auto& s : samples) f.samples.push_back(qpoint_from_json(s));
    } else if (j.contains("sheets")) {
        AnalyticQField af;
        af.m = m;
        af.n = n;
        af.q = q;
        for (const auto& s : j["sheets"]) {
            AnalyticSheet sheet;
            sheet.mult = detail::require(s, "mult").get<int>();
            sheet.g = polymap_from_json(detail::require(s, "g"), m, n);
            af.sheets.push_back(std::move(sheet));
        }
        af.validate();
        for (const auto& p : f.domain.points) f.samples.push_back(af.eval(p));
    } else {
        throw input_error("field needs either \"samples\" or \"sheets\"");
    }
    f.validate();
    return f;
}

inline Multisection multisection_from_json(const json& j) {
    const GridSpec grid = grid_from_json(detail::require(j, "grid"));
    Multisection ms;
    ms.base = grid_domain(grid);
    ms.q = detail::require(j, "Q").get<int>();
    ms.n = detail::require(j, "n").get<int>();
    const auto& entries = detail::require(j, "entries");
    if (entries.size() != ms.base.points.size())
        throw input_error("entry count does not match grid point count");
    ms.entries.resize(entries.size());
    for (const auto& e : entries) {
        const Vec p = detail::read_vec(detail::require(e, "p"));
        const int idx = ms.base.find_point(p);
        if (idx < 0) throw input_error("entry position is not a grid point");
        std::vector<QAtom>& fiber = ms.entries[idx];
        for (const auto& a : detail::require(e, "atoms")) {
            QAtom atom;
            atom.v = detail::read_vec(detail::require(a, "v"));
            atom.mult = detail::require(a, "m").get<int>();
            if (static_cast<int>(atom.v.size()) != ms.n)
                throw input_error("atom dimension does not match n");
            if (atom.mult < 1) throw input_error("atom multiplicities must be positive");
            fiber.push_back(std::move(atom));
        }
    }
    return ms;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw input_error(std::string("malformed JSON in ") + path + ": " + e.what());
    }
    return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot write " + path);
    out << text;
}

/// Fixed-precision float formatting used in CSV output so reports are
/// byte-identical across runs.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace qgmt
