#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "qgmt/brute_force.hpp"
#include "qgmt/generators.hpp"
#include "qgmt/qpoint.hpp"
#include "qgmt/serialization.hpp"

using namespace qgmt;

TEST_CASE("construction sorts atoms and merges duplicates") {
    const QPoint t = make_qpoint(1, {{{2.0}, 1}, {{0.0}, 1}, {{2.0}, 3}});
    REQUIRE(t.q == 5);
    REQUIRE(t.n == 1);
    REQUIRE(t.atoms.size() == 2);
    REQUIRE(t.atoms[0].v == Vec{0.0});
    REQUIRE(t.atoms[0].mult == 1);
    REQUIRE(t.atoms[1].v == Vec{2.0});
    REQUIRE(t.atoms[1].mult == 4);

    const QPoint s = make_qpoint(2, {{{1.0, -1.0}, 1}, {{0.0, 5.0}, 2}});
    const QPoint s2 = make_qpoint(2, {{{0.0, 5.0}, 2}, {{1.0, -1.0}, 1}});
    REQUIRE(s == s2);
    REQUIRE(s.expand().size() == 3);

    REQUIRE_THROWS_AS(make_qpoint(1, {{{0.0}, 0}}), input_error);
    REQUIRE_THROWS_AS(make_qpoint(1, {{{0.0}, -2}}), input_error);
    REQUIRE_THROWS_AS(make_qpoint(2, {{{0.0}, 1}}), input_error);
    REQUIRE_THROWS_AS(QPoint::from_atoms(1, {}), input_error);
}

TEST_CASE("splat expands to identical copies") {
    const QPoint t = splat({1.5, 2.5}, 3);
    REQUIRE(t.q == 3);
    REQUIRE(t.n == 2);
    REQUIRE(t.atoms.size() == 1);
    const auto e = t.expand();
    REQUIRE(e.size() == 3);
    for (const auto& v : e) REQUIRE(v == Vec{1.5, 2.5});
}

TEST_CASE("distance matches hand computed values") {
    const QPoint two_zero = splat({0.0}, 2);
    const QPoint pm_one = make_qpoint(1, {{{-1.0}, 1}, {{1.0}, 1}});
    REQUIRE(distance(two_zero, pm_one) == std::sqrt(2.0));
    REQUIRE(brute_force_distance(two_zero, pm_one) == std::sqrt(2.0));

    const QPoint diag = make_qpoint(2, {{{0.0, 0.0}, 1}, {{1.0, 1.0}, 1}});
    const QPoint anti = make_qpoint(2, {{{1.0, 0.0}, 1}, {{0.0, 1.0}, 1}});
    REQUIRE(distance(diag, anti) == std::sqrt(2.0));

    REQUIRE(distance(splat({0.0}, 1), splat({0.5}, 1)) == 0.5);
    REQUIRE(distance(diag, diag) == 0.0);

    REQUIRE_THROWS_AS(distance(two_zero, splat({0.0}, 3)), input_error);
    REQUIRE_THROWS_AS(distance(splat({0.0}, 1), splat({0.0, 0.0}, 1)), input_error);
}

TEST_CASE("distance agrees with the permutation oracle") {
    Rng rng(4242);
    double worst = 0.0;
    for (int c = 0; c < 300; ++c) {
        const int q = 1 + static_cast<int>(rng.index(4));
        const int n = 1 + static_cast<int>(rng.index(3));
        const QPoint a = random_qpoint(rng, q, n);
        const QPoint b = random_qpoint(rng, q, n);
        worst = std::max(worst, std::abs(distance(a, b) - brute_force_distance(a, b)));
    }
    REQUIRE(worst <= 1e-12);
}

TEST_CASE("metric axioms hold on seeded samples") {
    Rng rng(571);
    for (int c = 0; c < 200; ++c) {
        const int q = 1 + static_cast<int>(rng.index(5));
        const int n = 1 + static_cast<int>(rng.index(3));
        const QPoint a = random_qpoint(rng, q, n);
        const QPoint b = random_qpoint(rng, q, n);
        const QPoint c3 = random_qpoint(rng, q, n);
        REQUIRE(distance(a, a) == 0.0);
        REQUIRE(std::abs(distance(a, b) - distance(b, a)) <= 1e-12);
        REQUIRE(distance(a, b) + distance(b, c3) - distance(a, c3) >= -1e-12);
        if (!(a == b)) REQUIRE(distance(a, b) > 0.0);
    }
}

TEST_CASE("matching returns the lexicographically smallest optimal pairing") {
    const QPoint two_zero = splat({0.0}, 2);
    const QPoint pm_one = make_qpoint(1, {{{-1.0}, 1}, {{1.0}, 1}});
    REQUIRE(matching(two_zero, pm_one) == std::vector<int>{0, 1});

    const QPoint diag = make_qpoint(2, {{{0.0, 0.0}, 1}, {{1.0, 1.0}, 1}});
    const QPoint cross = make_qpoint(2, {{{0.2, 1.0}, 1}, {{1.0, 0.0}, 1}});
    REQUIRE(matching(diag, cross) == std::vector<int>{1, 0});

    double realized = 0.0;
    const auto sigma = matching(diag, cross);
    const auto va = diag.expand();
    const auto vb = cross.expand();
    for (int l = 0; l < diag.q; ++l) realized += dist2(va[l], vb[sigma[l]]);
    REQUIRE(std::sqrt(realized) == distance(diag, cross));
}

TEST_CASE("assignment solver reproduces a classic instance") {
    const Mat cost{{82, 83, 69, 92}, {77, 37, 49, 92}, {11, 69, 5, 86}, {8, 9, 98, 23}};
    std::vector<int> sigma;
    REQUIRE(assignment_cost(cost, &sigma) == 140.0);
    REQUIRE(sigma == std::vector<int>{2, 1, 0, 3});

    const Mat ties{{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}};
    REQUIRE(lexmin_optimal_assignment(ties) == std::vector<int>{0, 1, 2});
}

TEST_CASE("center of mass, diameter and norm") {
    const QPoint t = make_qpoint(1, {{{1.0}, 2}, {{4.0}, 1}});
    REQUIRE(center_of_mass(t) == Vec{2.0});

    const QPoint t2 = make_qpoint(2, {{{0.0, 0.0}, 3}, {{4.0, 8.0}, 1}});
    REQUIRE(center_of_mass(t2) == Vec{1.0, 2.0});

    const QPoint t3 = make_qpoint(1, {{{0.0}, 1}, {{3.0}, 1}, {{1.0}, 1}});
    REQUIRE(diameter(t3) == 3.0);
    REQUIRE(diameter(splat({7.0}, 4)) == 0.0);

    REQUIRE(qpoint_norm(make_qpoint(2, {{{3.0, 4.0}, 2}})) == std::sqrt(50.0));
}

TEST_CASE("multiplicity counts within tolerance and rejects ambiguity") {
    const QPoint t = make_qpoint(1, {{{0.0}, 2}, {{1.0}, 1}});
    REQUIRE(multiplicity(t, {0.0}, 0.1) == 2);
    REQUIRE(multiplicity(t, {0.95}, 0.1) == 1);
    REQUIRE(multiplicity(t, {0.4}, 1e-6) == 0);
    REQUIRE_THROWS_AS(multiplicity(t, {0.5}, 0.6), ambiguity_error);
    REQUIRE_THROWS_AS(multiplicity(t, {0.0, 0.0}, 0.1), input_error);
}

TEST_CASE("merge_close coalesces chains of nearby atoms") {
    const QPoint t = make_qpoint(1, {{{0.0}, 1}, {{1e-4}, 1}, {{1.0}, 1}});
    const QPoint merged = merge_close(t, 1e-3);
    REQUIRE(merged.atoms.size() == 2);
    REQUIRE(merged.atoms[0].v[0] == 0.5e-4);
    REQUIRE(merged.atoms[0].mult == 2);
    REQUIRE(merged.atoms[1].v == Vec{1.0});

    const QPoint chain = make_qpoint(1, {{{0.0}, 1}, {{0.8e-3}, 1}, {{1.6e-3}, 2}});
    const QPoint all = merge_close(chain, 1e-3);
    REQUIRE(all.atoms.size() == 1);
    REQUIRE(all.atoms[0].mult == 4);
    REQUIRE(all.atoms[0].v[0] == Catch::Approx((0.8e-3 + 2 * 1.6e-3) / 4.0).margin(1e-18));

    REQUIRE(merge_close(t, 0.0) == t);
}

TEST_CASE("json round trip preserves q-points") {
    const QPoint t = make_qpoint(2, {{{0.25, -1.0}, 2}, {{3.0, 0.125}, 1}});
    const QPoint back = qpoint_from_json(to_json(t));
    REQUIRE(back == t);

    json bad = to_json(t);
    bad["atoms"][0]["m"] = 0;
    REQUIRE_THROWS_AS(qpoint_from_json(bad), input_error);
}
