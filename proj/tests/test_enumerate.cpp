#include <doctest.h>

#include "stuffedmap/enumerate.hpp"

using namespace smap;

namespace {
const std::vector<long long> kCatalan{1, 1, 2, 5, 14, 42, 132, 429, 1430};
}

TEST_CASE("one-face maps give the Catalan numbers") {
    CellSet empty{std::vector<CellShape>{}};
    for (int m = 1; m <= 6; ++m) {
        EnumResult r = enumerate_ordinary(empty, 2 * m, m + 1);
        CHECK(r.table.at(m + 1, {}) == Rational(kCatalan[m]));
    }
}

TEST_CASE("odd boundary yields an empty table") {
    CellSet quad = quadrangle_cells();
    EnumResult r = enumerate_ordinary(quad, 3, 6);
    CHECK(r.table.entries.empty());
    CHECK(r.maps.empty());
}

TEST_CASE("quadrangulations of a 2-gon") {
    CellSet quad = quadrangle_cells();
    EnumResult r = enumerate_ordinary(quad, 2, 4);
    CHECK(r.table.at(2, {0}) == Rational(1));
    CHECK(r.table.at(3, {1}) == Rational(2));
    CHECK(r.table.at(4, {2}) == Rational(9));
    for (auto& m : r.maps) CHECK(validate_stuffed_map(m, quad).ok());
}

TEST_CASE("branch-marked bridged maps and the minimal configuration") {
    CellSet bridge{std::vector<CellShape>{CellShape({2, 2})}};
    EnumResult r3 = enumerate_bms(bridge, 2, 3);
    for (auto& [k, c] : r3.table.entries) CHECK(k.mult[0] == 0); // needs four vertices
    EnumResult r4 = enumerate_bms(bridge, 2, 4);
    // two marked maps at four vertices; the t-power carries one t per branch
    // boundary on top of the vertex count
    CHECK(r4.table.at(6, {1}) == Rational(2));
    CHECK(r4.table.at(2, {0}) == Rational(1));
    for (auto& [k, c] : r4.table.entries) CHECK(c.is_integer());
}

TEST_CASE("no branches reduces branch-marked to ordinary enumeration") {
    CellSet quad = quadrangle_cells();
    EnumResult a = enumerate_bms(quad, 2, 5);
    EnumResult b = enumerate_ordinary(quad, 2, 5);
    CHECK(a.table.entries == b.table.entries);
}

TEST_CASE("mark_points: placements and series derivative agreement") {
    CellSet bridge{std::vector<CellShape>{CellShape({2, 2})}};
    EnumResult rooted = enumerate_bms(bridge, 2, 4);
    EnumResult pointed = mark_points(rooted);
    // each of the two marked maps has four vertices, two of them spurious
    CHECK(pointed.table.at(5, {1}) == Rational(4));

    TSeries s = series_from_counts(rooted.table, 4);
    TSeries p = series_from_counts(pointed.table, 3);
    CHECK(p == ts_derivative_t(s));

    CellSet quad = quadrangle_cells();
    EnumResult ord = enumerate_ordinary(quad, 2, 5);
    EnumResult op = mark_points(ord);
    // no spurious points: entries multiply by the vertex count
    CHECK(series_from_counts(op.table, 4) == ts_derivative_t(series_from_counts(ord.table, 5)));
}

TEST_CASE("rescaling matches automorphism-weighted direct counts for bridges") {
    CellSet bq = bridged_quadrangulation_cells();
    EnumResult bms = enumerate_bms(bq, 2, 6);
    CountTable resc = rescale_bms_to_stuffed(bms.table);
    EnumResult direct = enumerate_stuffed(bq, 2, 6, false);
    CHECK(resc.entries == direct.table.entries);

    // the same statement at series level: weighting each branch cell by
    // l_1...l_k t^k turns the stuffed series into the branch-marked one
    SymbolUniverse u = bq.universe();
    TSeries stuffed = series_from_counts(direct.table, 6);
    TSeries marked = series_from_counts(bms.table, 6);
    TSeries reweighted = ts_substitute_weights(
        stuffed, {{"t_2_2", TSeries::symbol(u, 6, "t_2_2", 2) * Rational(4)}});
    CHECK(reweighted == marked);
}

TEST_CASE("rescaling breaks once marked maps keep sibling-swap automorphisms") {
    // with an arity-3 cell two isomorphic components hang off one branch; a
    // marking on each boundary does not stop the swap, so marked counts are
    // fewer than the boundary-length product predicts. The direct
    // automorphism-weighted count is the one the generating functions match.
    CellSet tri{std::vector<CellShape>{CellShape({2, 2, 2}), CellShape({4})}};
    EnumResult bms = enumerate_bms(tri, 2, 6);
    CountTable resc = rescale_bms_to_stuffed(bms.table);
    EnumResult direct = enumerate_stuffed(tri, 2, 6, false);
    CHECK(resc.at(6, {1, 0}) == Rational(1, 4));
    CHECK(direct.table.at(6, {1, 0}) == Rational(1, 8));
    bool marked_map_with_swap = false;
    for (auto& m : direct.maps)
        if (m.total_vertices() == 6 && m.components.size() == 3)
            marked_map_with_swap |= automorphism_count(m) == 8;
    CHECK(marked_map_with_swap);
}

TEST_CASE("every enumerated object passes its validator") {
    CellSet bq = bridged_quadrangulation_cells();
    EnumResult r = enumerate_bms(bq, 2, 5);
    for (auto& m : r.maps) CHECK(validate_stuffed_map(m, bq).ok());
    auto hms = enumerate_hypermobiles(bq, 5);
    for (auto& h : hms.list) CHECK(validate_hypermobile(h, bq).ok());
}

TEST_CASE("bipartite equals all face degrees even on enumerated maps") {
    CellSet bq = bridged_quadrangulation_cells();
    EnumResult r = enumerate_stuffed(bq, 2, 6, false);
    for (auto& m : r.maps)
        for (auto& c : m.components) {
            bool all_even = true;
            for (int f = 0; f < c.num_faces; ++f) all_even &= (c.face_degree(f) % 2 == 0);
            // finalize() already enforced 2-colorability; the two notions agree
            CHECK(all_even);
        }
}

TEST_CASE("enumeration is deterministic") {
    CellSet bq = bridged_quadrangulation_cells();
    EnumResult a = enumerate_bms(bq, 2, 5);
    EnumResult b = enumerate_bms(bq, 2, 5);
    CHECK(a.table.entries == b.table.entries);
    REQUIRE(a.maps.size() == b.maps.size());
    for (size_t i = 0; i < a.maps.size(); ++i)
        CHECK(canonical_code(a.maps[i]) == canonical_code(b.maps[i]));
}

TEST_CASE("hypermobiles: degenerate cases and small counts") {
    CellSet empty{std::vector<CellShape>{}};
    auto none = enumerate_hypermobiles(empty, 4);
    REQUIRE(none.list.size() == 1); // only the single-white object
    CHECK(none.list[0].trivial());

    CellSet quad = quadrangle_cells();
    auto hms = enumerate_hypermobiles(quad, 4);
    for (auto& h : hms.list) {
        CHECK(validate_hypermobile(h, quad).ok());
        for (auto& e : h.hyperedges) CHECK(int(e.size()) <= quad.max_arity());
    }
    // labelled-tree counts for quadrangulations: half the pointed rooted maps
    CellSet bq = bridged_quadrangulation_cells();
    auto more = enumerate_hypermobiles(bq, 4);
    std::map<int, long long> by_size;
    for (auto& h : more.list) by_size[h.size_statistic()]++;
    CHECK(by_size[1] == 1);
    CHECK(by_size[3] == 3);  // one-quad mobiles: second label in {-1, 0, 1}
    CHECK(by_size[4] == 19); // quadrangulation mobiles plus the first bridged pair
}

TEST_CASE("series_from_counts round-trips coefficients") {
    CellSet quad = quadrangle_cells();
    EnumResult r = enumerate_ordinary(quad, 2, 5);
    TSeries s = series_from_counts(r.table, 5);
    for (auto& [k, c] : r.table.entries) {
        Monomial mono{k.mult[0]};
        CHECK(s.at(k.tpow).terms.at(mono) == c);
    }
    CHECK_THROWS_AS(series_from_counts(r.table, 9), IncompleteTable);
    CountTable empty_tbl;
    empty_tbl.cells = quad;
    empty_tbl.complete_through = 5;
    CHECK(series_from_counts(empty_tbl, 5).is_zero());
}

TEST_CASE("counting identity guards every emitted map") {
    // exercised as a side effect; a direct probe on one map
    CellSet bq = bridged_quadrangulation_cells();
    EnumResult r = enumerate_stuffed(bq, 2, 6, false);
    for (auto& m : r.maps) {
        std::vector<int> mult = m.cell_multiplicities(bq);
        assert_counting_identity(m, bq, mult, 2);
    }
}
