#include <doctest.h>

#include "stuffedmap/enumerate.hpp"

#include <random>

using namespace smap;

namespace {

// two single-edge components joined by a branch with two length-2 boundaries;
// the root sits on a doubled edge so the gasket has a face to spare
StuffedMap bridge_example(bool with_spurious) {
    StuffedMap m;
    // gasket: double edge, faces {0,2} and {1,3}
    m.components.push_back(assemble_component({3, 2, 1, 0}, {2, 3, 0, 1}));
    // second component: single edge
    m.components.push_back(assemble_component({0, 1}, {1, 0}));
    Branch b;
    int gasket_branch_face = m.components[0].face_of[0] == m.components[0].face_of[1]
                                 ? m.components[0].face_of[0]
                                 : m.components[0].face_of[1]; // pick a non-root face below
    m.root_component = 0;
    m.root_half_edge = 0;
    m.boundary_rooted = true;
    int root_face = m.components[0].face_of[0];
    int other_face = 1 - root_face;
    (void)gasket_branch_face;
    b.attachments.push_back({0, other_face, -1});
    b.attachments.push_back({1, 0, -1});
    if (with_spurious) {
        for (int h = 0; h < 4; ++h)
            if (m.components[0].face_of[h] == other_face) {
                b.attachments[0].spurious = h;
                break;
            }
        b.attachments[1].spurious = 0;
    }
    m.branches.push_back(b);
    return m;
}

} // namespace

TEST_CASE("assemble_component: single edge") {
    Component c = assemble_component({0, 1}, {1, 0});
    CHECK(c.num_vertices == 2);
    CHECK(c.num_edges() == 1);
    CHECK(c.num_faces == 1);
    CHECK(c.euler_characteristic() == 2);
}

TEST_CASE("assemble_component: torus gluing is rejected") {
    CHECK_THROWS_AS(assemble_component({1, 2, 3, 0}, {2, 3, 0, 1}), NonPlanar);
}

TEST_CASE("assemble_component: all gluings of one quadrangle") {
    // the three fixed-point-free pairings of four sides
    std::vector<std::vector<int>> pairings = {{1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
    int planar = 0, torus = 0;
    for (auto& alpha : pairings) {
        std::vector<int> sigma(4);
        for (int h = 0; h < 4; ++h) sigma[alpha[h]] = (h + 1) % 4; // faces follow the contour
        try {
            Component c = assemble_component(sigma, alpha);
            CHECK(c.num_vertices == 3);
            CHECK(c.num_edges() == 2);
            CHECK(c.num_faces == 1);
            CHECK(c.face_degree(0) == 4);
            ++planar;
        } catch (const NonPlanar&) {
            ++torus;
        }
    }
    CHECK(planar == 2);
    CHECK(torus == 1);
}

TEST_CASE("assemble_component: malformed input") {
    CHECK_THROWS_AS(assemble_component({0, 1}, {0, 1}), MalformedPermutation); // alpha fixes points
    CHECK_THROWS_AS(assemble_component({0, 0}, {1, 0}), MalformedPermutation); // sigma not bijective
}

TEST_CASE("euler_genus") {
    StuffedMap trivial;
    Component c;
    c.finalize();
    trivial.components.push_back(c);
    EulerData e = euler_genus(trivial);
    CHECK(e.chi == 2);
    CHECK(e.genus == 0);
    CHECK(e.K == 1);

    StuffedMap m = bridge_example(false);
    e = euler_genus(m);
    CHECK(e.chi == 4);
    CHECK(e.genus == 0);
    CHECK(e.K == 2);
    CHECK(m.total_vertices() == 4);
    CHECK(m.total_edges() == 3);
}

TEST_CASE("associated_hypertree") {
    StuffedMap m = bridge_example(false);
    Hypergraph h = associated_hypertree(m);
    CHECK(h.nodes == 2);
    CHECK(h.edges.size() == 1);
    CHECK(h.edges[0].size() == 2);
    CHECK(h.is_hypertree());

    // three components joined by one arity-3 branch
    Hypergraph tri;
    tri.nodes = 3;
    tri.edges = {{0, 1, 2}};
    CHECK(tri.is_hypertree());

    // two components joined by two distinct bridges: host cycle
    Hypergraph cyc;
    cyc.nodes = 2;
    cyc.edges = {{0, 1}, {0, 1}};
    CHECK(!cyc.is_hypertree());
    StuffedMap bad = bridge_example(false);
    bad.branches.push_back(bad.branches[0]);
    CHECK_THROWS_AS(associated_hypertree(bad), NotHypertree);
}

TEST_CASE("validate_stuffed_map") {
    CellSet bridge{std::vector<CellShape>{CellShape({2, 2})}};
    StuffedMap m = bridge_example(true);
    m.source_component = 0;
    // place the source away from the gasket spurious corner
    int sp_vertex = m.components[0].vertex_of[m.branches[0].attachments[0].spurious];
    m.source_vertex = 1 - sp_vertex;
    CHECK(validate_stuffed_map(m, bridge).ok());

    StuffedMap on_spurious = m;
    on_spurious.source_vertex = sp_vertex;
    auto r = validate_stuffed_map(on_spurious, bridge);
    CHECK(!r.ok());
    CHECK(r.str().find("source coincides with spurious point") != std::string::npos);

    // a degree-2 branch boundary declared against a quadrangle-only alphabet
    CellSet quad = quadrangle_cells();
    auto r2 = validate_stuffed_map(bridge_example(false), quad);
    CHECK(!r2.ok());
    CHECK(r2.str().find("matches no cell") != std::string::npos);
}

TEST_CASE("canonical_code: relabelling invariance") {
    std::mt19937 rng(5);
    CellSet quad = quadrangle_cells();
    EnumResult r = enumerate_ordinary(quad, 2, 5);
    for (int trials = 0; trials < 20; ++trials) {
        const StuffedMap& m = r.maps[rng() % r.maps.size()];
        const Component& c = m.components[0];
        // random relabelling of half-edges fixing nothing structural
        std::vector<int> perm(c.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        Component rc;
        rc.sigma.assign(c.size(), 0);
        rc.alpha.assign(c.size(), 0);
        for (int h = 0; h < c.size(); ++h) {
            rc.sigma[perm[h]] = perm[c.sigma[h]];
            rc.alpha[perm[h]] = perm[c.alpha[h]];
        }
        rc.finalize();
        StuffedMap rm = m;
        rm.components[0] = rc;
        rm.root_half_edge = perm[m.root_half_edge];
        CHECK(canonical_code(rm) == canonical_code(m));
    }
}

TEST_CASE("canonical_code: a mirror-asymmetric map gets a different code") {
    CellSet quad = quadrangle_cells();
    EnumResult r = enumerate_ordinary(quad, 2, 6);
    bool found_asymmetric = false;
    for (auto& m : r.maps) {
        if (canonical_code(mirrored(m)) != canonical_code(m)) {
            found_asymmetric = true;
            break;
        }
    }
    CHECK(found_asymmetric);
}

TEST_CASE("canonical_code: collision-free over an enumerated set") {
    // codes are already deduplicated keys; regenerating them must be stable
    CellSet bq = bridged_quadrangulation_cells();
    EnumResult r = enumerate_bms(bq, 2, 5);
    std::set<std::string> codes;
    for (auto& m : r.maps) codes.insert(canonical_code(m));
    CHECK(codes.size() == r.maps.size());
}

TEST_CASE("automorphism counting on the minimal bridged map") {
    StuffedMap m = bridge_example(false);
    CHECK(automorphism_count(m) == 2); // the free component rotates
    StuffedMap marked = bridge_example(true);
    CHECK(automorphism_count(marked) == 1); // spurious corners rigidify it
}

TEST_CASE("validate_hypermobile") {
    CellSet bq = bridged_quadrangulation_cells();
    // single rooted mobile white(0) - black(valency 2) - white(0), no hyperedges
    Hypermobile h;
    Mobile mo;
    mo.nbr = {{1}, {0, 2}, {1}};
    mo.color = {0, 1, 0};
    mo.label = {0, 0, 0};
    h.mobiles.push_back(mo);
    h.origin = 0;
    h.root_white = 0;
    h.root_black = 1;
    CHECK(validate_hypermobile(h, bq).ok());

    // two mobiles with a bridge hyperedge; entry gate = parent gate + 1
    Hypermobile two;
    Mobile a;
    a.nbr = {{1}, {0}};
    a.color = {0, 1};
    a.label = {0, 0};
    Mobile b = a;
    b.label = {1, 0};
    two.mobiles = {a, b};
    two.origin = 0;
    two.root_white = 0;
    two.root_black = 1;
    two.hyperedges = {{GateRef{0, 0, 1}, GateRef{1, 0, 1}}};
    CHECK(validate_hypermobile(two, bq).ok());

    Hypermobile off = two;
    off.mobiles[1].label = {2, 0};
    auto r = validate_hypermobile(off, bq);
    CHECK(!r.ok());
    CHECK(r.str().find("entry gate") != std::string::npos);
}

namespace {

// Test-only isomorphism search, independent of the canonical coder: match the
// gasket rigidly from the root, then extend across branches trying every
// pairing of child attachments and every anchor on the entry face.
bool component_iso_from(const Component& a, const Component& b, int ha, int hb,
                        std::vector<int>& img) {
    if (a.size() != b.size()) return false;
    img.assign(a.size(), -1);
    std::vector<int> stack{ha};
    img[ha] = hb;
    while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        int pairs[2][2] = {{a.sigma[x], b.sigma[img[x]]}, {a.alpha[x], b.alpha[img[x]]}};
        for (auto& p : pairs) {
            if (img[p[0]] < 0) {
                img[p[0]] = p[1];
                stack.push_back(p[0]);
            } else if (img[p[0]] != p[1]) {
                return false;
            }
        }
    }
    return true;
}

bool subtree_iso(const StuffedMap& A, const StuffedMap& B, int ca, int cb, int ha, int hb,
                 int entry_a, int entry_b, std::vector<char>& used_b);

bool branch_children_iso(const StuffedMap& A, const StuffedMap& B, int ba, int bb, int pa, int pb,
                         const std::vector<int>& img, std::vector<char>& used_b) {
    auto& attA = A.branches[ba].attachments;
    auto& attB = B.branches[bb].attachments;
    if (attA.size() != attB.size()) return false;
    std::vector<int> kidsA, kidsB;
    for (size_t i = 0; i < attA.size(); ++i)
        if (int(i) != pa) kidsA.push_back(int(i));
    for (size_t i = 0; i < attB.size(); ++i)
        if (int(i) != pb) kidsB.push_back(int(i));
    // spurious corners of the parent attachments must correspond
    if (attA[pa].spurious >= 0 &&
        (attB[pb].spurious < 0 || img[attA[pa].spurious] != attB[pb].spurious))
        return false;
    std::vector<char> taken(kidsB.size(), 0);
    std::function<bool(size_t)> rec = [&](size_t i) -> bool {
        if (i == kidsA.size()) return true;
        auto& a = attA[kidsA[i]];
        for (size_t j = 0; j < kidsB.size(); ++j) {
            if (taken[j]) continue;
            auto& b = attB[kidsB[j]];
            std::vector<char> used_copy = used_b;
            taken[j] = 1;
            if (a.spurious >= 0 && b.spurious >= 0) {
                if (subtree_iso(A, B, a.component, b.component, a.spurious, b.spurious, ba, bb,
                                used_copy) &&
                    rec(i + 1)) {
                    used_b = used_copy;
                    return true;
                }
            } else {
                for (int hb2 = 0; hb2 < B.components[b.component].size(); ++hb2) {
                    if (B.components[b.component].face_of[hb2] != b.face) continue;
                    std::vector<char> uc = used_b;
                    int ha2 = -1;
                    for (int h = 0; h < A.components[a.component].size(); ++h)
                        if (A.components[a.component].face_of[h] == a.face) {
                            ha2 = h;
                            break;
                        }
                    if (ha2 >= 0 &&
                        subtree_iso(A, B, a.component, b.component, ha2, hb2, ba, bb, uc) &&
                        rec(i + 1)) {
                        used_b = uc;
                        return true;
                    }
                }
            }
            taken[j] = 0;
        }
        return false;
    };
    return rec(0);
}

bool subtree_iso(const StuffedMap& A, const StuffedMap& B, int ca, int cb, int ha, int hb,
                 int entry_a, int entry_b, std::vector<char>& used_b) {
    if (used_b[cb]) return false;
    std::vector<int> img;
    if (!component_iso_from(A.components[ca], B.components[cb], ha, hb, img)) return false;
    // decorations on this component
    if ((A.source_component == ca) != (B.source_component == cb)) return false;
    if (A.source_component == ca) {
        bool matched = false;
        for (int h = 0; h < A.components[ca].size(); ++h)
            if (A.components[ca].vertex_of[h] == A.source_vertex)
                matched |= B.components[cb].vertex_of[img[h]] == B.source_vertex;
        if (A.components[ca].size() == 0) matched = true;
        if (!matched) return false;
    }
    used_b[cb] = 1;
    // branches hanging off this component must match one-to-one
    std::vector<int> bra, brb;
    for (size_t i = 0; i < A.branches.size(); ++i) {
        if (int(i) == entry_a) continue;
        for (size_t p = 0; p < A.branches[i].attachments.size(); ++p)
            if (A.branches[i].attachments[p].component == ca) bra.push_back(int(i));
    }
    for (size_t i = 0; i < B.branches.size(); ++i) {
        if (int(i) == entry_b) continue;
        for (size_t p = 0; p < B.branches[i].attachments.size(); ++p)
            if (B.branches[i].attachments[p].component == cb) brb.push_back(int(i));
    }
    if (bra.size() != brb.size()) return false;
    std::vector<char> taken(brb.size(), 0);
    std::function<bool(size_t)> rec = [&](size_t i) -> bool {
        if (i == bra.size()) return true;
        int pa = -1;
        for (size_t p = 0; p < A.branches[bra[i]].attachments.size(); ++p)
            if (A.branches[bra[i]].attachments[p].component == ca) pa = int(p);
        for (size_t j = 0; j < brb.size(); ++j) {
            if (taken[j]) continue;
            int pb = -1;
            for (size_t p = 0; p < B.branches[brb[j]].attachments.size(); ++p)
                if (B.branches[brb[j]].attachments[p].component == cb) pb = int(p);
            auto& aa = A.branches[bra[i]].attachments[pa];
            auto& bb2 = B.branches[brb[j]].attachments[pb];
            // parent faces must correspond under img
            bool face_ok = true;
            for (int h = 0; h < A.components[ca].size(); ++h)
                if (A.components[ca].face_of[h] == aa.face)
                    face_ok &= B.components[cb].face_of[img[h]] == bb2.face;
            if (!face_ok) continue;
            taken[j] = 1;
            if (branch_children_iso(A, B, bra[i], brb[j], pa, pb, img, used_b) && rec(i + 1))
                return true;
            taken[j] = 0;
        }
        return false;
    };
    return rec(0);
}

bool maps_isomorphic(const StuffedMap& A, const StuffedMap& B) {
    if (A.components.size() != B.components.size() || A.branches.size() != B.branches.size())
        return false;
    if (A.root_component < 0 || B.root_component < 0) return false;
    std::vector<char> used_b(B.components.size(), 0);
    return subtree_iso(A, B, A.root_component, B.root_component, A.root_half_edge,
                       B.root_half_edge, -1, -1, used_b);
}

} // namespace

TEST_CASE("canonical codes agree with a pairwise isomorphism search") {
    CellSet bq = bridged_quadrangulation_cells();
    EnumResult r = enumerate_bms(bq, 2, 5);
    std::vector<const StuffedMap*> sample;
    for (auto& m : r.maps) {
        sample.push_back(&m);
        if (sample.size() >= 100) break;
    }
    int agreements = 0;
    for (size_t i = 0; i < sample.size(); ++i)
        for (size_t j = i; j < sample.size(); ++j) {
            bool same_code = canonical_code(*sample[i]) == canonical_code(*sample[j]);
            bool iso = maps_isomorphic(*sample[i], *sample[j]);
            CHECK(same_code == iso);
            agreements += (same_code == iso);
        }
    CHECK(agreements > 0);
}

TEST_CASE("canonical form: code-preserving, idempotent, iso-collapsing") {
    CellSet bq = bridged_quadrangulation_cells();
    EnumResult r = enumerate_bms(bq, 2, 5);
    for (auto& m : r.maps) {
        StuffedMap c = canonicalized(m);
        CHECK(canonical_code(c) == canonical_code(m));
        StuffedMap c2 = canonicalized(c);
        CHECK(c2.components.size() == c.components.size());
        for (size_t i = 0; i < c.components.size(); ++i) {
            CHECK(c2.components[i].sigma == c.components[i].sigma);
            CHECK(c2.components[i].alpha == c.components[i].alpha);
        }
        CHECK(c2.root_half_edge == c.root_half_edge);
    }
}
