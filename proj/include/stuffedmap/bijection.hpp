#pragma once

#include "stuffedmap/enumerate.hpp"

#include <json.hpp>

#include <map>
#include <set>
#include <string>
#include <vector>

namespace smap {

struct ConventionFailure : error {
    explicit ConventionFailure(const std::string& w) : error("convention failure: " + w) {}
};

// Chirality and labelling switches the construction leaves open. The defaults
// are the vector pinned by the roundtrip search on quadrangulations plus
// bridges; verify_bijection re-derives it per cell set and reports it.
struct Conventions {
    bool left_primary = true;    // left of an edge directed at v = face of the half-edge into v
    bool white_sigma = true;     // white rotations follow sigma (vs reversed)
    bool black_contour = false;  // black rotations follow the face contour (vs reversed)
    bool chord_forward = true;   // successor scan direction along the mobile contour
    bool psi_mirror = false;     // rebuild with all rotations reversed
    bool root_corner_after = false; // which corner of the mobile root counts as "left"
    bool gate_forward = true;    // gate = contour-next of the spurious corner (vs prev)
    int label_offset = 0;        // entry spurious label = parent gate label + offset

    std::string str() const {
        auto b = [](bool v) { return v ? "1" : "0"; };
        std::string s;
        s += "left_primary=";
        s += b(left_primary);
        s += " white_sigma=";
        s += b(white_sigma);
        s += " black_contour=";
        s += b(black_contour);
        s += " chord_forward=";
        s += b(chord_forward);
        s += " psi_mirror=";
        s += b(psi_mirror);
        s += " root_corner_after=";
        s += b(root_corner_after);
        s += " gate_forward=";
        s += b(gate_forward);
        s += " label_offset=" + std::to_string(label_offset);
        return s;
    }
    nlohmann::json to_json() const {
        return {{"left_primary", left_primary},     {"white_sigma", white_sigma},
                {"black_contour", black_contour},   {"chord_forward", chord_forward},
                {"psi_mirror", psi_mirror},         {"root_corner_after", root_corner_after},
                {"gate_forward", gate_forward},     {"label_offset", label_offset}};
    }
};

// the vector the roundtrip search pins on quadrangulations plus bridges
inline Conventions pinned_conventions() { return Conventions{}; }

namespace detail {

inline std::vector<int> sigma_inverse(const Component& c) {
    std::vector<int> inv(c.size());
    for (int h = 0; h < c.size(); ++h) inv[c.sigma[h]] = h;
    return inv;
}

// previous corner along the face contour
inline int contour_prev(const Component& c, const std::vector<int>& sigma_inv, int h) {
    return c.alpha[sigma_inv[h]];
}

} // namespace detail

// ---------------------------------------------------------------------------
// labelling

struct BpsLabels {
    bool ok = false;
    std::string failure;
    std::vector<std::vector<int>> label;   // per component, per vertex
    std::vector<int> erased_vertex;        // per component: the unique minimum
};

// Distance labels on the pointed component, propagated outward along the
// hypertree: the entry spurious vertex starts from the parent-side gate label
// (plus the convention offset) and the rest of the component follows graph
// distance from it.
inline BpsLabels label_bps(const StuffedMap& m, const Conventions& cv) {
    BpsLabels out;
    if (!m.pointed() || !m.rooted()) {
        out.failure = "map must be pointed and rooted";
        return out;
    }
    const int K = int(m.components.size());
    out.label.assign(K, {});
    out.erased_vertex.assign(K, -1);

    std::vector<std::vector<int>> sigma_inv(K);
    for (int c = 0; c < K; ++c) sigma_inv[c] = detail::sigma_inverse(m.components[c]);

    std::vector<char> labeled(K, 0);
    try {
        out.label[m.source_component] =
            m.components[m.source_component].vertex_distances(m.source_vertex);
    } catch (const UnreachableVertex&) {
        out.failure = "component internally disconnected";
        return out;
    }
    labeled[m.source_component] = 1;
    out.erased_vertex[m.source_component] = m.source_vertex;

    std::vector<char> branch_done(m.branches.size(), 0);
    bool progress = true;
    while (progress) {
        progress = false;
        for (size_t bi = 0; bi < m.branches.size(); ++bi) {
            if (branch_done[bi]) continue;
            const Branch& b = m.branches[bi];
            int parent = -1;
            for (size_t ai = 0; ai < b.attachments.size(); ++ai)
                if (labeled[b.attachments[ai].component]) parent = int(ai);
            if (parent < 0) continue;
            branch_done[bi] = 1;
            progress = true;
            const BranchAttachment& pa = b.attachments[parent];
            const Component& pc = m.components[pa.component];
            if (pa.spurious < 0) {
                out.failure = "branch boundary without spurious corner";
                return out;
            }
            int gate_corner = cv.gate_forward ? pc.face_next(pa.spurious)
                                              : detail::contour_prev(pc, sigma_inv[pa.component],
                                                                     pa.spurious);
            int base = out.label[pa.component][pc.vertex_of[gate_corner]] + cv.label_offset;
            for (size_t ai = 0; ai < b.attachments.size(); ++ai) {
                if (int(ai) == parent) continue;
                const BranchAttachment& ca = b.attachments[ai];
                if (labeled[ca.component]) {
                    out.failure = "branch closes a hypertree cycle";
                    return out;
                }
                if (ca.spurious < 0) {
                    out.failure = "branch boundary without spurious corner";
                    return out;
                }
                const Component& cc = m.components[ca.component];
                int entry_vertex = cc.vertex_of[ca.spurious];
                std::vector<int> dist;
                try {
                    dist = cc.vertex_distances(entry_vertex);
                } catch (const UnreachableVertex&) {
                    out.failure = "component internally disconnected";
                    return out;
                }
                out.label[ca.component].assign(dist.size(), 0);
                for (size_t v = 0; v < dist.size(); ++v)
                    out.label[ca.component][v] = base + dist[v];
                out.erased_vertex[ca.component] = entry_vertex;
                labeled[ca.component] = 1;
            }
        }
    }
    for (int c = 0; c < K; ++c)
        if (!labeled[c]) {
            out.failure = "hypertree does not span all components";
            return out;
        }
    // the erased vertex must be the unique minimum on its component
    for (int c = 0; c < K; ++c) {
        int mn = INT32_MAX;
        for (int v : out.label[c]) mn = std::min(mn, v);
        int count = 0;
        for (int v : out.label[c]) count += (v == mn);
        if (count != 1 || out.label[c][out.erased_vertex[c]] != mn) {
            out.failure = "component minimum is not unique at the entry vertex";
            return out;
        }
    }
    out.ok = true;
    return out;
}

// ---------------------------------------------------------------------------
// phi: pointed rooted branch-marked map -> hypermobile (+ root sign)

struct PhiOutcome {
    bool ok = false;
    std::string failure;
    Hypermobile h;
};

inline PhiOutcome phi(const StuffedMap& m, const Conventions& cv) {
    PhiOutcome out;
    if (m.components.size() == 1 && m.components[0].size() == 0) {
        // trivial map pairs with the single-white object by convention
        Mobile mo;
        mo.nbr = {{}};
        mo.color = {0};
        mo.label = {0};
        out.h.mobiles.push_back(mo);
        out.h.origin = 0;
        out.h.root_white = 0;
        out.ok = true;
        return out;
    }
    BpsLabels lb = label_bps(m, cv);
    if (!lb.ok) {
        out.failure = lb.failure;
        return out;
    }
    const int K = int(m.components.size());
    std::vector<std::vector<int>> sigma_inv(K);
    for (int c = 0; c < K; ++c) sigma_inv[c] = detail::sigma_inverse(m.components[c]);

    // mobile vertex ids per component: whites = surviving vertices, blacks = faces
    std::vector<std::vector<int>> white_id(K), black_id(K);
    std::vector<Mobile> mobiles(K);
    for (int c = 0; c < K; ++c) {
        const Component& comp = m.components[c];
        white_id[c].assign(comp.num_vertices, -1);
        black_id[c].assign(comp.num_faces, -1);
        Mobile& mo = mobiles[c];
        for (int v = 0; v < comp.num_vertices; ++v) {
            if (v == lb.erased_vertex[c]) continue;
            white_id[c][v] = mo.size();
            mo.nbr.push_back({});
            mo.color.push_back(0);
            mo.label.push_back(lb.label[c][v]);
        }
        for (int f = 0; f < comp.num_faces; ++f) {
            black_id[c][f] = mo.size();
            mo.nbr.push_back({});
            mo.color.push_back(1);
            mo.label.push_back(0);
        }
    }

    // spawn rule: contour position g of face f hosts the tree edge of its map
    // edge when the far endpoint carries the larger label (primary convention)
    auto spawns_at = [&](int c, int g) {
        const Component& comp = m.components[c];
        int near = lb.label[c][comp.vertex_of[g]];
        int far = lb.label[c][comp.vertex_of[comp.alpha[g]]];
        if (near == far) throw error("equal labels across an edge; map is not bipartite");
        return cv.left_primary ? far > near : near > far;
    };
    auto big_of = [&](int c, int g) {
        const Component& comp = m.components[c];
        int a = comp.vertex_of[g], b = comp.vertex_of[comp.alpha[g]];
        return lb.label[c][a] > lb.label[c][b] ? a : b;
    };

    // roots live on the origin mobile; the construction needs the source on
    // the gasket (this is the domain the generating functions describe)
    if (m.root_component != m.source_component) {
        out.failure = "source off the gasket: outside the bijection domain";
        return out;
    }

    for (int c = 0; c < K; ++c) {
        const Component& comp = m.components[c];
        std::vector<int> first_at(comp.num_vertices, -1);
        for (int h = comp.size() - 1; h >= 0; --h) first_at[comp.vertex_of[h]] = h;
        for (int v = 0; v < comp.num_vertices; ++v) {
            if (first_at[v] < 0) continue;
            int h = first_at[v];
            do {
                // the map edge at h spawns a tree edge anchored at its larger
                // endpoint; g is the hosting contour position
                int g = cv.left_primary ? comp.alpha[h] : h;
                if (spawns_at(c, g) && big_of(c, g) == v) {
                    if (white_id[c][v] < 0) {
                        out.failure = "erased vertex would carry a mobile edge";
                        return out;
                    }
                    int f = comp.face_of[g];
                    mobiles[c].nbr[white_id[c][v]].push_back(black_id[c][f]);
                }
                h = cv.white_sigma ? comp.sigma[h] : sigma_inv[c][h];
            } while (h != first_at[v]);
        }
        std::vector<int> first_on(comp.num_faces, -1);
        for (int h = comp.size() - 1; h >= 0; --h) first_on[comp.face_of[h]] = h;
        for (int f = 0; f < comp.num_faces; ++f) {
            int h = first_on[f];
            if (h < 0) continue;
            do {
                if (spawns_at(c, h)) {
                    int bv = big_of(c, h);
                    if (white_id[c][bv] >= 0)
                        mobiles[c].nbr[black_id[c][f]].push_back(white_id[c][bv]);
                }
                h = cv.black_contour ? comp.face_next(h)
                                     : detail::contour_prev(comp, sigma_inv[c], h);
            } while (h != first_on[f]);
        }
    }

    out.h.mobiles = std::move(mobiles);
    out.h.origin = m.source_component;

    // hyperedges: move each endpoint from the spurious corner to its gate
    for (auto& b : m.branches) {
        std::vector<GateRef> edge;
        for (auto& a : b.attachments) {
            const Component& comp = m.components[a.component];
            int gate_corner = cv.gate_forward
                                  ? comp.face_next(a.spurious)
                                  : detail::contour_prev(comp, sigma_inv[a.component], a.spurious);
            int gv = comp.vertex_of[gate_corner];
            if (gv == lb.erased_vertex[a.component]) {
                out.failure = "hyperedge endpoint lands on an erased vertex";
                return out;
            }
            edge.push_back(GateRef{a.component, white_id[a.component][gv],
                                   black_id[a.component][a.face]});
        }
        out.h.hyperedges.push_back(std::move(edge));
    }

    // root transfer: the tree edge of the root map edge, oriented away from its
    // larger endpoint; the original orientation survives as the sign
    {
        const Component& rc = m.components[m.root_component];
        int hr = m.root_half_edge;
        int g0 = cv.left_primary ? rc.alpha[hr] : hr;
        int g = spawns_at(m.root_component, g0) ? g0 : (cv.left_primary ? hr : rc.alpha[hr]);
        int B = big_of(m.root_component, g);
        int f = rc.face_of[g];
        out.h.root_white = white_id[m.root_component][B];
        out.h.root_black = black_id[m.root_component][f];
        if (out.h.root_white < 0) {
            out.failure = "root edge touches the erased source";
            return out;
        }
        out.h.root_sign =
            lb.label[m.root_component][rc.vertex_of[hr]] >
                    lb.label[m.root_component][rc.vertex_of[rc.alpha[hr]]]
                ? +1
                : -1;
    }

    // shift labels so the root source reads zero
    int shift = out.h.mobiles[out.h.origin].label[out.h.root_white];
    for (auto& mo : out.h.mobiles)
        for (int v = 0; v < mo.size(); ++v)
            if (mo.color[v] == 0) mo.label[v] -= shift;
    out.ok = true;
    return out;
}

// ---------------------------------------------------------------------------
// psi: hypermobile (+ root sign) -> pointed rooted branch-marked map

struct PsiOutcome {
    bool ok = false;
    std::string failure;
    StuffedMap m;
};

namespace detail {

// one step of the mobile contour walk: directed edge (u -> w) advances to
// (w -> rotation-successor of u around w)
struct ContourCorner {
    int vertex;   // corner vertex
    int from;     // previous neighbour (edge arriving)
    int to;       // next neighbour (edge leaving)
};

inline std::vector<ContourCorner> mobile_contour(const Mobile& m, int start_v, int start_to) {
    std::vector<ContourCorner> out;
    int E = m.num_edges();
    if (E == 0) return out;
    int u = start_v, w = start_to;
    // walk directed edges until we return to the starting directed edge
    int su = u, sw = w;
    do {
        // corner at w between (w,u) and (w,next)
        auto& a = m.nbr[w];
        int idx = 0;
        for (size_t i = 0; i < a.size(); ++i)
            if (a[i] == u) idx = int(i);
        int x = a[(idx + 1) % a.size()];
        out.push_back({w, u, x});
        u = w;
        w = x;
    } while (!(u == su && w == sw));
    return out;
}

// rebuilt component of one mobile plus the bookkeeping needed for branches
struct RebuiltComponent {
    Component comp;
    int vstar_vertex = -1;                  // vertex id of the added vertex
    std::vector<int> white_vertex;          // mobile white -> component vertex
    std::vector<int> black_face;            // mobile black -> component face
    std::vector<int> corner_out_half_edge;  // contour corner -> its chord half-edge
};

} // namespace detail

// Rebuild one mobile into a planar component: every white corner chords to the
// next corner labelled one less (minimum corners to the added vertex), mobile
// edges and blacks disappear, and each black identifies one face of the result.
inline bool rebuild_mobile(const Mobile& mo, int start_v, int start_to, const Conventions& cv,
                           detail::RebuiltComponent& out, std::string& failure) {
    using detail::ContourCorner;
    auto contour = detail::mobile_contour(mo, start_v, start_to);
    const int L = int(contour.size());
    if (L == 0) {
        failure = "mobile without edges cannot be rebuilt";
        return false;
    }
    int mn = mo.min_white_label();

    // successors
    std::vector<int> succ(L, -2); // -1: the added vertex; -2: not a white corner
    for (int i = 0; i < L; ++i) {
        if (mo.color[contour[i].vertex] != 0) continue;
        int n = mo.label[contour[i].vertex];
        if (n == mn) {
            succ[i] = -1;
            continue;
        }
        int dir = cv.chord_forward ? 1 : -1;
        int j = i;
        for (int step = 0; step < L; ++step) {
            j = (j + dir + L) % L;
            if (mo.color[contour[j].vertex] == 0 && mo.label[contour[j].vertex] == n - 1) break;
        }
        if (!(mo.color[contour[j].vertex] == 0 && mo.label[contour[j].vertex] == n - 1)) {
            failure = "contour successor search failed";
            return false;
        }
        succ[i] = j;
    }

    // chords: one per white corner; ends carry (corner, far-position) with the
    // added vertex encoded as position L (sorts outermost)
    struct End {
        int chord;
        int far;
    };
    std::vector<std::vector<End>> ends_at(L);
    std::vector<End> ends_vstar;
    struct Chord {
        int from, to; // to = -1 for the added vertex
    };
    std::vector<Chord> chords;
    for (int i = 0; i < L; ++i) {
        if (succ[i] == -2) continue;
        int id = int(chords.size());
        chords.push_back({i, succ[i]});
        ends_at[i].push_back({id, succ[i] < 0 ? L : succ[i]});
        if (succ[i] < 0)
            ends_vstar.push_back({id, i});
        else
            ends_at[succ[i]].push_back({id, i});
    }
    // Inside each corner the rotation induced by the walk reads: incoming
    // chords nearest source first, the outgoing chord last (it hugs the
    // forward contour, the arrivals nest around the backward one).
    for (int i = 0; i < L; ++i) {
        auto key = [&](const End& e) -> long long {
            if (chords[e.chord].from == i) return L + 1;
            return ((i - e.far) % L + L) % L;
        };
        std::sort(ends_at[i].begin(), ends_at[i].end(),
                  [&](const End& a, const End& b) { return key(a) < key(b); });
    }
    // the added vertex sees the contour from the far side: reversed order
    std::sort(ends_vstar.begin(), ends_vstar.end(),
              [&](const End& a, const End& b) { return a.far > b.far; });

    // superposition on the contour cycle; half-edge ids: cycle 2L
    // (2i: i -> i+1, 2i+1: i -> i-1), then chord ends
    const int nch = int(chords.size());
    const int H = 2 * L + 2 * nch;
    std::vector<int> salpha(H);
    std::vector<std::vector<int>> rot(L + 1); // node L = the added vertex
    auto chord_end_id = [&](int chord, bool at_from) { return 2 * L + 2 * chord + (at_from ? 0 : 1); };
    for (int i = 0; i < L; ++i) {
        rot[i].push_back(2 * i + 1);
        for (auto& e : ends_at[i]) rot[i].push_back(chord_end_id(e.chord, chords[e.chord].from == i));
        rot[i].push_back(2 * i);
    }
    for (auto& e : ends_vstar) rot[L].push_back(chord_end_id(e.chord, false));
    if (cv.psi_mirror)
        for (auto& r : rot) std::reverse(r.begin(), r.end());
    // alpha
    for (int i = 0; i < L; ++i) {
        salpha[2 * i] = 2 * ((i + 1) % L) + 1;
        salpha[2 * ((i + 1) % L) + 1] = 2 * i;
    }
    for (int c = 0; c < nch; ++c) {
        salpha[chord_end_id(c, true)] = chord_end_id(c, false);
        salpha[chord_end_id(c, false)] = chord_end_id(c, true);
    }
    // sigma from rotations
    std::vector<int> ssigma(H);
    for (auto& r : rot)
        for (size_t k = 0; k < r.size(); ++k) ssigma[r[k]] = r[(k + 1) % r.size()];
    // faces of the superposition
    std::vector<int> sface(H, -1);
    int nsf = 0;
    for (int h = 0; h < H; ++h) {
        if (sface[h] >= 0) continue;
        int x = h;
        do {
            sface[x] = nsf;
            x = ssigma[salpha[x]];
        } while (x != h);
        ++nsf;
    }
    // the disk face: all-cycle contour of length L
    int disk = -1;
    {
        std::vector<int> cyc_count(nsf, 0), tot(nsf, 0);
        for (int h = 0; h < H; ++h) {
            tot[sface[h]]++;
            if (h < 2 * L) cyc_count[sface[h]]++;
        }
        for (int f = 0; f < nsf; ++f)
            if (tot[f] == L && cyc_count[f] == L) disk = f;
        if (disk < 0) {
            failure = "chord system did not close into a disk";
            return false;
        }
    }

    // final component: whites + the added vertex; edges = chords
    std::vector<int> white_vertex(mo.size(), -1);
    int nv = 0;
    for (int v = 0; v < mo.size(); ++v)
        if (mo.color[v] == 0) white_vertex[v] = nv++;
    int vstar = nv++;

    // rotation of each white: its corners in contour-walk order, their chord
    // ends in the per-corner order fixed above
    std::vector<std::vector<int>> vrot(nv);
    for (int i = 0; i < L; ++i) {
        int v = contour[i].vertex;
        if (mo.color[v] != 0) continue;
        for (auto& e : ends_at[i])
            vrot[white_vertex[v]].push_back(chord_end_id(e.chord, chords[e.chord].from == i));
    }
    for (auto& e : ends_vstar) vrot[vstar].push_back(chord_end_id(e.chord, false));
    if (cv.psi_mirror)
        for (auto& r : vrot) std::reverse(r.begin(), r.end());
    std::vector<int> r_of_s(H, -1); // superposition half-edge -> final half-edge
    int hcount = 0;
    for (auto& r : vrot)
        for (int hh : r) r_of_s[hh] = hcount++;

    Component comp;
    comp.sigma.assign(hcount, -1);
    comp.alpha.assign(hcount, -1);
    for (auto& r : vrot)
        for (size_t k = 0; k < r.size(); ++k) comp.sigma[r_of_s[r[k]]] = r_of_s[r[(k + 1) % r.size()]];
    for (int c = 0; c < nch; ++c) {
        int a = r_of_s[chord_end_id(c, true)], b = r_of_s[chord_end_id(c, false)];
        comp.alpha[a] = b;
        comp.alpha[b] = a;
    }
    try {
        comp.finalize();
    } catch (const error& e) {
        failure = std::string("rebuilt component rejected: ") + e.what();
        return false;
    }

    // faces of blacks: the unique non-disk superposition face at each corner of
    // the black, carried to the final map through any of its chord half-edges
    std::vector<int> black_face(mo.size(), -1);
    for (int i = 0; i < L; ++i) {
        int v = contour[i].vertex;
        if (mo.color[v] != 1) continue;
        int fsup = sface[2 * i] != disk ? sface[2 * i] : sface[2 * i + 1];
        if (fsup == disk) {
            failure = "black corner sees only the disk face";
            return false;
        }
        // find a chord half-edge on fsup
        int rep = -1;
        for (int h = 2 * L; h < H; ++h)
            if (sface[h] == fsup) rep = h;
        if (rep < 0) {
            failure = "face around a black vertex carries no chords";
            return false;
        }
        int ff = comp.face_of[r_of_s[rep]];
        if (black_face[v] >= 0 && black_face[v] != ff) {
            failure = "black vertex corners disagree on their face";
            return false;
        }
        black_face[v] = ff;
    }

    out.comp = std::move(comp);
    if (vrot[vstar].empty()) {
        failure = "no chord reaches the added vertex";
        return false;
    }
    out.vstar_vertex = out.comp.vertex_of[r_of_s[vrot[vstar][0]]];
    out.white_vertex.assign(mo.size(), -1);
    for (int v = 0; v < mo.size(); ++v)
        if (mo.color[v] == 0 && !vrot[white_vertex[v]].empty())
            out.white_vertex[v] = out.comp.vertex_of[r_of_s[vrot[white_vertex[v]][0]]];
    out.black_face = std::move(black_face);
    out.corner_out_half_edge.assign(L, -1);
    for (int c = 0; c < nch; ++c) out.corner_out_half_edge[chords[c].from] = r_of_s[chord_end_id(c, true)];
    return true;
}

inline PsiOutcome psi(const Hypermobile& h, const Conventions& cv) {
    PsiOutcome out;
    if (h.trivial()) {
        Component c;
        c.finalize();
        out.m.components.push_back(c);
        out.ok = true;
        return out;
    }
    const int M = int(h.mobiles.size());
    std::vector<detail::RebuiltComponent> rebuilt(M);
    std::vector<std::vector<detail::ContourCorner>> contours(M);
    for (int mi = 0; mi < M; ++mi) {
        const Mobile& mo = h.mobiles[mi];
        int sv = -1, st = -1;
        if (mi == h.origin) {
            sv = h.root_white;
            st = h.root_black;
        } else {
            for (int v = 0; v < mo.size() && sv < 0; ++v)
                if (!mo.nbr[v].empty()) {
                    sv = v;
                    st = mo.nbr[v][0];
                }
        }
        if (sv < 0) {
            out.failure = "mobile without edges in a nontrivial hypermobile";
            return out;
        }
        contours[mi] = detail::mobile_contour(mo, sv, st);
        if (!rebuild_mobile(mo, sv, st, cv, rebuilt[mi], out.failure)) return out;
        out.m.components.push_back(rebuilt[mi].comp);
    }

    // branches from hyperedges; spurious = one contour step against the gate move
    for (auto& e : h.hyperedges) {
        Branch b;
        for (auto& g : e) {
            const detail::RebuiltComponent& rc = rebuilt[g.mobile];
            const Component& comp = out.m.components[g.mobile];
            int face = rc.black_face[g.black];
            if (face < 0) {
                out.failure = "hyperedge anchor black has no face";
                return out;
            }
            int gate_vertex = rc.white_vertex[g.white];
            int gate_corner = -1;
            for (int hh = 0; hh < comp.size(); ++hh)
                if (comp.face_of[hh] == face && comp.vertex_of[hh] == gate_vertex) {
                    gate_corner = hh;
                    break; // non-simple contours: first occurrence, by convention
                }
            if (gate_corner < 0) {
                out.failure = "gate vertex does not lie on its branch face";
                return out;
            }
            std::vector<int> sigma_inv = detail::sigma_inverse(comp);
            int sp = cv.gate_forward ? detail::contour_prev(comp, sigma_inv, gate_corner)
                                     : comp.face_next(gate_corner);
            BranchAttachment att;
            att.component = g.mobile;
            att.face = face;
            att.spurious = sp;
            b.attachments.push_back(att);
        }
        out.m.branches.push_back(std::move(b));
    }

    // source and root
    out.m.source_component = h.origin;
    out.m.source_vertex = rebuilt[h.origin].vstar_vertex;
    {
        auto& contour = contours[h.origin];
        const int L = int(contour.size());
        int root_corner = -1;
        for (int i = 0; i < L; ++i) {
            bool after = contour[i].vertex == h.root_white && contour[i].from == h.root_black;
            bool before = contour[i].vertex == h.root_white && contour[i].to == h.root_black;
            if (cv.root_corner_after ? after : before) {
                root_corner = i;
                break;
            }
        }
        if (root_corner < 0) {
            out.failure = "root corner not found on the origin contour";
            return out;
        }
        int rh = rebuilt[h.origin].corner_out_half_edge[root_corner];
        if (rh < 0) {
            out.failure = "root corner carries no chord";
            return out;
        }
        out.m.root_component = h.origin;
        out.m.root_half_edge = h.root_sign > 0 ? rh : out.m.components[h.origin].alpha[rh];
        out.m.boundary_rooted = false;
    }
    out.ok = true;
    return out;
}

// ---------------------------------------------------------------------------
// verification harness

struct BijectionFailure {
    std::string kind;
    std::string detail;
};

struct BijectionReport {
    Conventions convention;
    bool convention_found = false;
    std::map<int, long long> map_counts;  // pointed rooted branch-marked maps by vertices
    std::map<int, long long> hm_counts;   // signed hypermobiles by whites + mobiles
    // objects surviving their own roundtrip: the constructions restrict to an
    // exact bijection between these subsets
    std::map<int, long long> good_map_counts, good_hm_counts;
    long long roundtrip_map_ok = 0, roundtrip_hm_ok = 0;
    std::vector<BijectionFailure> failures;
    long long white_only_gate_collisions = 0;
    bool bookkeeping_ok = true;

    bool all_ok() const {
        return convention_found && failures.empty() && map_counts == hm_counts && bookkeeping_ok;
    }
    bool good_sets_biject() const { return good_map_counts == good_hm_counts; }
    nlohmann::json to_json() const {
        nlohmann::json sizes = nlohmann::json::array();
        std::set<int> keys;
        for (auto& [k, v] : map_counts) keys.insert(k);
        for (auto& [k, v] : hm_counts) keys.insert(k);
        auto get = [](const std::map<int, long long>& m, int k) {
            auto it = m.find(k);
            return it == m.end() ? 0LL : it->second;
        };
        for (int k : keys)
            sizes.push_back({{"size", k},
                             {"maps", get(map_counts, k)},
                             {"hypermobiles", get(hm_counts, k)},
                             {"maps_roundtripping", get(good_map_counts, k)},
                             {"hypermobiles_roundtripping", get(good_hm_counts, k)}});
        nlohmann::json fails = nlohmann::json::array();
        for (auto& f : failures) fails.push_back({{"kind", f.kind}, {"detail", f.detail}});
        return {{"convention", convention.to_json()},
                {"convention_found", convention_found},
                {"sizes", sizes},
                {"counts_equal", map_counts == hm_counts},
                {"roundtripping_subsets_equal", good_map_counts == good_hm_counts},
                {"roundtrip_map_ok", roundtrip_map_ok},
                {"roundtrip_hypermobile_ok", roundtrip_hm_ok},
                {"matching_statistic", "map vertices = white vertices + mobiles"},
                {"white_only_gate_collisions", white_only_gate_collisions},
                {"failures", fails}};
    }
};

namespace detail {

// pointed expansion restricted to sources on the gasket
inline std::vector<StuffedMap> gasket_pointed(const EnumResult& rooted) {
    std::vector<StuffedMap> out;
    for (auto& m : rooted.maps) {
        if (!m.rooted()) continue;
        std::set<int> spurious_vertices;
        for (auto& b : m.branches)
            for (auto& a : b.attachments)
                if (a.spurious >= 0 && a.component == m.root_component)
                    spurious_vertices.insert(m.components[a.component].vertex_of[a.spurious]);
        const Component& gasket = m.components[m.root_component];
        for (int v = 0; v < gasket.num_vertices; ++v) {
            if (spurious_vertices.count(v)) continue;
            StuffedMap p = m;
            p.source_component = m.root_component;
            p.source_vertex = v;
            out.push_back(std::move(p));
        }
    }
    return out;
}

} // namespace detail

inline BijectionReport verify_bijection(const CellSet& s, int v_max, long long budget_ms = 0) {
    BijectionReport rep;
    EnumResult rooted = enumerate_bms(s, -1, v_max, budget_ms);
    std::vector<StuffedMap> maps = detail::gasket_pointed(rooted);
    HypermobileEnumResult hms = enumerate_hypermobiles(s, v_max, budget_ms);

    // convention search, single-component stage first
    std::vector<StuffedMap> stage1_maps;
    std::vector<Hypermobile> stage1_hms;
    for (auto& m : maps)
        if (m.components.size() == 1 && stage1_maps.size() < 200) stage1_maps.push_back(m);
    for (auto& h : hms.list)
        if (h.mobiles.size() == 1 && !h.trivial() && stage1_hms.size() < 200)
            stage1_hms.push_back(h);

    auto try_roundtrips = [&](const Conventions& cv, const std::vector<StuffedMap>& ms,
                              const std::vector<Hypermobile>& hs) -> long long {
        long long bad = 0;
        for (auto& m : ms) {
            PhiOutcome p = phi(m, cv);
            if (!p.ok || !validate_hypermobile(p.h, s).ok()) {
                ++bad;
                continue;
            }
            PsiOutcome q = psi(p.h, cv);
            if (!q.ok || !q.m.rooted() || canonical_code(q.m) != canonical_code(m)) ++bad;
        }
        for (auto& h0 : hs) {
            for (int sign : {+1, -1}) {
                Hypermobile h = h0;
                if (h.trivial() && sign < 0) continue;
                h.root_sign = sign;
                PsiOutcome q = psi(h, cv);
                if (!q.ok || !validate_stuffed_map(q.m, s).ok()) {
                    ++bad;
                    continue;
                }
                PhiOutcome p = phi(q.m, cv);
                if (!p.ok || canonical_code(p.h) != canonical_code(h)) ++bad;
            }
        }
        return bad;
    };

    auto combo = [](int bits) {
        Conventions cv;
        cv.left_primary = bits & 1;
        cv.white_sigma = bits & 2;
        cv.black_contour = bits & 4;
        cv.chord_forward = bits & 8;
        cv.psi_mirror = bits & 16;
        cv.root_corner_after = bits & 32;
        return cv;
    };
    std::vector<Conventions> survivors;
    for (int bits = 0; bits < 64; ++bits) {
        Conventions cv = combo(bits);
        if (try_roundtrips(cv, stage1_maps, stage1_hms) == 0) survivors.push_back(cv);
    }
    if (survivors.empty() && stage1_maps.empty() && stage1_hms.empty())
        for (int bits = 0; bits < 64; ++bits) survivors.push_back(combo(bits));

    // stage 2 on capped samples, cheapest-first; exact failures come from the
    // final full pass below
    std::vector<StuffedMap> sample_maps(maps.begin(),
                                        maps.begin() + std::min<size_t>(maps.size(), 1500));
    std::vector<Hypermobile> sample_hms(hms.list.begin(),
                                        hms.list.begin() + std::min<size_t>(hms.list.size(), 1500));
    long long best_bad = -1;
    Conventions best_cv;
    for (auto cv : survivors) {
        for (bool gate : {true, false})
            for (int off : {0, 1, -1}) {
                cv.gate_forward = gate;
                cv.label_offset = off;
                long long bad = try_roundtrips(cv, sample_maps, sample_hms);
                if (best_bad < 0 || bad < best_bad) {
                    best_bad = bad;
                    best_cv = cv;
                }
                if (bad == 0) goto pinned;
            }
    }
pinned:
    rep.convention = best_cv;
    rep.convention_found = best_bad == 0;

    // final pass with the pinned vector: exact failures and counts
    const Conventions& cv = best_cv;
    std::set<std::string> white_only_codes;
    long long full_codes = 0;
    for (auto& m : maps) {
        rep.map_counts[m.total_vertices()]++;
        PhiOutcome p = phi(m, cv);
        if (!p.ok) {
            rep.failures.push_back({"phi", p.failure + " | map " + canonical_code(m)});
            continue;
        }
        auto vr = validate_hypermobile(p.h, s);
        if (!vr.ok()) {
            rep.failures.push_back({"phi_invalid_output", vr.violations[0]});
            continue;
        }
        // bookkeeping: whites = V - K, blacks = F, mobile edges = E
        int whites = p.h.total_white(), blacks = 0, tedges = 0;
        for (auto& mo : p.h.mobiles) {
            blacks += mo.size() - mo.count_white();
            tedges += mo.num_edges();
        }
        if (whites != m.total_vertices() - int(m.components.size()) || blacks != m.total_faces() ||
            tedges != m.total_edges())
            rep.bookkeeping_ok = false;
        long long hostV = whites + blacks, hostE = tedges;
        for (auto& e : p.h.hyperedges) hostE += int(e.size()) - 1;
        if (hostV - hostE != 1) rep.bookkeeping_ok = false;
        PsiOutcome q = psi(p.h, cv);
        if (!q.ok) {
            rep.failures.push_back({"psi_after_phi", q.failure});
            continue;
        }
        if (canonical_code(q.m) != canonical_code(m))
            rep.failures.push_back({"roundtrip_map", canonical_code(m)});
        else {
            ++rep.roundtrip_map_ok;
            rep.good_map_counts[m.total_vertices()]++;
        }
    }
    for (auto& h0 : hms.list) {
        for (int sign : {+1, -1}) {
            if (h0.trivial() && sign < 0) continue;
            Hypermobile h = h0;
            h.root_sign = sign;
            rep.hm_counts[h.size_statistic()]++;
            ++full_codes;
            // white-only projection of the gate data (the S'-association probe)
            Hypermobile wh = h;
            for (auto& e : wh.hyperedges)
                for (auto& g : e) g.black = 0;
            white_only_codes.insert(canonical_code(wh));
            PsiOutcome q = psi(h, cv);
            if (!q.ok) {
                rep.failures.push_back({"psi", q.failure});
                continue;
            }
            auto vr = validate_stuffed_map(q.m, s);
            if (!vr.ok()) {
                rep.failures.push_back({"psi_invalid_output",
                                        vr.violations[0] + " | hm " + canonical_code(h)});
                continue;
            }
            PhiOutcome p = phi(q.m, cv);
            if (!p.ok) {
                rep.failures.push_back({"phi_after_psi", p.failure});
                continue;
            }
            if (canonical_code(p.h) != canonical_code(h))
                rep.failures.push_back({"roundtrip_hypermobile", canonical_code(h)});
            else {
                ++rep.roundtrip_hm_ok;
                rep.good_hm_counts[h.size_statistic()]++;
            }
        }
    }
    rep.white_only_gate_collisions = full_codes - (long long)white_only_codes.size();

    // the trivial pair participates on both sides by convention
    rep.map_counts[1] += 1;
    rep.good_map_counts[1] += 1;
    return rep;
}

} // namespace smap
