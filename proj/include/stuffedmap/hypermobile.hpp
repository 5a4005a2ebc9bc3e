#pragma once

#include "stuffedmap/map_core.hpp"

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

namespace smap {

struct MalformedContour : error {
    MalformedContour() : error("contour successor search failed on an invalid hypermobile") {}
};

// Plane tree with black vertices and integer-labelled white vertices.
// nbr[v] lists the neighbours of v in cyclic (counterclockwise) order.
struct Mobile {
    std::vector<std::vector<int>> nbr;
    std::vector<int> color; // 0 white, 1 black
    std::vector<int> label; // meaningful for whites

    int size() const { return int(color.size()); }
    int num_edges() const {
        int d = 0;
        for (auto& a : nbr) d += int(a.size());
        return d / 2;
    }
    int count_white() const { return int(std::count(color.begin(), color.end(), 0)); }

    bool is_tree() const {
        int n = size();
        if (n == 0) return false;
        if (num_edges() != n - 1) return false;
        std::vector<char> vis(n, 0);
        std::vector<int> st{0};
        vis[0] = 1;
        int cnt = 1;
        while (!st.empty()) {
            int v = st.back();
            st.pop_back();
            for (int w : nbr[v])
                if (!vis[w]) {
                    vis[w] = 1;
                    ++cnt;
                    st.push_back(w);
                }
        }
        return cnt == n;
    }

    int min_white_label() const {
        int m = INT32_MAX;
        for (int v = 0; v < size(); ++v)
            if (color[v] == 0) m = std::min(m, label[v]);
        return m;
    }
};

// A hyperedge endpoint: the white gate vertex together with the black vertex
// of the 2-cell boundary it belongs to. Gates follow the hypermobile
// definition (whites); the black anchor carries the boundary-length data the
// S' association needs and pins the face for reconstruction.
struct GateRef {
    int mobile = -1;
    int white = -1;
    int black = -1;
    bool operator==(const GateRef& o) const {
        return mobile == o.mobile && white == o.white && black == o.black;
    }
};

struct Hypermobile {
    std::vector<Mobile> mobiles;
    std::vector<std::vector<GateRef>> hyperedges;
    int origin = -1;
    int root_white = -1;
    int root_black = -1; // -1 only for the degenerate single-white object
    // orientation of the map root edge relative to its labels (+1: from the
    // larger label); the classical factor 2 between pointed rooted maps and
    // labelled trees
    int root_sign = +1;

    bool trivial() const {
        return mobiles.size() == 1 && mobiles[0].size() == 1 && hyperedges.empty();
    }
    int total_white() const {
        int w = 0;
        for (auto& m : mobiles) w += m.count_white();
        return w;
    }
    // the statistic matching a map's vertex count; the degenerate single-white
    // object pairs with the single-vertex map
    int size_statistic() const { return trivial() ? 1 : total_white() + int(mobiles.size()); }
};

// hypertree orientation: for each non-origin mobile, the hyperedge and parent
// mobile on its path to the origin
struct HypertreeOrientation {
    std::vector<int> entry_edge;   // per mobile, -1 for origin
    std::vector<int> parent;       // per mobile, -1 for origin
    bool valid = false;
};

inline HypertreeOrientation orient_hypertree(const Hypermobile& h) {
    HypertreeOrientation o;
    int n = int(h.mobiles.size());
    o.entry_edge.assign(n, -1);
    o.parent.assign(n, -1);
    Hypergraph hg;
    hg.nodes = n;
    for (auto& e : h.hyperedges) {
        std::vector<int> ns;
        for (auto& g : e) ns.push_back(g.mobile);
        hg.edges.push_back(std::move(ns));
    }
    if (!hg.is_hypertree()) return o;
    std::vector<char> seen(n, 0), eseen(h.hyperedges.size(), 0);
    std::vector<int> q{h.origin};
    seen[h.origin] = 1;
    for (size_t i = 0; i < q.size(); ++i) {
        int m = q[i];
        for (size_t ei = 0; ei < h.hyperedges.size(); ++ei) {
            if (eseen[ei]) continue;
            bool touches = false;
            for (auto& g : h.hyperedges[ei]) touches |= (g.mobile == m);
            if (!touches) continue;
            eseen[ei] = 1;
            for (auto& g : h.hyperedges[ei])
                if (!seen[g.mobile]) {
                    seen[g.mobile] = 1;
                    o.entry_edge[g.mobile] = int(ei);
                    o.parent[g.mobile] = m;
                    q.push_back(g.mobile);
                }
        }
    }
    o.valid = std::all_of(seen.begin(), seen.end(), [](char c) { return c == 1; });
    return o;
}

// The clockwise-neighbour rule around black vertices is checked against the
// stored rotation read in reverse (rotations are counterclockwise).
inline bool black_label_rule_ok(const Mobile& m, int b) {
    auto& ws = m.nbr[b];
    int q = int(ws.size());
    if (q <= 1) return true;
    for (int i = 0; i < q; ++i) {
        int cur = ws[(i + 1) % q], nxt = ws[i]; // reverse order = clockwise
        if (m.label[nxt] < m.label[cur] - 1) return false;
    }
    return true;
}

inline ValidationReport validate_hypermobile(const Hypermobile& h, const CellSet& s) {
    ValidationReport r;
    if (h.mobiles.empty() || h.origin < 0 || h.origin >= int(h.mobiles.size())) {
        r.add("missing origin mobile");
        return r;
    }
    if (h.trivial()) {
        if (h.mobiles[0].color[0] != 0 || h.mobiles[0].label[0] != 0)
            r.add("trivial hypermobile must be a single white vertex labelled 0");
        return r;
    }
    for (size_t mi = 0; mi < h.mobiles.size(); ++mi) {
        const Mobile& m = h.mobiles[mi];
        if (!m.is_tree()) {
            r.add("mobile " + std::to_string(mi) + " is not a tree");
            continue;
        }
        for (int v = 0; v < m.size(); ++v)
            for (int w : m.nbr[v])
                if (m.color[v] == m.color[w]) r.add("mobile edge joins same-colour vertices");
        for (int v = 0; v < m.size(); ++v)
            if (m.color[v] == 1 && !black_label_rule_ok(m, v))
                r.add("clockwise-neighbour label rule violated around a black vertex");
    }

    auto o = orient_hypertree(h);
    if (!o.valid) {
        r.add("mobile/hyperedge hypergraph is not a hypertree");
        return r;
    }

    // hyperedge references + S' conformance
    std::vector<std::vector<int>> black_used(h.mobiles.size());
    for (size_t mi = 0; mi < h.mobiles.size(); ++mi)
        black_used[mi].assign(h.mobiles[mi].size(), -1);
    for (size_t ei = 0; ei < h.hyperedges.size(); ++ei) {
        auto& e = h.hyperedges[ei];
        if (e.size() < 2) r.add("hyperedge of arity < 2");
        std::vector<int> ms, lens;
        for (auto& g : e) {
            if (g.mobile < 0 || g.mobile >= int(h.mobiles.size())) {
                r.add("hyperedge references missing mobile");
                continue;
            }
            const Mobile& m = h.mobiles[g.mobile];
            ms.push_back(g.mobile);
            if (g.white < 0 || g.white >= m.size() || m.color[g.white] != 0)
                r.add("gate reference is not a white vertex");
            if (g.black < 0 || g.black >= m.size() || m.color[g.black] != 1) {
                r.add("hyperedge face anchor is not a black vertex");
                continue;
            }
            if (black_used[g.mobile][g.black] >= 0)
                r.add("black vertex anchors more than one hyperedge");
            black_used[g.mobile][g.black] = int(ei);
            lens.push_back(2 * int(m.nbr[g.black].size()));
        }
        std::sort(ms.begin(), ms.end());
        if (std::adjacent_find(ms.begin(), ms.end()) != ms.end())
            r.add("hyperedge touches a mobile twice");
        std::sort(lens.begin(), lens.end());
        bool found = false;
        for (auto& shape : s.shapes)
            if (!shape.is_polygon() && shape.boundary_lengths == lens) found = true;
        if (!found) r.add("hyperedge black valencies match no multi-boundary cell");
    }
    for (size_t mi = 0; mi < h.mobiles.size(); ++mi)
        for (int v = 0; v < h.mobiles[mi].size(); ++v)
            if (h.mobiles[mi].color[v] == 1 && black_used[mi][v] < 0)
                if (s.polygon_index(2 * int(h.mobiles[mi].nbr[v].size())) < 0)
                    r.add("black valency matches no polygon in the cell set");

    // gate labelling along the hypertree
    for (size_t mi = 0; mi < h.mobiles.size(); ++mi) {
        if (int(mi) == h.origin) continue;
        int ei = o.entry_edge[mi];
        const GateRef *entry = nullptr, *toward = nullptr;
        for (auto& g : h.hyperedges[ei]) {
            if (g.mobile == int(mi)) entry = &g;
            if (g.mobile == o.parent[mi]) toward = &g;
        }
        if (!entry || !toward) {
            r.add("hypertree orientation lost a gate");
            continue;
        }
        const Mobile& m = h.mobiles[mi];
        int mn = m.min_white_label();
        if (m.label[entry->white] != mn) r.add("entry gate label rule: minimum not attained at entry gate");
        if (m.label[entry->white] != h.mobiles[toward->mobile].label[toward->white] + 1)
            r.add("entry gate label rule: entry gate is not parent gate + 1");
    }

    // root on the origin mobile, source white labelled 0, origin attains the
    // unique lowest mobile minimum
    const Mobile& om = h.mobiles[h.origin];
    if (h.root_white < 0 || h.root_white >= om.size() || om.color[h.root_white] != 0)
        r.add("root source is not a white vertex of the origin mobile");
    else {
        if (om.label[h.root_white] != 0) r.add("root source is not labelled 0");
        if (h.root_black < 0 || h.root_black >= om.size() ||
            std::find(om.nbr[h.root_white].begin(), om.nbr[h.root_white].end(), h.root_black) ==
                om.nbr[h.root_white].end())
            r.add("root edge is not an edge of the origin mobile");
    }
    int omin = om.min_white_label();
    for (size_t mi = 0; mi < h.mobiles.size(); ++mi)
        if (int(mi) != h.origin && h.mobiles[mi].min_white_label() <= omin)
            r.add("origin mobile does not uniquely attain the lowest label");
    return r;
}

// ---------------------------------------------------------------------------
// canonical code

class HypermobileCoder {
public:
    explicit HypermobileCoder(const Hypermobile& h) : h_(h), o_(orient_hypertree(h)) {
        if (!o_.valid && !h.trivial()) throw NotHypertree{};
    }

    std::string code() {
        if (h_.trivial()) return "H:trivial";
        std::string s = "H";
        s += h_.root_sign > 0 ? "+" : "-";
        encode_mobile(h_.origin, h_.root_white, h_.root_black, -1, s);
        return s;
    }

private:
    const Hypermobile& h_;
    HypertreeOrientation o_;

    // hyperedges parented at mobile mi: they touch mi but are not its entry edge
    std::vector<int> own_edges(int mi, int entry) const {
        std::vector<int> out;
        for (size_t ei = 0; ei < h_.hyperedges.size(); ++ei) {
            if (int(ei) == entry || o_.entry_edge[mi] == int(ei)) continue;
            for (auto& g : h_.hyperedges[ei])
                if (g.mobile == mi) {
                    out.push_back(int(ei));
                    break;
                }
        }
        return out;
    }

    // serialize mobile mi anchored at oriented corner (v, first neighbour),
    // then its hyperedges with children subtree codes; every rotation list is
    // written starting from its traversal anchor so storage rotation is moot
    void encode_mobile(int mi, int v0, int first_nbr, int entry_edge, std::string& out) {
        const Mobile& m = h_.mobiles[mi];
        std::vector<int> id(m.size(), -1), order, anchor(m.size(), -1);
        id[v0] = 0;
        order.push_back(v0);
        anchor[v0] = first_nbr;
        std::vector<std::pair<int, int>> q{{v0, first_nbr}};
        for (size_t qi = 0; qi < q.size(); ++qi) {
            auto [v, fn] = q[qi];
            auto& a = m.nbr[v];
            int deg = int(a.size());
            int start = 0;
            if (fn >= 0)
                for (int i = 0; i < deg; ++i)
                    if (a[i] == fn) start = i;
            for (int i = 0; i < deg; ++i) {
                int w = a[(start + i) % deg];
                if (id[w] < 0) {
                    id[w] = int(order.size());
                    order.push_back(w);
                    anchor[w] = v; // child rotation starts at its parent
                    q.emplace_back(w, v);
                }
            }
        }
        out += "m";
        for (int v : order) {
            out += std::to_string(m.color[v]);
            out += m.color[v] == 0 ? ":" + std::to_string(m.label[v]) : "";
            out += "[";
            auto& a = m.nbr[v];
            int deg = int(a.size());
            int start = 0;
            if (anchor[v] >= 0)
                for (int i = 0; i < deg; ++i)
                    if (a[i] == anchor[v]) start = i;
            for (int i = 0; i < deg; ++i) out += std::to_string(id[a[(start + i) % deg]]) + ",";
            out += "]";
        }
        if (mi == h_.origin) out += "r" + std::to_string(id[h_.root_white]) + "," +
                                     (h_.root_black >= 0 ? std::to_string(id[h_.root_black]) : "-");
        // hyperedges parented here, ordered canonically
        std::vector<std::string> parts;
        for (int ei : own_edges(mi, entry_edge)) {
            const GateRef* mine = nullptr;
            for (auto& g : h_.hyperedges[ei])
                if (g.mobile == mi) mine = &g;
            std::string s = "E" + std::to_string(id[mine->white]) + "," + std::to_string(id[mine->black]) + ":";
            std::vector<std::string> subs;
            for (auto& g : h_.hyperedges[ei])
                if (g.mobile != mi) subs.push_back(child_code(g, ei));
            std::sort(subs.begin(), subs.end());
            for (auto& sc : subs) s += "(" + sc + ")";
            parts.push_back(std::move(s));
        }
        std::sort(parts.begin(), parts.end());
        for (auto& p : parts) out += p;
        out += ";";
    }

    std::string child_code(const GateRef& g, int entry_edge) {
        const Mobile& m = h_.mobiles[g.mobile];
        std::string best;
        int deg = int(m.nbr[g.white].size());
        // anchor: the entry gate white; rotation start is a symmetry candidate
        for (int i = 0; i < std::max(deg, 1); ++i) {
            std::string s = "g" + std::to_string(m.label[g.white]) + ",";
            encode_mobile(g.mobile, g.white, deg ? m.nbr[g.white][i] : -1, entry_edge, s);
            // gate black id under this anchoring
            s += "b";
            s += black_id_under(g, i);
            if (best.empty() || s < best) best = s;
        }
        return best;
    }

    std::string black_id_under(const GateRef& g, int rot) {
        const Mobile& m = h_.mobiles[g.mobile];
        std::vector<int> id(m.size(), -1), order;
        int deg = int(m.nbr[g.white].size());
        id[g.white] = 0;
        order.push_back(g.white);
        std::vector<std::pair<int, int>> q{{g.white, deg ? m.nbr[g.white][rot] : -1}};
        for (size_t qi = 0; qi < q.size(); ++qi) {
            auto [v, fn] = q[qi];
            auto& a = m.nbr[v];
            int dv = int(a.size());
            int start = 0;
            if (fn >= 0)
                for (int i = 0; i < dv; ++i)
                    if (a[i] == fn) start = i;
            for (int i = 0; i < dv; ++i) {
                int w = a[(start + i) % dv];
                if (id[w] < 0) {
                    id[w] = int(order.size());
                    order.push_back(w);
                    q.emplace_back(w, v);
                }
            }
        }
        return std::to_string(id[g.black]);
    }
};

inline std::string canonical_code(const Hypermobile& h) { return HypermobileCoder(h).code(); }

} // namespace smap
