#pragma once

#include "stuffedmap/cells.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <string>
#include <vector>

namespace smap {

struct MalformedPermutation : error {
    explicit MalformedPermutation(const std::string& w) : error("malformed permutation: " + w) {}
};
struct NonPlanar : error {
    NonPlanar() : error("component is not planar (Euler characteristic != 2)") {}
};
struct NotBipartite : error {
    NotBipartite() : error("component graph is not bipartite") {}
};
struct NotHypertree : error {
    NotHypertree() : error("component/branch incidence hypergraph is not a hypertree") {}
};
struct UndistinguishedComponent : error {
    UndistinguishedComponent() : error("component carries no anchor for canonical traversal") {}
};
struct UnreachableVertex : error {
    UnreachableVertex() : error("component graph is internally disconnected") {}
};

// One planar component as a rotation system: sigma rotates half-edges
// counterclockwise around their vertex, alpha pairs the two halves of each
// edge. Vertices are sigma-orbits, faces are orbits of h -> sigma[alpha[h]].
// The empty component (no half-edges) is the single-vertex map.
struct Component {
    std::vector<int> sigma, alpha;

    // derived, filled by finalize()
    std::vector<int> vertex_of, face_of;
    std::vector<int> vertex_color; // 2-coloring per vertex
    int num_vertices = 0, num_faces = 0;

    int size() const { return int(sigma.size()); }
    int num_edges() const { return size() / 2; }
    int euler_characteristic() const { return num_vertices - num_edges() + num_faces; }

    int face_next(int h) const { return sigma[alpha[h]]; }

    std::vector<std::vector<int>> face_contours() const {
        std::vector<std::vector<int>> out(num_faces);
        std::vector<char> seen(size(), 0);
        for (int h = 0; h < size(); ++h) {
            if (seen[h]) continue;
            std::vector<int> cyc;
            int x = h;
            do {
                seen[x] = 1;
                cyc.push_back(x);
                x = face_next(x);
            } while (x != h);
            out[face_of[h]] = std::move(cyc);
        }
        return out;
    }

    int face_degree(int f) const {
        int d = 0;
        for (int h = 0; h < size(); ++h)
            if (face_of[h] == f) ++d;
        return d;
    }

    // graph distances from a vertex (half-edge adjacency); UnreachableVertex if disconnected
    std::vector<int> vertex_distances(int v0) const {
        std::vector<int> dist(std::max(num_vertices, 1), -1);
        dist[v0] = 0;
        std::vector<int> q{v0};
        std::vector<std::vector<int>> out(num_vertices);
        for (int h = 0; h < size(); ++h) out[vertex_of[h]].push_back(h);
        for (size_t i = 0; i < q.size(); ++i) {
            int v = q[i];
            for (int h : out[v]) {
                int w = vertex_of[alpha[h]];
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    q.push_back(w);
                }
            }
        }
        for (int d : dist)
            if (d < 0) throw UnreachableVertex{};
        return dist;
    }

    Component mirrored() const; // sigma inverted, derived data rebuilt

    void finalize(); // computes orbits + coloring, throws on malformed/non-planar/non-bipartite
};

inline void Component::finalize() {
    const int n = size();
    if (int(alpha.size()) != n) throw MalformedPermutation("sigma/alpha size mismatch");
    std::vector<char> seen(n, 0);
    for (int h = 0; h < n; ++h) {
        if (sigma[h] < 0 || sigma[h] >= n || alpha[h] < 0 || alpha[h] >= n)
            throw MalformedPermutation("image out of range");
        if (alpha[alpha[h]] != h) throw MalformedPermutation("alpha is not an involution");
        if (alpha[h] == h) throw MalformedPermutation("alpha has a fixed point");
        seen[sigma[h]]++;
    }
    for (int h = 0; h < n; ++h)
        if (seen[h] != 1) throw MalformedPermutation("sigma is not a bijection");

    vertex_of.assign(n, -1);
    num_vertices = 0;
    for (int h = 0; h < n; ++h) {
        if (vertex_of[h] >= 0) continue;
        int x = h;
        do {
            vertex_of[x] = num_vertices;
            x = sigma[x];
        } while (x != h);
        ++num_vertices;
    }
    face_of.assign(n, -1);
    num_faces = 0;
    for (int h = 0; h < n; ++h) {
        if (face_of[h] >= 0) continue;
        int x = h;
        do {
            face_of[x] = num_faces;
            x = face_next(x);
        } while (x != h);
        ++num_faces;
    }
    if (n == 0) {
        num_vertices = 1;
        num_faces = 1;
        vertex_color = {0};
        return;
    }

    // connectivity of the half-edge structure under <sigma, alpha>
    {
        std::vector<char> vis(n, 0);
        std::vector<int> st{0};
        vis[0] = 1;
        int cnt = 1;
        while (!st.empty()) {
            int h = st.back();
            st.pop_back();
            for (int g : {sigma[h], alpha[h]})
                if (!vis[g]) {
                    vis[g] = 1;
                    ++cnt;
                    st.push_back(g);
                }
        }
        if (cnt != n) throw MalformedPermutation("half-edge set is not connected; split components first");
    }

    if (euler_characteristic() != 2) throw NonPlanar{};

    vertex_color.assign(num_vertices, -1);
    std::vector<std::vector<int>> out(num_vertices);
    for (int h = 0; h < n; ++h) out[vertex_of[h]].push_back(h);
    std::vector<int> q{0};
    vertex_color[0] = 0;
    for (size_t i = 0; i < q.size(); ++i) {
        int v = q[i];
        for (int h : out[v]) {
            int w = vertex_of[alpha[h]];
            if (vertex_color[w] < 0) {
                vertex_color[w] = 1 - vertex_color[v];
                q.push_back(w);
            } else if (vertex_color[w] == vertex_color[v]) {
                throw NotBipartite{};
            }
        }
    }
}

inline Component Component::mirrored() const {
    Component m;
    m.alpha = alpha;
    m.sigma.assign(size(), 0);
    for (int h = 0; h < size(); ++h) m.sigma[sigma[h]] = h;
    m.finalize();
    return m;
}

inline Component assemble_component(std::vector<int> sigma, std::vector<int> alpha) {
    Component c;
    c.sigma = std::move(sigma);
    c.alpha = std::move(alpha);
    c.finalize();
    return c;
}

// A corner is addressed by the half-edge whose origin vertex it sits at,
// reading the face contour: corner h lies on face face_of[h] at vertex
// vertex_of[h]. Spurious points are stored this way.
struct BranchAttachment {
    int component = -1;
    int face = -1;
    int spurious = -1; // corner half-edge on `face`, or -1 when undecorated
    bool operator==(const BranchAttachment& o) const {
        return component == o.component && face == o.face && spurious == o.spurious;
    }
};

struct Branch {
    std::vector<BranchAttachment> attachments; // unordered set semantics
};

struct StuffedMap {
    std::vector<Component> components;
    std::vector<Branch> branches;
    int root_component = -1;
    int root_half_edge = -1;   // oriented: origin vertex_of[root_half_edge]
    bool boundary_rooted = false; // true: face of root is the distinguished boundary
    int source_component = -1; // pointed decoration
    int source_vertex = -1;

    bool pointed() const { return source_component >= 0; }
    bool rooted() const { return root_component >= 0; }
    bool bms_decorated() const {
        if (branches.empty()) return true;
        for (auto& b : branches)
            for (auto& a : b.attachments)
                if (a.spurious < 0) return false;
        return true;
    }

    int total_vertices() const {
        int v = 0;
        for (auto& c : components) v += c.num_vertices;
        return v;
    }
    int total_edges() const {
        int e = 0;
        for (auto& c : components) e += c.num_edges();
        return e;
    }
    int total_faces() const {
        int f = 0;
        for (auto& c : components) f += c.num_faces;
        return f;
    }

    int boundary_face() const { return components[root_component].face_of[root_half_edge]; }

    // cell-multiplicity vector over a CellSet, derived from faces + branches
    std::vector<int> cell_multiplicities(const CellSet& s) const;
};

struct EulerData {
    int chi = 0;
    int genus = 0;
    int K = 0;
};

inline EulerData euler_genus(const StuffedMap& m) {
    EulerData e;
    e.K = int(m.components.size());
    e.chi = m.total_vertices() - m.total_edges() + m.total_faces();
    e.genus = e.K - e.chi / 2;
    return e;
}

struct Hypergraph {
    int nodes = 0;
    std::vector<std::vector<int>> edges;

    // connected and acyclic in the host-graph sense: each hyperedge expands to
    // a linear sequence of arity-1 edges, and the expansion must be a tree.
    bool is_hypertree() const {
        if (nodes == 0) return false;
        std::vector<int> parent(nodes);
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        long long host_edges = 0;
        for (auto& e : edges) {
            host_edges += int(e.size()) - 1;
            for (size_t i = 1; i < e.size(); ++i) {
                int a = find(e[0]), b = find(e[i]);
                if (a == b) return false; // cycle (also catches repeated nodes)
                parent[a] = b;
            }
        }
        if (host_edges != nodes - 1) return false;
        int r = find(0);
        for (int v = 1; v < nodes; ++v)
            if (find(v) != r) return false;
        return true;
    }
};

inline Hypergraph associated_hypertree(const StuffedMap& m, bool strict = true) {
    Hypergraph h;
    h.nodes = int(m.components.size());
    for (auto& b : m.branches) {
        std::vector<int> e;
        for (auto& a : b.attachments) e.push_back(a.component);
        h.edges.push_back(std::move(e));
    }
    if (strict && !h.is_hypertree()) throw NotHypertree{};
    return h;
}

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
    void add(std::string v) { violations.push_back(std::move(v)); }
    std::string str() const {
        std::string s;
        for (auto& v : violations) s += v + "\n";
        return s;
    }
};

inline std::vector<int> StuffedMap::cell_multiplicities(const CellSet& s) const {
    std::vector<int> mult(s.size(), 0);
    std::vector<std::vector<char>> is_branch_face(components.size());
    for (size_t c = 0; c < components.size(); ++c)
        is_branch_face[c].assign(components[c].num_faces, 0);
    for (auto& b : branches) {
        std::vector<int> lens;
        for (auto& a : b.attachments) {
            lens.push_back(components[a.component].face_degree(a.face));
            is_branch_face[a.component][a.face] = 1;
        }
        std::sort(lens.begin(), lens.end());
        for (size_t i = 0; i < s.size(); ++i)
            if (s.shapes[i].boundary_lengths == lens) {
                mult[i]++;
                break;
            }
    }
    int bf = boundary_rooted && rooted() ? boundary_face() : -1;
    for (size_t c = 0; c < components.size(); ++c)
        for (int f = 0; f < components[c].num_faces; ++f) {
            if (is_branch_face[c][f]) continue;
            if (int(c) == root_component && f == bf) continue;
            int idx = s.polygon_index(components[c].face_degree(f));
            if (idx >= 0) mult[idx]++;
        }
    return mult;
}

// Report-style validation of the full stuffed-map invariants plus
// conformance of every face to the cell set.
inline ValidationReport validate_stuffed_map(const StuffedMap& m, const CellSet& s) {
    ValidationReport r;
    if (m.components.empty()) {
        r.add("map has no components");
        return r;
    }
    for (size_t c = 0; c < m.components.size(); ++c) {
        const Component& comp = m.components[c];
        if (comp.size() > 0 && comp.euler_characteristic() != 2)
            r.add("component " + std::to_string(c) + " is not planar");
    }

    // per-face branch bookkeeping
    std::vector<std::vector<int>> branch_on_face(m.components.size());
    for (size_t c = 0; c < m.components.size(); ++c)
        branch_on_face[c].assign(m.components[c].num_faces, -1);
    for (size_t bi = 0; bi < m.branches.size(); ++bi) {
        auto& b = m.branches[bi];
        if (b.attachments.size() < 2) r.add("branch " + std::to_string(bi) + " has arity < 2");
        std::vector<int> lens;
        for (auto& a : b.attachments) {
            if (a.component < 0 || a.component >= int(m.components.size())) {
                r.add("branch attachment references missing component");
                continue;
            }
            const Component& comp = m.components[a.component];
            if (a.face < 0 || a.face >= comp.num_faces) {
                r.add("branch attachment references missing face");
                continue;
            }
            if (branch_on_face[a.component][a.face] >= 0)
                r.add("face hosts more than one branch attachment");
            branch_on_face[a.component][a.face] = int(bi);
            lens.push_back(comp.face_degree(a.face));
            if (a.spurious >= 0) {
                if (a.spurious >= comp.size() || comp.face_of[a.spurious] != a.face)
                    r.add("spurious corner not on its attachment face");
            }
        }
        std::sort(lens.begin(), lens.end());
        bool found = false;
        for (auto& shape : s.shapes)
            if (!shape.is_polygon() && shape.boundary_lengths == lens) found = true;
        if (!found) r.add("branch boundary profile matches no cell (face degree mismatch)");
    }

    // every remaining face is the boundary or a polygon of s; the trivial
    // single-vertex component's sphere face carries no cell
    int bf = (m.rooted() && m.boundary_rooted) ? m.boundary_face() : -1;
    for (size_t c = 0; c < m.components.size(); ++c)
        for (int f = 0; f < m.components[c].num_faces; ++f) {
            if (branch_on_face[c][f] >= 0) continue;
            if (int(c) == m.root_component && f == bf) continue;
            if (m.components[c].size() == 0) continue;
            int deg = m.components[c].face_degree(f);
            if (s.polygon_index(deg) < 0)
                r.add("face of degree " + std::to_string(deg) + " matches no polygon in the cell set");
        }

    Hypergraph h = associated_hypertree(m, false);
    if (!h.is_hypertree()) r.add("component/branch hypergraph is not a hypertree");

    if (m.rooted()) {
        if (m.root_component >= int(m.components.size()) ||
            m.root_half_edge >= m.components[m.root_component].size())
            r.add("root out of range");
    }
    if (m.pointed()) {
        if (m.source_component >= int(m.components.size()) ||
            m.source_vertex >= m.components[m.source_component].num_vertices)
            r.add("source out of range");
        for (auto& b : m.branches)
            for (auto& a : b.attachments)
                if (a.spurious >= 0 && a.component == m.source_component &&
                    m.components[a.component].vertex_of[a.spurious] == m.source_vertex)
                    r.add("source coincides with spurious point");
    }
    return r;
}

// ---------------------------------------------------------------------------
// canonical codes

namespace detail {

// Relabel a connected component by BFS from an anchor half-edge; equal outputs
// characterize root-preserving isomorphism.
inline std::vector<int> component_code(const Component& c, int anchor) {
    const int n = c.size();
    std::vector<int> idx(n, -1), order;
    order.reserve(n);
    idx[anchor] = 0;
    order.push_back(anchor);
    for (size_t i = 0; i < order.size(); ++i) {
        for (int g : {c.sigma[order[i]], c.alpha[order[i]]})
            if (idx[g] < 0) {
                idx[g] = int(order.size());
                order.push_back(g);
            }
    }
    std::vector<int> code;
    code.reserve(2 * n);
    for (int h : order) code.push_back(idx[c.sigma[h]]);
    for (int h : order) code.push_back(idx[c.alpha[h]]);
    return code;
}

inline std::vector<int> component_relabel(const Component& c, int anchor) {
    std::vector<int> idx(c.size(), -1), order;
    idx[anchor] = 0;
    order.push_back(anchor);
    for (size_t i = 0; i < order.size(); ++i)
        for (int g : {c.sigma[order[i]], c.alpha[order[i]]})
            if (idx[g] < 0) {
                idx[g] = int(order.size());
                order.push_back(g);
            }
    return idx;
}

} // namespace detail

class CanonicalCoder {
public:
    explicit CanonicalCoder(const StuffedMap& m) : m_(m) {
        if (!m.rooted()) throw error("canonical code requires a rooted map");
        children_.assign(m.branches.size(), {});
        entry_of_.assign(m.components.size(), std::make_pair(-1, -1));
        build_tree();
    }

    std::string code() {
        std::string s = "M";
        s += m_.boundary_rooted ? "b" : "e";
        encode_component(m_.root_component, m_.root_half_edge, -1, s);
        return s;
    }

    // automorphisms fixing the root (undecorated maps may have several)
    long long aut_count() { return aut_component(m_.root_component, m_.root_half_edge, -1); }

    // the same map relabelled canonically: components in traversal order, half
    // edges renumbered from their anchors, branch children sorted by code.
    // Isomorphic inputs produce identical forms.
    StuffedMap canonical_form() {
        StuffedMap out;
        out.boundary_rooted = m_.boundary_rooted;
        emit_component(m_.root_component, m_.root_half_edge, -1, out);
        out.root_component = 0;
        out.root_half_edge = 0;
        return out;
    }

private:
    const StuffedMap& m_;
    // branch -> (parent attachment index, child attachment indices), relative to
    // the hypertree rooted at the gasket
    std::vector<std::pair<int, std::vector<int>>> children_;
    std::vector<std::pair<int, int>> entry_of_; // component -> (branch, attachment idx)

    void build_tree() {
        std::vector<char> comp_seen(m_.components.size(), 0), br_seen(m_.branches.size(), 0);
        comp_seen[m_.root_component] = 1;
        std::vector<int> q{m_.root_component};
        for (size_t i = 0; i < q.size(); ++i) {
            int c = q[i];
            for (size_t bi = 0; bi < m_.branches.size(); ++bi) {
                if (br_seen[bi]) continue;
                auto& b = m_.branches[bi];
                int parent_idx = -1;
                for (size_t ai = 0; ai < b.attachments.size(); ++ai)
                    if (b.attachments[ai].component == c) parent_idx = int(ai);
                if (parent_idx < 0) continue;
                br_seen[bi] = 1;
                children_[bi].first = parent_idx;
                for (size_t ai = 0; ai < b.attachments.size(); ++ai) {
                    if (int(ai) == parent_idx) continue;
                    children_[bi].second.push_back(int(ai));
                    int cc = b.attachments[ai].component;
                    if (comp_seen[cc]) throw NotHypertree{};
                    comp_seen[cc] = 1;
                    entry_of_[cc] = {int(bi), int(ai)};
                    q.push_back(cc);
                }
            }
        }
        for (char s : comp_seen)
            if (!s) throw NotHypertree{};
    }

    // branches hosted on component c other than its entry branch
    std::vector<int> own_branches(int c, int entry_branch) const {
        std::vector<int> out;
        for (size_t bi = 0; bi < m_.branches.size(); ++bi) {
            if (int(bi) == entry_branch) continue;
            int pi = children_[bi].first;
            if (m_.branches[bi].attachments[pi].component == c) out.push_back(int(bi));
        }
        return out;
    }

    static void append_int(std::string& s, int v) {
        s += std::to_string(v);
        s += ',';
    }

    void encode_component(int c, int anchor, int entry_branch, std::string& out) {
        const Component& comp = m_.components[c];
        if (comp.size() == 0) {
            out += "T;"; // trivial single-vertex component
            if (m_.pointed() && m_.source_component == c) out += "s0;";
            return;
        }
        std::vector<int> idx = detail::component_relabel(comp, anchor);
        auto code = detail::component_code(comp, anchor);
        out += "C";
        for (int v : code) append_int(out, v);
        out += ";";
        if (m_.pointed() && m_.source_component == c) {
            // canonical id of the source vertex: minimal relabeled half-edge at it
            int best = comp.size();
            for (int h = 0; h < comp.size(); ++h)
                if (comp.vertex_of[h] == m_.source_vertex) best = std::min(best, idx[h]);
            out += "s";
            append_int(out, best);
            out += ";";
        }
        // branches on c, ordered by canonical parent corner id
        auto brs = own_branches(c, entry_branch);
        std::vector<std::pair<int, int>> ordered; // (canonical spurious-or-face key, branch)
        for (int bi : brs) {
            auto& att = m_.branches[bi].attachments[children_[bi].first];
            int key;
            if (att.spurious >= 0) {
                key = idx[att.spurious];
            } else {
                key = comp.size();
                for (int h = 0; h < comp.size(); ++h)
                    if (comp.face_of[h] == att.face) key = std::min(key, idx[h]);
            }
            ordered.emplace_back(key, bi);
        }
        std::sort(ordered.begin(), ordered.end());
        for (auto& [key, bi] : ordered) {
            auto& att = m_.branches[bi].attachments[children_[bi].first];
            out += "B";
            append_int(out, key);
            append_int(out, att.spurious >= 0 ? 1 : 0);
            // children sorted by their canonical subtree codes
            std::vector<std::string> subcodes;
            for (int ai : children_[bi].second) subcodes.push_back(child_code(bi, ai));
            std::sort(subcodes.begin(), subcodes.end());
            for (auto& sc : subcodes) out += "(" + sc + ")";
            out += ";";
        }
    }

    std::string child_code(int bi, int ai) {
        auto& att = m_.branches[bi].attachments[ai];
        const Component& comp = m_.components[att.component];
        std::string best;
        for (int anchor : child_anchors(att)) {
            std::string s;
            append_int(s, comp.size() ? comp.face_degree(att.face) : 0);
            append_int(s, att.spurious >= 0 ? 1 : 0);
            encode_component(att.component, anchor, bi, s);
            if (best.empty() || s < best) best = s;
        }
        return best;
    }

    // anchor candidates for a child component entered through `att`
    std::vector<int> child_anchors(const BranchAttachment& att) const {
        const Component& comp = m_.components[att.component];
        if (att.spurious >= 0) return {att.spurious};
        std::vector<int> corners;
        for (int h = 0; h < comp.size(); ++h)
            if (comp.face_of[h] == att.face) corners.push_back(h);
        if (corners.empty()) throw UndistinguishedComponent{};
        return corners;
    }

    // rebuild component c (anchored at `anchor`) into `out`, then its subtree
    int emit_component(int c, int anchor, int entry_branch, StuffedMap& out) {
        const Component& comp = m_.components[c];
        std::vector<int> idx = comp.size() ? detail::component_relabel(comp, anchor)
                                           : std::vector<int>{};
        Component rc;
        rc.sigma.assign(comp.size(), 0);
        rc.alpha.assign(comp.size(), 0);
        for (int h = 0; h < comp.size(); ++h) {
            rc.sigma[idx[h]] = idx[comp.sigma[h]];
            rc.alpha[idx[h]] = idx[comp.alpha[h]];
        }
        rc.finalize();
        int my_id = int(out.components.size());
        out.components.push_back(rc);
        if (m_.pointed() && m_.source_component == c) {
            out.source_component = my_id;
            int best = INT32_MAX;
            for (int h = 0; h < comp.size(); ++h)
                if (comp.vertex_of[h] == m_.source_vertex)
                    best = std::min(best, out.components[my_id].vertex_of[idx[h]]);
            out.source_vertex = comp.size() ? best : 0;
        }
        auto brs = own_branches(c, entry_branch);
        std::vector<std::pair<int, int>> ordered;
        for (int bi : brs) {
            auto& att = m_.branches[bi].attachments[children_[bi].first];
            int key = comp.size();
            if (att.spurious >= 0)
                key = idx[att.spurious];
            else
                for (int h = 0; h < comp.size(); ++h)
                    if (comp.face_of[h] == att.face) key = std::min(key, idx[h]);
            ordered.emplace_back(key, bi);
        }
        std::sort(ordered.begin(), ordered.end());
        for (auto& [key, bi] : ordered) {
            auto& patt = m_.branches[bi].attachments[children_[bi].first];
            Branch nb;
            BranchAttachment pa;
            pa.component = my_id;
            pa.spurious = patt.spurious >= 0 ? idx[patt.spurious] : -1;
            int fh = patt.spurious >= 0 ? patt.spurious : -1;
            if (fh < 0)
                for (int h = 0; h < comp.size(); ++h)
                    if (comp.face_of[h] == patt.face) fh = h;
            pa.face = out.components[my_id].face_of[idx[fh]];
            nb.attachments.push_back(pa);
            // children sorted by their canonical codes, then emitted
            std::vector<std::pair<std::string, int>> subs;
            for (int ai : children_[bi].second)
                subs.emplace_back(child_code(bi, ai), ai);
            std::sort(subs.begin(), subs.end());
            int branch_slot = int(out.branches.size());
            out.branches.push_back(nb);
            for (auto& [code, ai] : subs) {
                auto& att = m_.branches[bi].attachments[ai];
                int child_anchor = att.spurious >= 0 ? att.spurious : best_child_anchor(bi, ai);
                const Component& cc = m_.components[att.component];
                std::vector<int> cidx = detail::component_relabel(cc, child_anchor);
                int child_id = emit_component(att.component, child_anchor, bi, out);
                BranchAttachment ca;
                ca.component = child_id;
                ca.spurious = att.spurious >= 0 ? cidx[att.spurious] : -1;
                int ch = att.spurious >= 0 ? att.spurious : -1;
                if (ch < 0)
                    for (int h = 0; h < cc.size(); ++h)
                        if (cc.face_of[h] == att.face) ch = h;
                out.branches[branch_slot].attachments.push_back(
                    {child_id, out.components[child_id].face_of[cidx[ch]], ca.spurious});
            }
        }
        return my_id;
    }

    int best_child_anchor(int bi, int ai) {
        auto& att = m_.branches[bi].attachments[ai];
        std::string best;
        int best_anchor = -1;
        for (int anchor : child_anchors(att)) {
            std::string s;
            encode_component(att.component, anchor, bi, s);
            if (best_anchor < 0 || s < best) {
                best = s;
                best_anchor = anchor;
            }
        }
        return best_anchor;
    }

    long long aut_component(int c, int anchor_or_face, int entry_branch, bool face_mode = false) {
        // face_mode: anchor_or_face is the entry face; count equal-code anchors
        const Component& comp = m_.components[c];
        long long a = 1;
        if (face_mode) {
            std::vector<std::string> codes;
            for (int h = 0; h < comp.size(); ++h) {
                if (comp.face_of[h] != anchor_or_face) continue;
                std::string s;
                encode_component(c, h, entry_branch, s);
                codes.push_back(std::move(s));
            }
            std::string best = *std::min_element(codes.begin(), codes.end());
            a = std::count(codes.begin(), codes.end(), best);
        }
        for (int bi : own_branches(c, entry_branch)) {
            std::vector<std::pair<std::string, int>> subs; // (code, attachment)
            for (int ai : children_[bi].second)
                subs.emplace_back(child_code(bi, ai), ai);
            std::sort(subs.begin(), subs.end());
            for (size_t i = 0; i < subs.size();) {
                size_t j = i;
                while (j < subs.size() && subs[j].first == subs[i].first) ++j;
                for (size_t k = 2; k <= j - i; ++k) a *= (long long)k; // multiset permutations
                i = j;
            }
            for (auto& [code, ai] : subs) {
                auto& att = m_.branches[bi].attachments[ai];
                if (att.spurious >= 0)
                    a *= aut_component(att.component, att.spurious, bi);
                else
                    a *= aut_component(att.component, att.face, bi, true);
            }
        }
        return a;
    }
};

inline bool is_trivial_map(const StuffedMap& m) {
    return m.components.size() == 1 && m.components[0].size() == 0 && m.branches.empty();
}

inline std::string canonical_code(const StuffedMap& m) {
    if (is_trivial_map(m) && !m.rooted()) return "M:trivial";
    return CanonicalCoder(m).code();
}
inline StuffedMap canonicalized(const StuffedMap& m) {
    if (is_trivial_map(m) && !m.rooted()) return m;
    return CanonicalCoder(m).canonical_form();
}
inline long long automorphism_count(const StuffedMap& m) {
    if (is_trivial_map(m) && !m.rooted()) return 1;
    return CanonicalCoder(m).aut_count();
}

inline StuffedMap mirrored(const StuffedMap& m) {
    StuffedMap r = m;
    for (auto& c : r.components) c = c.mirrored();
    return r;
}

} // namespace smap
