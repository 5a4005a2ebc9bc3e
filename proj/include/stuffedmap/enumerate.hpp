#pragma once

#include "stuffedmap/hypermobile.hpp"

#include <chrono>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace smap {

struct IncompleteTable : error {
    IncompleteTable() : error("count table is not complete through the requested order") {}
};
struct BudgetExceeded : error {
    BudgetExceeded() : error("enumeration exceeded the configured time budget") {}
};

struct CountKey {
    int tpow = 0;
    std::vector<int> mult; // per CellSet shape
    bool operator<(const CountKey& o) const {
        if (tpow != o.tpow) return tpow < o.tpow;
        return mult < o.mult;
    }
    bool operator==(const CountKey& o) const { return tpow == o.tpow && mult == o.mult; }
};

// Exact enumeration results. tpow is the exponent of the vertex weight t the
// entry contributes: the vertex count, plus one per branch boundary for
// branch-marked tables, minus one for pointed tables.
struct CountTable {
    CellSet cells;
    int ell = -1;              // boundary length; -1 for edge-rooted runs
    bool branch_marked = false; // spurious decorations chosen (integer entries)
    bool pointed = false;
    int complete_through = -1; // exact through this t-power
    std::map<CountKey, Rational> entries;

    void add(const CountKey& k, const Rational& c) {
        auto it = entries.find(k);
        if (it == entries.end())
            entries.emplace(k, c);
        else {
            it->second += c;
            if (it->second.is_zero()) entries.erase(it);
        }
    }
    Rational at(int tpow, const std::vector<int>& mult) const {
        auto it = entries.find(CountKey{tpow, mult});
        return it == entries.end() ? Rational(0) : it->second;
    }
};

inline TSeries series_from_counts(const CountTable& tbl, int order) {
    if (order > tbl.complete_through) throw IncompleteTable{};
    SymbolUniverse u = tbl.cells.universe();
    TSeries s(u, order);
    for (auto& [k, c] : tbl.entries) {
        if (k.tpow > order) continue;
        Monomial m(u.size(), 0);
        for (size_t i = 0; i < k.mult.size(); ++i) m[i] = k.mult[i];
        s.at(k.tpow).add_term(m, c);
    }
    return s;
}

struct EnumResult {
    CountTable table;
    std::vector<StuffedMap> maps; // canonical representatives, sorted by code
};

namespace detail {

struct Deadline {
    std::chrono::steady_clock::time_point until{};
    bool armed = false;
    long long checks = 0;
    void poll() {
        if (!armed) return;
        if ((++checks & 0x3ff) == 0 && std::chrono::steady_clock::now() > until)
            throw BudgetExceeded{};
    }
};

inline Deadline make_deadline(long long budget_ms) {
    Deadline d;
    if (budget_ms > 0) {
        d.armed = true;
        d.until = std::chrono::steady_clock::now() + std::chrono::milliseconds(budget_ms);
    }
    return d;
}

// Depth-first gluing of cell boundaries into planar spheres. Faces are placed
// one at a time; the lowest free side either pairs with a free side on its own
// frontier cycle (keeps every sphere planar) or receives a new cell, whose
// extra boundaries seed fresh spheres. Every stuffed map over the cell set is
// reached; canonical codes deduplicate the leftover labelling freedom.
class GlueSearch {
public:
    GlueSearch(const CellSet& s, int boundary_ell, int v_max, Deadline& dl)
        : cells_(s), ell_(boundary_ell), v_max_(v_max), dl_(dl) {}

    // edge-rooted when boundary_ell < 0
    template <typename Sink>
    void run(Sink&& sink) {
        if (ell_ >= 0) {
            if (ell_ % 2 != 0) return; // odd boundary: nothing to glue
            v_base_ = ell_ / 2 + 1;
            if (v_base_ > v_max_) return;
            place_face(-1, -1, ell_, -1);
            dfs(sink);
        } else {
            v_base_ = 2;
            for (size_t ci = 0; ci < cells_.size(); ++ci) {
                auto& shape = cells_.shapes[ci];
                if (v_base_ + shape.vertex_increment() > v_max_) continue;
                reset();
                v_extra_ = shape.vertex_increment();
                mult_[ci]++;
                int cell_inst = int(cell_faces_.size());
                cell_faces_.push_back({int(ci), {}});
                std::set<int> seen_lens;
                for (int b = 0; b < shape.arity(); ++b) {
                    if (!seen_lens.insert(shape.boundary_lengths[b]).second) continue;
                    // root face = boundary b of the cell; siblings seed new spheres
                    auto snap = snapshot();
                    int f0 = place_face(cell_inst, b, shape.boundary_lengths[b], -1);
                    cell_faces_[cell_inst].second.push_back(f0);
                    for (int b2 = 0; b2 < shape.arity(); ++b2) {
                        if (b2 == b) continue;
                        int f = place_face(cell_inst, b2, shape.boundary_lengths[b2], -1);
                        cell_faces_[cell_inst].second.push_back(f);
                    }
                    dfs(sink);
                    restore(snap);
                    cell_faces_[cell_inst].second.clear();
                }
                reset();
            }
        }
    }

private:
    const CellSet& cells_;
    int ell_, v_max_;
    Deadline& dl_;
    int v_base_ = 0, v_extra_ = 0;

    // side arrays
    std::vector<int> side_face_, side_next_, glued_;
    std::vector<int> face_component_; // component id per face (spheres)
    std::vector<int> face_cell_, face_boundary_; // owning cell instance / boundary index
    std::vector<int> face_first_side_, face_len_;
    std::vector<std::pair<int, std::vector<int>>> cell_faces_; // shape idx, face ids
    std::vector<int> mult_ = std::vector<int>(cells_.size(), 0);
    int next_component_ = 0;

    struct Snapshot {
        size_t sides, faces, cells;
        std::vector<int> mult;
        int v_extra, next_component;
    };
    Snapshot snapshot() const {
        return {side_face_.size(), face_len_.size(), cell_faces_.size(), mult_, v_extra_, next_component_};
    }
    void restore(const Snapshot& s) {
        side_face_.resize(s.sides);
        side_next_.resize(s.sides);
        glued_.resize(s.sides);
        face_component_.resize(s.faces);
        face_cell_.resize(s.faces);
        face_boundary_.resize(s.faces);
        face_first_side_.resize(s.faces);
        face_len_.resize(s.faces);
        cell_faces_.resize(s.cells);
        mult_ = s.mult;
        v_extra_ = s.v_extra;
        next_component_ = s.next_component;
    }
    void reset() {
        side_face_.clear();
        side_next_.clear();
        glued_.clear();
        face_component_.clear();
        face_cell_.clear();
        face_boundary_.clear();
        face_first_side_.clear();
        face_len_.clear();
        cell_faces_.clear();
        mult_.assign(cells_.size(), 0);
        v_extra_ = 0;
        next_component_ = 0;
    }

    // component < 0: start a fresh sphere
    int place_face(int cell_inst, int boundary_idx, int len, int into_component) {
        int f = int(face_len_.size());
        int comp = into_component >= 0 ? into_component : next_component_++;
        face_component_.push_back(comp);
        face_cell_.push_back(cell_inst);
        face_boundary_.push_back(boundary_idx);
        face_len_.push_back(len);
        int s0 = int(side_face_.size());
        face_first_side_.push_back(s0);
        for (int i = 0; i < len; ++i) {
            side_face_.push_back(f);
            side_next_.push_back(i + 1 < len ? s0 + i + 1 : s0);
            glued_.push_back(-1);
        }
        return f;
    }

    int first_free() const {
        for (size_t s = 0; s < glued_.size(); ++s)
            if (glued_[s] < 0) return int(s);
        return -1;
    }

    // free sides on the frontier cycle through s (excluding s), in walk order
    std::vector<int> frontier_cycle(int s) const {
        std::vector<int> out;
        int t = side_next_[s];
        while (true) {
            while (glued_[t] >= 0) t = side_next_[glued_[t]];
            if (t == s) break;
            out.push_back(t);
            t = side_next_[t];
        }
        return out;
    }

    template <typename Sink>
    void dfs(Sink&& sink) {
        dl_.poll();
        int s = first_free();
        if (s < 0) {
            emit(sink);
            return;
        }
        // (a) pair with a frontier side of the same cycle
        for (int y : frontier_cycle(s)) {
            glued_[s] = y;
            glued_[y] = s;
            dfs(sink);
            glued_[s] = glued_[y] = -1;
        }
        // (b) open a new cell here
        int comp = face_component_[side_face_[s]];
        for (size_t ci = 0; ci < cells_.size(); ++ci) {
            auto& shape = cells_.shapes[ci];
            if (v_base_ + v_extra_ + shape.vertex_increment() > v_max_) continue;
            std::set<int> seen_lens;
            for (int b = 0; b < shape.arity(); ++b) {
                if (!seen_lens.insert(shape.boundary_lengths[b]).second) continue;
                auto snap = snapshot();
                v_extra_ += shape.vertex_increment();
                mult_[ci]++;
                int cell_inst = int(cell_faces_.size());
                cell_faces_.push_back({int(ci), {}});
                int f0 = place_face(cell_inst, b, shape.boundary_lengths[b], comp);
                cell_faces_[cell_inst].second.push_back(f0);
                int s0 = face_first_side_[f0];
                glued_[s] = s0;
                glued_[s0] = s;
                for (int b2 = 0; b2 < shape.arity(); ++b2) {
                    if (b2 == b) continue;
                    int f = place_face(cell_inst, b2, shape.boundary_lengths[b2], -1);
                    cell_faces_[cell_inst].second.push_back(f);
                }
                dfs(sink);
                glued_[s] = -1;
                restore(snap);
            }
        }
    }

    template <typename Sink>
    void emit(Sink&& sink) {
        // assemble per-sphere rotation systems: sigma = contour_next after alpha
        int nsides = int(side_face_.size());
        std::vector<int> comp_of_side(nsides), local(nsides);
        int ncomp = next_component_ == 0 ? 1 : next_component_;
        std::vector<int> count(ncomp, 0);
        for (int s = 0; s < nsides; ++s) {
            comp_of_side[s] = face_component_[side_face_[s]];
            local[s] = count[comp_of_side[s]]++;
        }
        StuffedMap m;
        m.components.resize(ncomp);
        for (int c = 0; c < ncomp; ++c) {
            m.components[c].sigma.assign(count[c], 0);
            m.components[c].alpha.assign(count[c], 0);
        }
        for (int s = 0; s < nsides; ++s) {
            int c = comp_of_side[s];
            m.components[c].alpha[local[s]] = local[glued_[s]];
            m.components[c].sigma[local[glued_[s]]] = local[side_next_[s]];
        }
        for (auto& comp : m.components) comp.finalize();

        for (auto& [shape_idx, faces] : cell_faces_) {
            if (cells_.shapes[shape_idx].is_polygon()) continue;
            Branch b;
            for (int f : faces) {
                BranchAttachment a;
                a.component = face_component_[f];
                int h0 = face_first_side_[f];
                a.face = m.components[a.component].face_of[local[h0]];
                b.attachments.push_back(a);
            }
            m.branches.push_back(std::move(b));
        }
        m.root_component = 0;
        m.root_half_edge = local[0];
        m.boundary_rooted = (ell_ >= 0);
        sink(m, mult_, v_base_ + v_extra_);
    }
};

} // namespace detail

// counting identity used by the finiteness argument, asserted on every
// enumerated map: V - 2K + 1 - l/2 equals half the defect sum of its cells
inline void assert_counting_identity(const StuffedMap& m, const CellSet& s,
                                     const std::vector<int>& mult, int ell) {
    EulerData e = euler_genus(m);
    if (e.genus != 0) throw error("internal: non-planar map emitted");
    long long lhs = 2LL * (m.total_vertices() - 2 * e.K) + 2 - (ell >= 0 ? ell : 2);
    long long rhs = 0;
    for (size_t i = 0; i < s.size(); ++i)
        rhs += (long long)mult[i] * (s.shapes[i].total_length() - 2 * s.shapes[i].arity());
    // edge-rooted maps have no boundary face: account the root cell normally
    if (ell < 0) lhs = 2LL * (m.total_vertices() - 2 * e.K) + 4 - 2 * 2;
    if (lhs != rhs || rhs < 0) throw error("counting identity violated during enumeration");
}

namespace detail {

inline int branch_boundary_count(const CellSet& s, const std::vector<int>& mult) {
    int k = 0;
    for (size_t i = 0; i < s.size(); ++i)
        if (!s.shapes[i].is_polygon()) k += mult[i] * s.shapes[i].arity();
    return k;
}

template <typename Fn>
void for_each_spurious_choice(const StuffedMap& base, Fn&& fn) {
    // one corner per branch attachment face
    std::vector<std::pair<int, int>> slots; // (branch, attachment)
    for (size_t bi = 0; bi < base.branches.size(); ++bi)
        for (size_t ai = 0; ai < base.branches[bi].attachments.size(); ++ai)
            slots.emplace_back(int(bi), int(ai));
    std::vector<std::vector<int>> options;
    for (auto& [bi, ai] : slots) {
        auto& att = base.branches[bi].attachments[ai];
        const Component& c = base.components[att.component];
        std::vector<int> corners;
        for (int h = 0; h < c.size(); ++h)
            if (c.face_of[h] == att.face) corners.push_back(h);
        options.push_back(std::move(corners));
    }
    std::vector<size_t> pick(slots.size(), 0);
    while (true) {
        StuffedMap m = base;
        for (size_t i = 0; i < slots.size(); ++i)
            m.branches[slots[i].first].attachments[slots[i].second].spurious =
                options[i][pick[i]];
        fn(m);
        size_t i = 0;
        for (; i < slots.size(); ++i) {
            if (++pick[i] < options[i].size()) break;
            pick[i] = 0;
        }
        if (i == slots.size()) break;
    }
}

} // namespace detail

// All rooted maps over the cell set with boundary length ell (>= 0) or a
// rooted edge (ell = -1), at most v_max vertices. branch_marked selects the
// spurious-corner decorations. Counts are exact; undecorated multi-component
// tables carry automorphism weights 1/|Aut|.
inline EnumResult enumerate_stuffed(const CellSet& s, int ell, int v_max,
                                    bool branch_marked, long long budget_ms = 0) {
    detail::Deadline dl = detail::make_deadline(budget_ms);
    detail::GlueSearch search(s, ell, v_max, dl);
    std::map<std::string, std::pair<StuffedMap, std::pair<CountKey, Rational>>> seen;
    search.run([&](const StuffedMap& base, const std::vector<int>& mult, int v) {
        assert_counting_identity(base, s, mult, ell);
        if (v != base.total_vertices()) throw error("vertex-count formula mismatch");
        auto handle = [&](const StuffedMap& m) {
            std::string code = canonical_code(m);
            if (seen.count(code)) return;
            CountKey key;
            key.mult = mult;
            key.tpow = v + (branch_marked ? detail::branch_boundary_count(s, mult) : 0);
            Rational w = branch_marked ? Rational(1) : Rational(1) / Rational(automorphism_count(m));
            seen.emplace(std::move(code), std::make_pair(m, std::make_pair(key, w)));
        };
        if (branch_marked)
            detail::for_each_spurious_choice(base, handle);
        else
            handle(base);
    });

    EnumResult r;
    r.table.cells = s;
    r.table.ell = ell;
    r.table.branch_marked = branch_marked;
    // rows at t-power T only draw on maps with at most T vertices, so the
    // table is exact through v_max in both conventions
    r.table.complete_through = v_max;
    for (auto& [code, entry] : seen) {
        r.table.add(entry.second.first, entry.second.second);
        r.maps.push_back(entry.first);
    }
    // edge-rooted runs include the single-vertex trivial map
    if (ell < 0 && v_max >= 1) {
        StuffedMap triv;
        Component c;
        c.finalize();
        triv.components.push_back(c);
        r.table.add(CountKey{1, std::vector<int>(s.size(), 0)}, Rational(1));
        r.maps.insert(r.maps.begin(), triv);
    }
    return r;
}

inline EnumResult enumerate_ordinary(const CellSet& s, int ell, int v_max,
                                     long long budget_ms = 0) {
    for (auto& shape : s.shapes)
        if (!shape.is_polygon()) throw InvalidCellSpec("ordinary enumeration takes polygons only");
    return enumerate_stuffed(s, ell, v_max, false, budget_ms);
}

inline EnumResult enumerate_bms(const CellSet& s, int ell, int v_max, long long budget_ms = 0) {
    return enumerate_stuffed(s, ell, v_max, true, budget_ms);
}

// Pointed counts by explicit source placement: every vertex that carries no
// spurious corner. Entries drop one t-power (the source is unweighted).
inline EnumResult mark_points(const EnumResult& in) {
    EnumResult r;
    r.table.cells = in.table.cells;
    r.table.ell = in.table.ell;
    r.table.branch_marked = in.table.branch_marked;
    r.table.pointed = true;
    r.table.complete_through = in.table.complete_through - 1;
    std::map<std::string, std::pair<StuffedMap, std::pair<CountKey, Rational>>> seen;
    for (auto& m : in.maps) {
        if (!m.rooted()) continue; // trivial map: no pointed-rooted version
        std::vector<std::set<int>> spurious_vertices(m.components.size());
        for (auto& b : m.branches)
            for (auto& a : b.attachments)
                if (a.spurious >= 0)
                    spurious_vertices[a.component].insert(
                        m.components[a.component].vertex_of[a.spurious]);
        CountKey key;
        key.mult = m.cell_multiplicities(in.table.cells);
        key.tpow = m.total_vertices() - 1 +
                   (in.table.branch_marked
                        ? detail::branch_boundary_count(in.table.cells, key.mult)
                        : 0);
        for (size_t c = 0; c < m.components.size(); ++c)
            for (int v = 0; v < m.components[c].num_vertices; ++v) {
                if (spurious_vertices[c].count(v)) continue;
                StuffedMap p = m;
                p.source_component = int(c);
                p.source_vertex = v;
                std::string code = canonical_code(p);
                if (seen.count(code)) continue;
                Rational w = Rational(1) / Rational(automorphism_count(p));
                seen.emplace(std::move(code), std::make_pair(p, std::make_pair(key, w)));
            }
    }
    for (auto& [code, entry] : seen) {
        r.table.add(entry.second.first, entry.second.second);
        r.maps.push_back(entry.first);
    }
    return r;
}

// Undo the branch markings at the level of counts: divide by the product of
// boundary lengths per cell and drop the extra t-power per branch boundary.
// The result matches automorphism-weighted counts of unmarked maps.
inline CountTable rescale_bms_to_stuffed(const CountTable& tbl) {
    CountTable r;
    r.cells = tbl.cells;
    r.ell = tbl.ell;
    r.pointed = tbl.pointed;
    r.branch_marked = false;
    r.complete_through = tbl.complete_through;
    for (auto& [k, c] : tbl.entries) {
        Rational w = c;
        int shift = 0;
        for (size_t i = 0; i < tbl.cells.size(); ++i) {
            auto& shape = tbl.cells.shapes[i];
            if (shape.is_polygon()) continue;
            for (int n = 0; n < k.mult[i]; ++n) {
                w /= Rational(shape.boundary_length_product());
                shift += shape.arity();
            }
        }
        r.add(CountKey{k.tpow - shift, k.mult}, w);
    }
    return r;
}


// ---------------------------------------------------------------------------
// hypermobile enumeration

struct HypermobileEnumResult {
    CellSet cells;
    std::map<CountKey, Rational> counts; // tpow = whites + mobiles
    std::vector<Hypermobile> list;
};

namespace detail {

// Exhaustive search: hypertree outward from the origin mobile, plane mobiles
// by ordered-children generation, labels by constrained DFS. Rotation and
// sibling-order overcounts collapse under canonical-code dedup in the caller.
class HypermobileSearch {
public:
    HypermobileSearch(const CellSet& s, int size_max, Deadline& dl)
        : cells_(s), size_max_(size_max), dl_(dl) {
        for (auto& shape : cells_.shapes) {
            if (shape.is_polygon())
                poly_val_.insert(shape.boundary_lengths[0] / 2);
            else
                for (int l : shape.boundary_lengths) slot_val_.insert(l / 2);
        }
        std::set<int> all = poly_val_;
        all.insert(slot_val_.begin(), slot_val_.end());
        valencies_.assign(all.begin(), all.end());
        int qmax = valencies_.empty() ? 1 : valencies_.back();
        span_ = size_max_ * std::max(qmax, 1) + 2;
    }

    template <typename Sink>
    void run(Sink&& sink) {
        sink_ = sink;
        if (size_max_ >= 1) {
            Hypermobile t;
            Mobile m;
            m.nbr = {{}};
            m.color = {0};
            m.label = {0};
            t.mobiles.push_back(m);
            t.origin = 0;
            t.root_white = 0;
            sink_(t); // degenerate single-white object
        }
        for (int w = 1; w + 1 <= size_max_; ++w) {
            Mobile m;
            m.nbr.push_back({});
            m.color.push_back(0);
            m.label.push_back(0);
            std::vector<int> slots;
            gen_white_children(m, slots, 0, w - 1, (size_max_ - (w + 1)) / 2, [&](int wl) {
                if (wl != 0) return;
                if (m.nbr[0].empty()) return; // origin needs a root edge
                work_ = Hypermobile{};
                work_.mobiles.push_back(m);
                work_.origin = 0;
                work_.root_white = 0;
                work_.root_black = m.nbr[0][0];
                int spread = label_spread(m);
                assign_labels(0, {{0, 0}}, -spread, spread, [&]() {
                    std::vector<Slot> open;
                    for (int b : slots) open.push_back({0, b});
                    expand(open, size_max_ - (w + 1));
                });
            });
        }
    }

private:
    struct Slot {
        int mobile, black;
    };

    CellSet cells_;
    int size_max_;
    Deadline& dl_;
    std::set<int> poly_val_, slot_val_;
    std::vector<int> valencies_;
    int span_;
    std::function<void(const Hypermobile&)> sink_;
    Hypermobile work_;

    // append black subtrees to white v, one ordered child at a time; slot
    // blacks are capped by the remaining size budget (each must anchor a
    // hyperedge worth at least two size units)
    void gen_white_children(Mobile& m, std::vector<int>& slots, int v, int whites_left,
                            int max_slots, const std::function<void(int)>& cont) {
        dl_.poll();
        cont(whites_left);
        for (int q : valencies_) {
            if (q - 1 > whites_left) continue;
            for (int type = 0; type < 2; ++type) {
                if (type == 0 && !poly_val_.count(q)) continue;
                if (type == 1 && (!slot_val_.count(q) || int(slots.size()) >= max_slots)) continue;
                int b = m.size();
                m.nbr.push_back({v});
                m.color.push_back(1);
                m.label.push_back(0);
                m.nbr[v].push_back(b);
                if (type == 1) slots.push_back(b);
                gen_black_children(m, slots, b, q - 1, whites_left, max_slots, [&, v](int wl) {
                    gen_white_children(m, slots, v, wl, max_slots, cont);
                });
                if (type == 1) slots.pop_back();
                m.nbr[v].pop_back();
                m.nbr.pop_back();
                m.color.pop_back();
                m.label.pop_back();
            }
        }
    }

    // black b needs `need` more white children
    void gen_black_children(Mobile& m, std::vector<int>& slots, int b, int need, int whites_left,
                            int max_slots, const std::function<void(int)>& cont) {
        if (need == 0) {
            cont(whites_left);
            return;
        }
        if (whites_left == 0) return;
        int w = m.size();
        m.nbr.push_back({b});
        m.color.push_back(0);
        m.label.push_back(0);
        m.nbr[b].push_back(w);
        gen_white_children(m, slots, w, whites_left - 1, max_slots, [&, b, need](int wl) {
            gen_black_children(m, slots, b, need - 1, wl, max_slots, cont);
        });
        m.nbr[b].pop_back();
        m.nbr.pop_back();
        m.color.pop_back();
        m.label.pop_back();
    }

    // largest possible label spread on one mobile: one step per black crossing
    static int label_spread(const Mobile& m) {
        int s = 0;
        for (int v = 0; v < m.size(); ++v)
            if (m.color[v] == 1) s += int(m.nbr[v].size()) - 1;
        return s;
    }

    // label whites of work_.mobiles[mi]; pins are (vertex, label). The mobiles
    // vector may grow inside done(), so access strictly by index.
    void assign_labels(int mi, const std::vector<std::pair<int, int>>& pins, int lo, int hi,
                       const std::function<void()>& done) {
        const int n = work_.mobiles[mi].size();
        std::vector<int> whites;
        for (int v = 0; v < n; ++v)
            if (work_.mobiles[mi].color[v] == 0) whites.push_back(v);
        std::vector<int> pinned(n, INT32_MIN);
        for (auto& [v, l] : pins) pinned[v] = l;
        std::vector<char> assigned(n, 0);
        std::function<void(size_t)> rec = [&](size_t i) {
            dl_.poll();
            if (i == whites.size()) {
                done();
                return;
            }
            int v = whites[i];
            int a = pinned[v] != INT32_MIN ? pinned[v] : lo;
            int b = pinned[v] != INT32_MIN ? pinned[v] : hi;
            assigned[v] = 1;
            for (int l = a; l <= b; ++l) {
                Mobile& m = work_.mobiles[mi];
                m.label[v] = l;
                bool ok = true;
                for (int bb : m.nbr[v]) {
                    auto& ws = m.nbr[bb];
                    int q = int(ws.size());
                    for (int j = 0; j < q && ok; ++j) {
                        int cur = ws[(j + 1) % q], nxt = ws[j]; // reversed = clockwise
                        if (assigned[cur] && assigned[nxt] && m.label[nxt] < m.label[cur] - 1)
                            ok = false;
                    }
                    if (!ok) break;
                }
                if (ok) rec(i + 1);
            }
            assigned[v] = 0;
        };
        rec(0);
    }

    void expand(const std::vector<Slot>& open_in, int budget) {
        dl_.poll();
        if (open_in.empty()) {
            sink_(work_);
            return;
        }
        std::vector<Slot> open = open_in;
        Slot s = open.back();
        open.pop_back();
        int val = int(work_.mobiles[s.mobile].nbr[s.black].size());
        for (size_t ci = 0; ci < cells_.size(); ++ci) {
            auto& shape = cells_.shapes[ci];
            if (shape.is_polygon()) continue;
            bool has = false;
            for (int l : shape.boundary_lengths) has |= (l == 2 * val);
            if (!has) continue;
            std::vector<int> child_vals;
            bool removed = false;
            for (int l : shape.boundary_lengths) {
                if (!removed && l == 2 * val) {
                    removed = true;
                    continue;
                }
                child_vals.push_back(l / 2);
            }
            int nwhites = work_.mobiles[s.mobile].size();
            for (int g = 0; g < nwhites; ++g) {
                if (work_.mobiles[s.mobile].color[g] != 0) continue;
                size_t ei = work_.hyperedges.size();
                work_.hyperedges.push_back({GateRef{s.mobile, g, s.black}});
                make_children(ei, child_vals, 0, open, budget);
                work_.hyperedges.pop_back();
            }
        }
    }

    void make_children(size_t ei, const std::vector<int>& child_vals, size_t idx,
                       const std::vector<Slot>& open, int budget) {
        if (idx == child_vals.size()) {
            expand(open, budget);
            return;
        }
        int need_rest = 2 * int(child_vals.size() - idx - 1);
        int val = child_vals[idx];
        int pg = work_.mobiles[work_.hyperedges[ei][0].mobile].label[work_.hyperedges[ei][0].white];
        for (int w = 1; w + 1 + need_rest <= budget; ++w) {
            Mobile base;
            base.nbr.push_back({});
            base.color.push_back(0);
            base.label.push_back(0);
            std::vector<int> cslots;
            int max_child_slots = 1 + (budget - (w + 1) - need_rest) / 2;
            gen_white_children(base, cslots, 0, w - 1, max_child_slots, [&](int wl) {
                if (wl != 0) return;
                for (size_t k = 0; k < cslots.size(); ++k) {
                    if (int(base.nbr[cslots[k]].size()) != val) continue;
                    int mi2 = int(work_.mobiles.size());
                    work_.mobiles.push_back(base);
                    work_.hyperedges[ei].push_back(GateRef{mi2, 0, cslots[k]});
                    std::vector<Slot> open2 = open;
                    for (size_t k2 = 0; k2 < cslots.size(); ++k2)
                        if (k2 != k) open2.push_back({mi2, cslots[k2]});
                    int gl = pg + 1;
                    assign_labels(mi2, {{0, gl}}, gl, gl + label_spread(base), [&]() {
                        make_children(ei, child_vals, idx + 1, open2, budget - (w + 1));
                    });
                    work_.hyperedges[ei].pop_back();
                    work_.mobiles.pop_back();
                }
            });
        }
    }
};

} // namespace detail

inline HypermobileEnumResult enumerate_hypermobiles(const CellSet& s, int size_max,
                                                    long long budget_ms = 0) {
    detail::Deadline dl = detail::make_deadline(budget_ms);
    detail::HypermobileSearch search(s, size_max, dl);
    HypermobileEnumResult r;
    r.cells = s;
    std::map<std::string, Hypermobile> seen;
    search.run([&](const Hypermobile& h) {
        if (h.size_statistic() > size_max) return;
        if (!validate_hypermobile(h, s).ok()) return;
        std::string code = canonical_code(h);
        seen.emplace(std::move(code), h);
    });
    for (auto& [code, h] : seen) {
        CountKey k;
        k.tpow = h.size_statistic();
        k.mult.assign(s.size(), 0);
        for (size_t mi = 0; mi < h.mobiles.size(); ++mi) {
            auto& m = h.mobiles[mi];
            std::vector<char> in_edge(m.size(), 0);
            for (auto& e : h.hyperedges)
                for (auto& g : e)
                    if (g.mobile == int(mi)) in_edge[g.black] = 1;
            for (int v = 0; v < m.size(); ++v)
                if (m.color[v] == 1 && !in_edge[v]) {
                    int idx = s.polygon_index(2 * int(m.nbr[v].size()));
                    if (idx >= 0) k.mult[idx]++;
                }
        }
        for (auto& e : h.hyperedges) {
            std::vector<int> lens;
            for (auto& g : e) lens.push_back(2 * int(h.mobiles[g.mobile].nbr[g.black].size()));
            std::sort(lens.begin(), lens.end());
            for (size_t i = 0; i < s.size(); ++i)
                if (s.shapes[i].boundary_lengths == lens) {
                    k.mult[i]++;
                    break;
                }
        }
        auto it = r.counts.find(k);
        if (it == r.counts.end())
            r.counts.emplace(k, Rational(1));
        else
            it->second += Rational(1);
        r.list.push_back(h);
    }
    return r;
}

} // namespace smap
