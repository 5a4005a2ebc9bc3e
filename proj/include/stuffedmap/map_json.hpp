#pragma once

#include "stuffedmap/hypermobile.hpp"

#include <json.hpp>

#include <string>

namespace smap {

struct InvalidInput : error {
    explicit InvalidInput(const std::string& w) : error("invalid input: " + w) {}
};

// schema "stuffed-map/v1"
inline nlohmann::json to_json(const StuffedMap& m) {
    nlohmann::json comps = nlohmann::json::array();
    for (auto& c : m.components)
        comps.push_back({{"half_edges", c.size()}, {"sigma", c.sigma}, {"alpha", c.alpha}});
    nlohmann::json branches = nlohmann::json::array();
    for (auto& b : m.branches) {
        nlohmann::json atts = nlohmann::json::array();
        for (auto& a : b.attachments) {
            nlohmann::json att = {{"component", a.component}, {"face", a.face}};
            if (a.spurious >= 0) att["spurious_half_edge"] = a.spurious;
            atts.push_back(att);
        }
        branches.push_back(atts);
    }
    nlohmann::json j = {{"schema", "stuffed-map/v1"}, {"components", comps}, {"branches", branches}};
    if (m.rooted()) {
        j["root"] = {{"component", m.root_component}, {"half_edge", m.root_half_edge}};
        j["boundary_rooted"] = m.boundary_rooted;
    }
    if (m.pointed())
        j["source"] = {{"component", m.source_component}, {"vertex", m.source_vertex}};
    return j;
}

inline StuffedMap stuffed_map_from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("schema", "") != "stuffed-map/v1")
        throw InvalidInput("expected schema stuffed-map/v1");
    StuffedMap m;
    try {
        for (auto& jc : j.at("components")) {
            Component c;
            c.sigma = jc.at("sigma").get<std::vector<int>>();
            c.alpha = jc.at("alpha").get<std::vector<int>>();
            if (int(c.sigma.size()) != jc.at("half_edges").get<int>())
                throw InvalidInput("half_edges disagrees with sigma length");
            c.finalize();
            m.components.push_back(std::move(c));
        }
        for (auto& jb : j.at("branches")) {
            Branch b;
            for (auto& ja : jb) {
                BranchAttachment a;
                a.component = ja.at("component").get<int>();
                a.face = ja.at("face").get<int>();
                a.spurious = ja.value("spurious_half_edge", -1);
                b.attachments.push_back(a);
            }
            m.branches.push_back(std::move(b));
        }
        if (j.contains("root")) {
            m.root_component = j["root"].at("component").get<int>();
            m.root_half_edge = j["root"].at("half_edge").get<int>();
            m.boundary_rooted = j.value("boundary_rooted", false);
        }
        if (j.contains("source")) {
            m.source_component = j["source"].at("component").get<int>();
            m.source_vertex = j["source"].at("vertex").get<int>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(e.what());
    } catch (const error& e) {
        throw InvalidInput(e.what());
    }
    return m;
}

// schema "hypermobile/v1": plane trees as parent arrays in depth-first order;
// the children of any vertex appear in increasing index order, which is their
// rotation order
namespace detail {

// preorder numbering of a plane tree rooted at vertex 0; children of each
// vertex follow its rotation starting after the parent edge
inline std::vector<int> mobile_preorder(const Mobile& mo) {
    int n = mo.size();
    std::vector<int> newid(n, -1);
    std::vector<std::pair<int, int>> st{{0, -1}};
    int k = 0;
    while (!st.empty()) {
        auto [v, par] = st.back();
        st.pop_back();
        newid[v] = k++;
        auto& a = mo.nbr[v];
        int deg = int(a.size());
        int start = deg - 1; // no parent: children in stored order
        if (par >= 0)
            for (int i = 0; i < deg; ++i)
                if (a[i] == par) start = i;
        std::vector<int> kids;
        for (int i = 1; i <= deg; ++i) {
            int w = a[(start + i) % deg];
            if (w != par) kids.push_back(w);
        }
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) st.push_back({*it, v});
    }
    return newid;
}

} // namespace detail

inline nlohmann::json to_json(const Hypermobile& h) {
    nlohmann::json mobiles = nlohmann::json::array();
    std::vector<std::vector<int>> ids;
    for (auto& mo : h.mobiles) {
        int n = mo.size();
        std::vector<int> newid = detail::mobile_preorder(mo);
        ids.push_back(newid);
        std::vector<int> order(n);
        for (int v = 0; v < n; ++v) order[newid[v]] = v;
        std::vector<int> parents(n, -1), colors(n), labels(n);
        for (int v = 0; v < n; ++v) {
            colors[newid[v]] = mo.color[v];
            labels[newid[v]] = mo.color[v] == 0 ? mo.label[v] : 0;
        }
        // parent of each vertex: the unique neighbour with smaller preorder id
        for (int v = 0; v < n; ++v)
            for (int w : mo.nbr[v])
                if (newid[w] < newid[v]) parents[newid[v]] = newid[w];
        nlohmann::json jm;
        jm["parent"] = parents;
        jm["color"] = colors;
        jm["label"] = labels;
        mobiles.push_back(jm);
    }
    auto reindexed = [&](int mi, int v) { return ids[mi][v]; };
    nlohmann::json edges = nlohmann::json::array();
    for (auto& e : h.hyperedges) {
        nlohmann::json je = nlohmann::json::array();
        for (auto& g : e)
            je.push_back({{"mobile", g.mobile},
                          {"white", reindexed(g.mobile, g.white)},
                          {"black", reindexed(g.mobile, g.black)}});
        edges.push_back(je);
    }
    nlohmann::json j = {{"schema", "hypermobile/v1"},
                        {"mobiles", mobiles},
                        {"hyperedges", edges},
                        {"origin", h.origin},
                        {"root", {{"white", h.root_white >= 0 ? reindexed(h.origin, h.root_white) : -1},
                                  {"black", h.root_black >= 0 ? reindexed(h.origin, h.root_black) : -1},
                                  {"sign", h.root_sign}}}};
    return j;
}

inline Hypermobile hypermobile_from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("schema", "") != "hypermobile/v1")
        throw InvalidInput("expected schema hypermobile/v1");
    Hypermobile h;
    try {
        for (auto& jm : j.at("mobiles")) {
            Mobile mo;
            auto parents = jm.at("parent").get<std::vector<int>>();
            mo.color = jm.at("color").get<std::vector<int>>();
            mo.label = jm.at("label").get<std::vector<int>>();
            int n = int(parents.size());
            if (int(mo.color.size()) != n || int(mo.label.size()) != n)
                throw InvalidInput("mobile arrays disagree in length");
            mo.nbr.assign(n, {});
            // children in increasing index order; the parent precedes them in
            // each rotation
            for (int v = 1; v < n; ++v) {
                int p = parents[v];
                if (p < 0 || p >= n) throw InvalidInput("bad parent pointer");
                mo.nbr[v].push_back(p);
            }
            for (int v = 1; v < n; ++v) mo.nbr[parents[v]].push_back(v);
            h.mobiles.push_back(std::move(mo));
        }
        for (auto& je : j.at("hyperedges")) {
            std::vector<GateRef> e;
            for (auto& jg : je)
                e.push_back(GateRef{jg.at("mobile").get<int>(), jg.at("white").get<int>(),
                                    jg.at("black").get<int>()});
            h.hyperedges.push_back(std::move(e));
        }
        h.origin = j.at("origin").get<int>();
        h.root_white = j.at("root").at("white").get<int>();
        h.root_black = j.at("root").at("black").get<int>();
        h.root_sign = j.at("root").value("sign", 1);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(e.what());
    }
    return h;
}

// series serialization: {order, coeffs: [[{monomial, num, den}, ...], ...]}
inline nlohmann::json to_json(const TSeries& s) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (int k = 0; k <= s.order(); ++k) {
        nlohmann::json terms = nlohmann::json::array();
        for (auto& [m, c] : s.at(k).terms) {
            nlohmann::json mono = nlohmann::json::object();
            for (size_t i = 0; i < m.size(); ++i)
                if (m[i] > 0) mono[s.universe().names[i]] = m[i];
            terms.push_back({{"monomial", mono},
                             {"num", detail::to_string_i128(c.num())},
                             {"den", detail::to_string_i128(c.den())}});
        }
        coeffs.push_back(terms);
    }
    return {{"order", s.order()}, {"symbols", s.universe().names}, {"coeffs", coeffs}};
}

// a keyed family of series, used for whole moment vectors
inline nlohmann::json to_json(const std::map<int, TSeries>& family, const TSeries& gamma2) {
    nlohmann::json disks = nlohmann::json::object();
    for (auto& [len, s] : family) disks[std::to_string(len)] = to_json(s);
    return {{"gamma2", to_json(gamma2)}, {"disks", disks}};
}

inline std::string series_csv(const TSeries& s) {
    std::string out = "t_power,monomial,num,den\n";
    for (int k = 0; k <= s.order(); ++k)
        for (auto& [m, c] : s.at(k).terms) {
            std::string mono;
            for (size_t i = 0; i < m.size(); ++i) {
                if (m[i] == 0) continue;
                if (!mono.empty()) mono += "*";
                mono += s.universe().names[i];
                if (m[i] > 1) mono += "^" + std::to_string(m[i]);
            }
            if (mono.empty()) mono = "1";
            out += std::to_string(k) + "," + mono + "," + detail::to_string_i128(c.num()) + "," +
                   detail::to_string_i128(c.den()) + "\n";
        }
    return out;
}

} // namespace smap
