#pragma once

#include "stuffedmap/series.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

namespace smap {

struct InvalidCellSpec : error {
    explicit InvalidCellSpec(const std::string& what) : error("invalid cell spec: " + what) {}
};

// One 2-cell: a multiset of even boundary lengths. One boundary = polygon,
// several = a cell whose interior is a branch.
struct CellShape {
    std::vector<int> boundary_lengths; // sorted ascending

    explicit CellShape(std::vector<int> lens) : boundary_lengths(std::move(lens)) {
        std::sort(boundary_lengths.begin(), boundary_lengths.end());
        int sum = 0;
        for (int l : boundary_lengths) {
            if (l < 2 || l % 2 != 0) throw InvalidCellSpec("boundary lengths must be even and >= 2");
            sum += l;
        }
        if (boundary_lengths.empty()) throw InvalidCellSpec("cell needs at least one boundary");
        if (sum < 4) throw InvalidCellSpec("total boundary length must be >= 4");
    }

    int arity() const { return int(boundary_lengths.size()); }
    bool is_polygon() const { return arity() == 1; }
    int total_length() const {
        int s = 0;
        for (int l : boundary_lengths) s += l;
        return s;
    }
    // vertices a copy of this cell adds to a map (with its fresh components for branches)
    int vertex_increment() const {
        return is_polygon() ? boundary_lengths[0] / 2 - 1 : arity() - 2 + total_length() / 2;
    }
    long long boundary_length_product() const {
        long long p = 1;
        for (int l : boundary_lengths) p *= l;
        return p;
    }
    std::string default_weight_name() const {
        std::string s = "t";
        for (int l : boundary_lengths) s += "_" + std::to_string(l);
        return s;
    }
    bool operator==(const CellShape& o) const { return boundary_lengths == o.boundary_lengths; }
    bool operator<(const CellShape& o) const { return boundary_lengths < o.boundary_lengths; }
};

// Black-vertex valencies and hyperedge arity induced by a cell (the S' view):
// a boundary of length 2l contributes a black vertex of valency l; a cell with
// k > 1 boundaries contributes a hyperedge of arity k.
struct CellPrimeView {
    std::vector<int> black_valencies;
    int hyperedge_arity = 0; // 0 for polygons
};

struct CellSet {
    std::vector<CellShape> shapes;
    std::vector<std::string> weight_names; // parallel to shapes

    CellSet() = default;
    explicit CellSet(std::vector<CellShape> ss) : shapes(std::move(ss)) {
        finish();
    }
    CellSet(std::vector<CellShape> ss, std::vector<std::string> names)
        : shapes(std::move(ss)), weight_names(std::move(names)) {
        if (weight_names.size() != shapes.size())
            throw InvalidCellSpec("one weight name per cell required");
        finish();
    }

    size_t size() const { return shapes.size(); }

    SymbolUniverse universe() const {
        SymbolUniverse u;
        u.names = weight_names;
        return u;
    }

    CellPrimeView prime_view(size_t i) const {
        CellPrimeView v;
        for (int l : shapes[i].boundary_lengths) v.black_valencies.push_back(l / 2);
        v.hyperedge_arity = shapes[i].is_polygon() ? 0 : shapes[i].arity();
        return v;
    }

    // polygon weight lookup by boundary length; -1 if absent
    int polygon_index(int length) const {
        for (size_t i = 0; i < shapes.size(); ++i)
            if (shapes[i].is_polygon() && shapes[i].boundary_lengths[0] == length) return int(i);
        return -1;
    }
    int max_polygon_length() const {
        int d = 0;
        for (auto& s : shapes)
            if (s.is_polygon()) d = std::max(d, s.boundary_lengths[0]);
        return d;
    }
    int max_boundary_length() const {
        int d = 0;
        for (auto& s : shapes) d = std::max(d, *std::max_element(s.boundary_lengths.begin(), s.boundary_lengths.end()));
        return d;
    }
    int max_arity() const {
        int k = 0;
        for (auto& s : shapes) k = std::max(k, s.arity());
        return k;
    }
    bool has_branches() const { return max_arity() > 1; }

    static CellSet parse_json(const nlohmann::json& j) {
        if (!j.is_object() || !j.contains("cells") || !j["cells"].is_array())
            throw InvalidCellSpec("top level must be an object with a \"cells\" array");
        std::vector<CellShape> shapes;
        std::vector<std::string> names;
        for (auto& jc : j["cells"]) {
            if (!jc.is_object() || !jc.contains("boundaries") || !jc["boundaries"].is_array())
                throw InvalidCellSpec("each cell needs a \"boundaries\" array");
            std::vector<int> lens;
            for (auto& b : jc["boundaries"]) {
                if (!b.is_number_integer()) throw InvalidCellSpec("boundary lengths must be integers");
                lens.push_back(b.get<int>());
            }
            shapes.emplace_back(std::move(lens));
            names.push_back(jc.contains("weight") ? jc["weight"].get<std::string>()
                                                  : shapes.back().default_weight_name());
        }
        return CellSet(std::move(shapes), std::move(names));
    }

    nlohmann::json to_json() const {
        nlohmann::json cells = nlohmann::json::array();
        for (size_t i = 0; i < shapes.size(); ++i)
            cells.push_back({{"boundaries", shapes[i].boundary_lengths}, {"weight", weight_names[i]}});
        return {{"cells", cells}};
    }

private:
    void finish() {
        if (weight_names.empty())
            for (auto& s : shapes) weight_names.push_back(s.default_weight_name());
        std::set<CellShape> seen;
        for (auto& s : shapes)
            if (!seen.insert(s).second) throw InvalidCellSpec("duplicate cell shape");
        std::set<std::string> nm(weight_names.begin(), weight_names.end());
        if (nm.size() != weight_names.size()) throw InvalidCellSpec("duplicate weight name");
        if (nm.count("t")) throw InvalidCellSpec("\"t\" is reserved for the vertex weight");
    }
};

inline CellSet quadrangle_cells() { return CellSet({CellShape({4})}); }
inline CellSet bridged_quadrangulation_cells() {
    return CellSet({CellShape({2, 2}), CellShape({4})});
}

} // namespace smap
