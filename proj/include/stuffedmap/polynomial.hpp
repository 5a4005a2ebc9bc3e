#pragma once

#include "stuffedmap/rational.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <vector>

namespace smap {

struct SymbolUniverseMismatch : error {
    SymbolUniverseMismatch() : error("operands declare different weight-symbol universes") {}
};

// Ordered list of weight-symbol names (cell weights; the series variable t is
// handled by TSeries, never stored here).
struct SymbolUniverse {
    std::vector<std::string> names;

    int index_of(const std::string& name) const {
        for (size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return int(i);
        return -1;
    }
    size_t size() const { return names.size(); }
    bool operator==(const SymbolUniverse& o) const { return names == o.names; }
};

// Exponent vector over a SymbolUniverse.
using Monomial = std::vector<int>;

// Sparse multivariate polynomial with exact rational coefficients.
// Invariant: no zero coefficients stored; all monomials sized to the universe.
class MultiPoly {
public:
    std::map<Monomial, Rational> terms;

    static MultiPoly constant(const Rational& c, size_t nsyms) {
        MultiPoly p;
        if (!c.is_zero()) p.terms.emplace(Monomial(nsyms, 0), c);
        return p;
    }
    static MultiPoly symbol(int idx, size_t nsyms) {
        MultiPoly p;
        Monomial m(nsyms, 0);
        m[idx] = 1;
        p.terms.emplace(std::move(m), Rational(1));
        return p;
    }

    bool is_zero() const { return terms.empty(); }

    Rational constant_part() const {
        for (auto& [m, c] : terms)
            if (std::all_of(m.begin(), m.end(), [](int e) { return e == 0; })) return c;
        return Rational(0);
    }

    void add_term(const Monomial& m, const Rational& c) {
        if (c.is_zero()) return;
        auto it = terms.find(m);
        if (it == terms.end()) {
            terms.emplace(m, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms.erase(it);
        }
    }

    friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
        MultiPoly r = a;
        for (auto& [m, c] : b.terms) r.add_term(m, c);
        return r;
    }
    friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) {
        MultiPoly r = a;
        for (auto& [m, c] : b.terms) r.add_term(m, -c);
        return r;
    }
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
        MultiPoly r;
        for (auto& [ma, ca] : a.terms)
            for (auto& [mb, cb] : b.terms) {
                Monomial m = ma;
                for (size_t i = 0; i < m.size(); ++i) m[i] += mb[i];
                r.add_term(m, ca * cb);
            }
        return r;
    }
    MultiPoly operator*(const Rational& c) const {
        MultiPoly r;
        if (c.is_zero()) return r;
        for (auto& [m, k] : terms) r.terms.emplace(m, k * c);
        return r;
    }
    friend bool operator==(const MultiPoly& a, const MultiPoly& b) { return a.terms == b.terms; }
    friend bool operator!=(const MultiPoly& a, const MultiPoly& b) { return !(a == b); }

    // Exact division by a single symbol; throws if any term lacks it.
    MultiPoly divided_by_symbol(int idx) const {
        MultiPoly r;
        for (auto& [m, c] : terms) {
            if (m[idx] == 0) throw error("polynomial not divisible by requested symbol");
            Monomial q = m;
            q[idx] -= 1;
            r.terms.emplace(std::move(q), c);
        }
        return r;
    }

    // Substitute exact rational values for a subset of symbols (others stay).
    MultiPoly eval_partial(const std::vector<std::pair<int, Rational>>& vals) const {
        MultiPoly r;
        for (auto& [m, c] : terms) {
            Rational k = c;
            Monomial q = m;
            for (auto& [idx, v] : vals) {
                for (int e = 0; e < m[idx]; ++e) k *= v;
                q[idx] = 0;
            }
            r.add_term(q, k);
        }
        return r;
    }

    double eval_double(const std::vector<double>& vals) const {
        double s = 0;
        for (auto& [m, c] : terms) {
            double t = c.to_double();
            for (size_t i = 0; i < m.size(); ++i)
                for (int e = 0; e < m[i]; ++e) t *= vals[i];
            s += t;
        }
        return s;
    }

    std::string str(const SymbolUniverse& u) const {
        if (terms.empty()) return "0";
        std::string s;
        bool first = true;
        for (auto& [m, c] : terms) {
            if (!first) s += " + ";
            first = false;
            s += c.str();
            for (size_t i = 0; i < m.size(); ++i) {
                if (m[i] == 0) continue;
                s += "*" + u.names[i];
                if (m[i] > 1) s += "^" + std::to_string(m[i]);
            }
        }
        return s;
    }
};

} // namespace smap
