#pragma once

#include "stuffedmap/polynomial.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace smap {

struct NonUnitConstantTerm : error {
    NonUnitConstantTerm() : error("series square root needs constant term 1") {}
};
struct NoStabilization : error {
    NoStabilization() : error("fixed-point iteration did not stabilize; equation is not a t-adic contraction") {}
};

// Truncated formal power series in the vertex weight t, coefficients exact
// multivariate polynomials over a shared SymbolUniverse. All arithmetic is
// exact through the declared order and never silently extends it.
class TSeries {
public:
    TSeries() = default;
    TSeries(SymbolUniverse u, int order)
        : universe_(std::move(u)), coeffs_(size_t(order) + 1) {}

    static TSeries zero(const SymbolUniverse& u, int order) { return TSeries(u, order); }
    static TSeries t_power(const SymbolUniverse& u, int order, int k, Rational c = Rational(1)) {
        TSeries s(u, order);
        if (k <= order) s.coeffs_[k] = MultiPoly::constant(c, u.size());
        return s;
    }
    static TSeries constant(const SymbolUniverse& u, int order, const Rational& c) {
        return t_power(u, order, 0, c);
    }
    // c * sym * t^k
    static TSeries symbol(const SymbolUniverse& u, int order, const std::string& name, int k = 0) {
        int idx = u.index_of(name);
        if (idx < 0) throw SymbolUniverseMismatch{};
        TSeries s(u, order);
        if (k <= order) s.coeffs_[k] = MultiPoly::symbol(idx, u.size());
        return s;
    }

    int order() const { return int(coeffs_.size()) - 1; }
    const SymbolUniverse& universe() const { return universe_; }
    const MultiPoly& at(int k) const { return coeffs_[k]; }
    MultiPoly& at(int k) { return coeffs_[k]; }

    bool is_zero() const {
        for (auto& c : coeffs_)
            if (!c.is_zero()) return false;
        return true;
    }

    TSeries truncated(int new_order) const {
        TSeries r(universe_, new_order);
        for (int k = 0; k <= std::min(order(), new_order); ++k) r.coeffs_[k] = coeffs_[k];
        return r;
    }

    friend TSeries operator+(const TSeries& a, const TSeries& b) {
        a.check_universe(b);
        TSeries r(a.universe_, std::min(a.order(), b.order()));
        for (int k = 0; k <= r.order(); ++k) r.coeffs_[k] = a.coeffs_[k] + b.coeffs_[k];
        return r;
    }
    friend TSeries operator-(const TSeries& a, const TSeries& b) {
        a.check_universe(b);
        TSeries r(a.universe_, std::min(a.order(), b.order()));
        for (int k = 0; k <= r.order(); ++k) r.coeffs_[k] = a.coeffs_[k] - b.coeffs_[k];
        return r;
    }
    friend TSeries operator*(const TSeries& a, const TSeries& b) {
        a.check_universe(b);
        TSeries r(a.universe_, std::min(a.order(), b.order()));
        for (int i = 0; i <= a.order(); ++i) {
            if (a.coeffs_[i].is_zero()) continue;
            for (int j = 0; i + j <= r.order() && j <= b.order(); ++j) {
                if (b.coeffs_[j].is_zero()) continue;
                r.coeffs_[i + j] = r.coeffs_[i + j] + a.coeffs_[i] * b.coeffs_[j];
            }
        }
        return r;
    }
    TSeries operator*(const Rational& c) const {
        TSeries r(universe_, order());
        for (int k = 0; k <= order(); ++k) r.coeffs_[k] = coeffs_[k] * c;
        return r;
    }
    friend bool operator==(const TSeries& a, const TSeries& b) {
        return a.universe_ == b.universe_ && a.coeffs_ == b.coeffs_;
    }
    friend bool operator!=(const TSeries& a, const TSeries& b) { return !(a == b); }

    TSeries pow(int e) const {
        TSeries r = constant(universe_, order(), Rational(1));
        for (int i = 0; i < e; ++i) r = r * *this;
        return r;
    }

    std::string str() const {
        std::string s;
        for (int k = 0; k <= order(); ++k) {
            if (coeffs_[k].is_zero()) continue;
            if (!s.empty()) s += " + ";
            s += "(" + coeffs_[k].str(universe_) + ")*t^" + std::to_string(k);
        }
        return s.empty() ? "0" : s;
    }

    void check_universe(const TSeries& o) const {
        if (!(universe_ == o.universe_)) throw SymbolUniverseMismatch{};
    }

private:
    SymbolUniverse universe_;
    std::vector<MultiPoly> coeffs_;
};

inline TSeries ts_mul(const TSeries& a, const TSeries& b) { return a * b; }

// coefficient of t^n in result = (n+1) * coefficient of t^{n+1}; order drops by one
inline TSeries ts_derivative_t(const TSeries& a) {
    if (a.order() < 1) throw error("derivative needs order >= 1");
    TSeries r(a.universe(), a.order() - 1);
    for (int k = 0; k <= r.order(); ++k) r.at(k) = a.at(k + 1) * Rational(k + 1);
    return r;
}

// Replace weight symbols by whole series; result stays truncated at a's order.
inline TSeries ts_substitute_weights(const TSeries& a,
                                     const std::map<std::string, TSeries>& subst) {
    const SymbolUniverse& u = a.universe();
    const int N = a.order();
    std::vector<const TSeries*> repl(u.size(), nullptr);
    for (auto& [name, s] : subst) {
        int idx = u.index_of(name);
        if (idx < 0) throw SymbolUniverseMismatch{};
        s.check_universe(a);
        repl[idx] = &s;
    }
    TSeries r = TSeries::zero(u, N);
    for (int k = 0; k <= N; ++k) {
        for (auto& [m, c] : a.at(k).terms) {
            TSeries term = TSeries::t_power(u, N, k, c);
            Monomial residual(u.size(), 0);
            for (size_t i = 0; i < m.size(); ++i) {
                if (m[i] == 0) continue;
                if (repl[i]) {
                    for (int e = 0; e < m[i]; ++e) term = term * *repl[i];
                } else {
                    residual[i] = m[i];
                }
            }
            if (std::any_of(residual.begin(), residual.end(), [](int e) { return e != 0; })) {
                MultiPoly mono;
                mono.terms.emplace(residual, Rational(1));
                TSeries ms(u, N);
                ms.at(0) = mono;
                term = term * ms;
            }
            r = r + term;
        }
    }
    return r;
}

// Multiplicative inverse of a series with constant term 1 (in t and weights).
inline TSeries ts_inverse_unit(const TSeries& a) {
    const int N = a.order();
    const SymbolUniverse& u = a.universe();
    if (a.at(0) != MultiPoly::constant(Rational(1), u.size())) throw NonUnitConstantTerm{};
    TSeries b(u, N);
    b.at(0) = MultiPoly::constant(Rational(1), u.size());
    for (int n = 1; n <= N; ++n) {
        MultiPoly s;
        for (int i = 1; i <= n; ++i) s = s + a.at(i) * b.at(n - i);
        b.at(n) = MultiPoly::constant(Rational(0), u.size()) - s;
    }
    return b;
}

inline TSeries ts_div_unit(const TSeries& a, const TSeries& b) { return a * ts_inverse_unit(b); }

// Square root of a series with constant term 1: b0 = 1, b_n = (a_n - sum b_i b_{n-i})/2.
inline TSeries ts_sqrt_unit(const TSeries& a) {
    const int N = a.order();
    const SymbolUniverse& u = a.universe();
    if (a.at(0) != MultiPoly::constant(Rational(1), u.size())) throw NonUnitConstantTerm{};
    TSeries b(u, N);
    b.at(0) = MultiPoly::constant(Rational(1), u.size());
    for (int n = 1; n <= N; ++n) {
        MultiPoly s;
        for (int i = 1; i < n; ++i) s = s + b.at(i) * b.at(n - i);
        b.at(n) = (a.at(n) - s) * Rational(1, 2);
    }
    return b;
}

// Exact division by symbol applied per t-coefficient.
inline TSeries ts_divided_by_symbol(const TSeries& a, const std::string& name) {
    int idx = a.universe().index_of(name);
    if (idx < 0) throw SymbolUniverseMismatch{};
    TSeries r(a.universe(), a.order());
    for (int k = 0; k <= a.order(); ++k)
        if (!a.at(k).is_zero()) r.at(k) = a.at(k).divided_by_symbol(idx);
    return r;
}

// Substitute exact rational values for some weight symbols.
inline TSeries ts_eval_weights(const TSeries& a,
                               const std::vector<std::pair<std::string, Rational>>& vals) {
    std::vector<std::pair<int, Rational>> idx_vals;
    for (auto& [name, v] : vals) {
        int idx = a.universe().index_of(name);
        if (idx < 0) throw SymbolUniverseMismatch{};
        idx_vals.emplace_back(idx, v);
    }
    TSeries r(a.universe(), a.order());
    for (int k = 0; k <= a.order(); ++k) r.at(k) = a.at(k).eval_partial(idx_vals);
    return r;
}

// Evaluate at numeric t and weights (for the handful of float-tolerance checks).
inline double ts_eval_double(const TSeries& a, double t, const std::vector<double>& weights) {
    double s = 0, tp = 1;
    for (int k = 0; k <= a.order(); ++k) {
        s += a.at(k).eval_double(weights) * tp;
        tp *= t;
    }
    return s;
}

// Solve x = F(x) coefficientwise in the t-adic metric. F must be a
// contraction: t^n of F(x) may depend only on t^{<n} of x beyond the seed.
inline std::vector<TSeries>
fixed_point_solve(const std::function<std::vector<TSeries>(const std::vector<TSeries>&)>& F,
                  std::vector<TSeries> seed, int order) {
    std::vector<TSeries> x = std::move(seed);
    for (auto& s : x) s = s.truncated(order);
    for (int it = 0; it <= order + 1; ++it) {
        std::vector<TSeries> next = F(x);
        for (auto& s : next) s = s.truncated(order);
        if (next == x) return x;
        x = std::move(next);
    }
    throw NoStabilization{};
}

inline TSeries fixed_point_solve(const std::function<TSeries(const TSeries&)>& F,
                                 const TSeries& seed, int order) {
    auto vec = fixed_point_solve(
        [&](const std::vector<TSeries>& v) { return std::vector<TSeries>{F(v[0])}; },
        {seed}, order);
    return vec[0];
}

} // namespace smap
