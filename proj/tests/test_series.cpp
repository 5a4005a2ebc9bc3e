#include <doctest.h>

#include "stuffedmap/series.hpp"

#include <random>

using namespace smap;

namespace {

SymbolUniverse quad_universe() {
    SymbolUniverse u;
    u.names = {"t_4"};
    return u;
}

TSeries random_series(const SymbolUniverse& u, int order, std::mt19937& rng) {
    std::uniform_int_distribution<int> coeff(-4, 4), expo(0, 2);
    TSeries s(u, order);
    for (int k = 0; k <= order; ++k)
        for (int tries = 0; tries < 2; ++tries) {
            Monomial m(u.size(), 0);
            for (size_t i = 0; i < u.size(); ++i) m[i] = expo(rng);
            s.at(k).add_term(m, Rational(coeff(rng)));
        }
    return s;
}

} // namespace

TEST_CASE("rational arithmetic stays reduced and exact") {
    Rational a(2, 4), b(1, 3);
    CHECK(a.str() == "1/2");
    CHECK((a + b).str() == "5/6");
    CHECK((a * b).str() == "1/6");
    CHECK((a / b).str() == "3/2");
    CHECK((a - a).is_zero());
    CHECK(binomial_ll(6, 3) == 20);
    CHECK(binomial(5, -1).is_zero());
}

TEST_CASE("series product truncates exactly") {
    SymbolUniverse u = quad_universe();
    // (1+t)(1-t) = 1 - t^2 at N=2
    TSeries one_plus = TSeries::constant(u, 2, Rational(1)) + TSeries::t_power(u, 2, 1);
    TSeries one_minus = TSeries::constant(u, 2, Rational(1)) - TSeries::t_power(u, 2, 1);
    TSeries p = ts_mul(one_plus, one_minus);
    CHECK(p == TSeries::constant(u, 2, Rational(1)) - TSeries::t_power(u, 2, 2));

    // (t*t_4)^2 = t^2 t_4^2
    TSeries tw = TSeries::symbol(u, 4, "t_4", 1);
    TSeries sq = tw * tw;
    Monomial m{2};
    CHECK(sq.at(2).terms.at(m) == Rational(1));
}

TEST_CASE("ring axioms on random triples") {
    SymbolUniverse u = quad_universe();
    std::mt19937 rng(42);
    for (int i = 0; i < 50; ++i) {
        TSeries a = random_series(u, 5, rng), b = random_series(u, 5, rng),
                c = random_series(u, 5, rng);
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * b == b * a);
        CHECK(a * (b + c) == a * b + a * c);
    }
}

TEST_CASE("derivative: examples and Leibniz rule") {
    SymbolUniverse u = quad_universe();
    TSeries s = TSeries::symbol(u, 4, "t_4", 2); // t^2 t_4
    TSeries d = ts_derivative_t(s);
    CHECK(d == TSeries::symbol(u, 3, "t_4", 1) * Rational(2));
    CHECK(ts_derivative_t(TSeries::constant(u, 3, Rational(7))).is_zero());

    std::mt19937 rng(7);
    for (int i = 0; i < 20; ++i) {
        TSeries a = random_series(u, 6, rng), b = random_series(u, 6, rng);
        TSeries lhs = ts_derivative_t(a * b);
        TSeries rhs = ts_derivative_t(a) * b.truncated(5) + a.truncated(5) * ts_derivative_t(b);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("weight substitution composes in stages") {
    SymbolUniverse u;
    u.names = {"t_2", "t_4"};
    std::mt19937 rng(3);
    for (int i = 0; i < 20; ++i) {
        TSeries a = random_series(u, 5, rng);
        TSeries f = random_series(u, 5, rng), g = random_series(u, 5, rng);
        // one stage: both symbols at once (g does not mention t_2)
        TSeries g2 = g;
        for (int k = 0; k <= g2.order(); ++k) {
            MultiPoly filtered;
            for (auto& [m, c] : g2.at(k).terms)
                if (m[0] == 0) filtered.terms.emplace(m, c);
            g2.at(k) = filtered;
        }
        TSeries both = ts_substitute_weights(a, {{"t_2", f}, {"t_4", g2}});
        TSeries staged = ts_substitute_weights(ts_substitute_weights(a, {{"t_4", g2}}), {{"t_2", f}});
        CHECK(both == staged);
    }

    // substitute t_2 -> constant in (t + t_2 t): gives t + c t
    TSeries a = TSeries::t_power(u, 3, 1) + TSeries::symbol(u, 3, "t_2", 1);
    TSeries c = TSeries::constant(u, 3, Rational(5));
    TSeries r = ts_substitute_weights(a, {{"t_2", c}});
    CHECK(r == TSeries::t_power(u, 3, 1) * Rational(6));
}

TEST_CASE("unit square root: binomial expansion and involution") {
    SymbolUniverse u = quad_universe();
    // sqrt(1 - 12 t t_4) = 1 - 6 t t_4 - 18 t^2 t_4^2 + O(t^3)
    TSeries a = TSeries::constant(u, 3, Rational(1)) - TSeries::symbol(u, 3, "t_4", 1) * Rational(12);
    TSeries r = ts_sqrt_unit(a);
    Monomial m1{1}, m2{2};
    CHECK(r.at(1).terms.at(m1) == Rational(-6));
    CHECK(r.at(2).terms.at(m2) == Rational(-18));
    CHECK(ts_sqrt_unit(TSeries::constant(u, 5, Rational(1))) ==
          TSeries::constant(u, 5, Rational(1)));

    std::mt19937 rng(11);
    for (int i = 0; i < 10; ++i) {
        TSeries x = random_series(u, 5, rng);
        x.at(0) = MultiPoly::constant(Rational(1), u.size());
        TSeries s = ts_sqrt_unit(x);
        CHECK(s * s == x);
    }
    TSeries bad = TSeries::constant(u, 2, Rational(2));
    CHECK_THROWS_AS(ts_sqrt_unit(bad), NonUnitConstantTerm);
}

TEST_CASE("fixed point solver on x = t + 3 t_4 x^2") {
    SymbolUniverse u = quad_universe();
    const int N = 5;
    TSeries t = TSeries::t_power(u, N, 1);
    TSeries w3 = TSeries::symbol(u, N, "t_4") * Rational(3);
    TSeries x = fixed_point_solve(
        [&](const TSeries& cur) { return t + w3 * cur * cur; }, TSeries::zero(u, N), N);
    // expected coefficients 1, 3, 18, 135 in t_4^{n-1} (independent recurrence:
    // a_n = 3 * sum_{i+j=n} a_i a_j)
    std::vector<long long> a{0, 1};
    for (int n = 2; n <= N; ++n) {
        long long s = 0;
        for (int i = 1; i < n; ++i) s += a[i] * a[n - i];
        a.push_back(3 * s);
    }
    for (int n = 1; n <= N; ++n) {
        Monomial m{n - 1};
        CHECK(x.at(n).terms.at(m) == Rational(a[n]));
    }
    // identity RHS stabilizes immediately
    TSeries ident = fixed_point_solve([&](const TSeries&) { return t; }, TSeries::zero(u, N), N);
    CHECK(ident == t);
    // non-contraction is rejected
    CHECK_THROWS_AS(fixed_point_solve(
                        [&](const TSeries& cur) { return cur + TSeries::constant(u, N, Rational(1)); },
                        TSeries::zero(u, N), N),
                    NoStabilization);
    // solver output satisfies its defining equation
    CHECK((x - (t + w3 * x * x)).is_zero());
}
