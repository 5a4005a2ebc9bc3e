#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace smap {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ArithmeticOverflow : error {
    ArithmeticOverflow() : error("exact integer overflow (raise truncation/size limits gradually)") {}
};

namespace detail {

using i128 = __int128;

inline i128 checked_add(i128 a, i128 b) {
    i128 r;
    if (__builtin_add_overflow(a, b, &r)) throw ArithmeticOverflow{};
    return r;
}

inline i128 checked_mul(i128 a, i128 b) {
    i128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw ArithmeticOverflow{};
    return r;
}

inline i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline std::string to_string_i128(i128 v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    // -2^127 negation would overflow, but reduced rationals never reach it.
    unsigned __int128 u = neg ? (unsigned __int128)(-(v + 1)) + 1 : (unsigned __int128)v;
    std::string s;
    while (u > 0) {
        s.push_back(char('0' + int(u % 10)));
        u /= 10;
    }
    if (neg) s.push_back('-');
    return {s.rbegin(), s.rend()};
}

} // namespace detail

// Exact rational on 128-bit integers, always reduced, denominator > 0.
// Overflow throws instead of wrapping; sized for desk-scale series work.
class Rational {
public:
    using int_t = detail::i128;

    Rational() = default;
    Rational(long long n) : num_(n) {}
    Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }
    static Rational from_parts(int_t n, int_t d) {
        Rational r;
        r.num_ = n;
        r.den_ = d;
        r.normalize();
        return r;
    }

    int_t num() const { return num_; }
    int_t den() const { return den_; }
    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }

    long long num_ll() const {
        if (num_ > INT64_MAX || num_ < INT64_MIN) throw ArithmeticOverflow{};
        return (long long)num_;
    }
    long long den_ll() const {
        if (den_ > INT64_MAX) throw ArithmeticOverflow{};
        return (long long)den_;
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        using namespace detail;
        return from_parts(checked_add(checked_mul(a.num_, b.den_), checked_mul(b.num_, a.den_)),
                          checked_mul(a.den_, b.den_));
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator-(const Rational& a) {
        Rational r = a;
        r.num_ = -r.num_;
        return r;
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        using namespace detail;
        // cross-reduce first so intermediates stay small
        i128 g1 = gcd128(a.num_, b.den_), g2 = gcd128(b.num_, a.den_);
        i128 n = checked_mul(g1 ? a.num_ / g1 : a.num_, g2 ? b.num_ / g2 : b.num_);
        i128 d = checked_mul(g2 ? a.den_ / g2 : a.den_, g1 ? b.den_ / g1 : b.den_);
        return from_parts(n, d);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw error("rational division by zero");
        return a * Rational::from_parts(b.den_, b.num_);
    }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return detail::checked_mul(a.num_, b.den_) < detail::checked_mul(b.num_, a.den_);
    }

    double to_double() const { return double(num_) / double(den_); }

    std::string str() const {
        std::string s = detail::to_string_i128(num_);
        if (den_ != 1) s += "/" + detail::to_string_i128(den_);
        return s;
    }

private:
    int_t num_ = 0;
    int_t den_ = 1;

    void normalize() {
        if (den_ == 0) throw error("rational with zero denominator");
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        if (num_ == 0) {
            den_ = 1;
            return;
        }
        detail::i128 g = detail::gcd128(num_, den_);
        num_ /= g;
        den_ /= g;
    }
};

inline Rational binomial(int n, int k) {
    if (k < 0 || k > n || n < 0) return Rational(0);
    Rational r(1);
    for (int i = 0; i < k; ++i) r = r * Rational(n - i) / Rational(i + 1);
    return r;
}

inline long long binomial_ll(int n, int k) { return binomial(n, k).num_ll(); }

} // namespace smap
