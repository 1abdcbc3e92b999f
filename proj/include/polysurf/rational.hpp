#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

namespace polysurf {

/// Exact rational p/q on 64-bit integers. Always reduced, q >= 1.
/// Intermediate products go through 128-bit; overflow throws rather
/// than silently wrapping.
struct Rat {
    long long num = 0;
    long long den = 1;

    Rat() = default;
    Rat(long long n) : num(n), den(1) {}
    Rat(long long n, long long d) { assign(n, d); }

    static Rat of(long long n, long long d = 1) { return Rat(n, d); }

    void assign(long long n, long long d) {
        if (d == 0) throw std::domain_error("Rat: zero denominator");
        if (d < 0) { n = -n; d = -d; }
        long long g = std::gcd(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        num = n;
        den = d;
    }

    static long long checked(__int128 v) {
        if (v > INT64_MAX || v < INT64_MIN)
            throw std::overflow_error("Rat: 64-bit overflow");
        return static_cast<long long>(v);
    }

    static Rat reduce128(__int128 n, __int128 d) {
        if (d == 0) throw std::domain_error("Rat: zero denominator");
        if (d < 0) { n = -n; d = -d; }
        __int128 a = n < 0 ? -n : n, b = d;
        while (b) { __int128 t = a % b; a = b; b = t; }
        if (a > 1) { n /= a; d /= a; }
        Rat r;
        r.num = checked(n);
        r.den = checked(d);
        return r;
    }

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    bool is_zero() const { return num == 0; }
    bool is_integer() const { return den == 1; }

    Rat operator+(const Rat& o) const {
        return reduce128((__int128)num * o.den + (__int128)o.num * den, (__int128)den * o.den);
    }
    Rat operator-(const Rat& o) const {
        return reduce128((__int128)num * o.den - (__int128)o.num * den, (__int128)den * o.den);
    }
    Rat operator-() const { Rat r; r.num = -num; r.den = den; return r; }
    Rat operator*(const Rat& o) const {
        return reduce128((__int128)num * o.num, (__int128)den * o.den);
    }
    Rat operator/(const Rat& o) const {
        if (o.num == 0) throw std::domain_error("Rat: division by zero");
        return reduce128((__int128)num * o.den, (__int128)den * o.num);
    }

    bool operator==(const Rat& o) const { return num == o.num && den == o.den; }
    bool operator!=(const Rat& o) const { return !(*this == o); }
    bool operator<(const Rat& o) const {
        return (__int128)num * o.den < (__int128)o.num * den;
    }
    bool operator<=(const Rat& o) const { return *this < o || *this == o; }
    bool operator>(const Rat& o) const { return o < *this; }
    bool operator>=(const Rat& o) const { return o <= *this; }

    /// Euclidean remainder into [0, m) for m > 0.
    Rat mod(const Rat& m) const {
        __int128 n = (__int128)num * m.den;
        __int128 d = (__int128)den * m.den;
        __int128 mm = (__int128)m.num * den;
        __int128 r = n % mm;
        if (r < 0) r += mm;
        return reduce128(r, d);
    }

    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }

    /// Parse "p" or "p/q". Returns nullopt on malformed input.
    static std::optional<Rat> parse(const std::string& s) {
        if (s.empty()) return std::nullopt;
        std::size_t slash = s.find('/');
        try {
            std::size_t used = 0;
            if (slash == std::string::npos) {
                long long n = std::stoll(s, &used);
                if (used != s.size()) return std::nullopt;
                return Rat(n);
            }
            long long n = std::stoll(s.substr(0, slash), &used);
            if (used != slash) return std::nullopt;
            std::string ds = s.substr(slash + 1);
            long long d = std::stoll(ds, &used);
            if (used != ds.size() || d == 0) return std::nullopt;
            return Rat(n, d);
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
};

inline long long lcm_checked(long long a, long long b) {
    __int128 l = (__int128)(a / std::gcd(a, b)) * b;
    return Rat::checked(l);
}

}  // namespace polysurf
