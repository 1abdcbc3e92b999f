#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "polysurf/rational.hpp"

namespace polysurf {

/// sin/cos of pi*t with exact values at quarter-integer t.
inline void sincospi(double t, double& s, double& c) {
    t = std::fmod(t, 2.0);
    if (t < 0) t += 2.0;
    int quad = static_cast<int>(std::floor(t / 0.5 + 0.5));  // nearest multiple of 1/2
    double r = t - 0.5 * quad;                               // in [-1/4, 1/4]
    double sr = std::sin(M_PI * r), cr = std::cos(M_PI * r);
    switch (quad & 3) {
        case 0: s = sr; c = cr; break;
        case 1: s = cr; c = -sr; break;
        case 2: s = -sr; c = -cr; break;
        default: s = -cr; c = sr; break;
    }
}

/// An angle, either an exact rational multiple of pi or a raw radian value.
/// Exactness is sticky under negation and integer scaling, and under
/// addition when both operands are exact; any mix with an inexact angle
/// degrades to radians.
class Angle {
public:
    Angle() : exact_(true), frac_() {}

    static Angle pi(Rat r) {
        Angle a;
        a.exact_ = true;
        a.frac_ = r;
        return a;
    }
    static Angle pi(long long num, long long den) { return pi(Rat(num, den)); }
    static Angle rad(double r) {
        Angle a;
        a.exact_ = false;
        a.rad_ = r;
        return a;
    }

    bool exact() const { return exact_; }
    /// Fraction in units of pi; only valid when exact().
    Rat pi_frac() const { return frac_; }
    double radians() const { return exact_ ? M_PI * frac_.to_double() : rad_; }

    Angle operator+(const Angle& o) const {
        if (exact_ && o.exact_) return pi(frac_ + o.frac_);
        return rad(radians() + o.radians());
    }
    Angle operator-(const Angle& o) const {
        if (exact_ && o.exact_) return pi(frac_ - o.frac_);
        return rad(radians() - o.radians());
    }
    Angle operator-() const {
        if (exact_) return pi(-frac_);
        return rad(-rad_);
    }
    Angle times(long long k) const {
        if (exact_) return pi(frac_ * Rat(k));
        return rad(rad_ * static_cast<double>(k));
    }
    Angle half() const {
        if (exact_) return pi(frac_ / Rat(2));
        return rad(rad_ / 2.0);
    }

    /// Normalize into [0, 2*pi).
    Angle norm2() const {
        if (exact_) return pi(frac_.mod(Rat(2)));
        double r = std::fmod(radians(), 2.0 * M_PI);
        if (r < 0) r += 2.0 * M_PI;
        return rad(r);
    }
    /// Normalize into [0, pi).
    Angle norm1() const {
        if (exact_) return pi(frac_.mod(Rat(1)));
        double r = std::fmod(radians(), M_PI);
        if (r < 0) r += M_PI;
        return rad(r);
    }

    double sin() const {
        if (exact_) {
            double s, c;
            sincospi(frac_.to_double(), s, c);
            return s;
        }
        return std::sin(rad_);
    }
    double cos() const {
        if (exact_) {
            double s, c;
            sincospi(frac_.to_double(), s, c);
            return c;
        }
        return std::cos(rad_);
    }

    /// Exact equality mod 2*pi when both exact; tolerance compare otherwise.
    bool same_mod2(const Angle& o, double tol = 1e-12) const {
        if (exact_ && o.exact_) return frac_.mod(Rat(2)) == o.frac_.mod(Rat(2));
        double d = std::fmod(radians() - o.radians(), 2.0 * M_PI);
        if (d < 0) d += 2.0 * M_PI;
        return d < tol || 2.0 * M_PI - d < tol;
    }

    bool is_zero_mod2(double tol = 1e-12) const { return same_mod2(Angle(), tol); }

    std::string str() const {
        if (exact_) return frac_.str() + "pi";
        return std::to_string(rad_) + "rad";
    }

private:
    bool exact_;
    Rat frac_;        // valid when exact_
    double rad_ = 0;  // valid when !exact_
};

}  // namespace polysurf
