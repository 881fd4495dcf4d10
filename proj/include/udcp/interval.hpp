#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include "udcp/errors.hpp"

namespace udcp {

// Minimal interval arithmetic with outward rounding, just enough for the
// certified inequality sweep. Every operation computes in round-to-nearest
// and then widens each endpoint by one ulp, which encloses the true result
// for IEEE-correctly-rounded +,-,*,sqrt.
struct Interval {
    double lo, hi;

    static Interval exact(double v) { return {v, v}; }
    // For constants only known to 1/2 ulp (e.g. ln 2 as a double literal).
    static Interval around(double v) { return {down(v), up(v)}; }

    static double up(double v) { return std::nextafter(v, std::numeric_limits<double>::infinity()); }
    static double down(double v) { return std::nextafter(v, -std::numeric_limits<double>::infinity()); }

    bool contains(double v) const { return lo <= v && v <= hi; }
    double width() const { return hi - lo; }

    Interval operator-() const { return {-hi, -lo}; }

    friend Interval operator+(Interval a, Interval b) { return {down(a.lo + b.lo), up(a.hi + b.hi)}; }
    friend Interval operator-(Interval a, Interval b) { return {down(a.lo - b.hi), up(a.hi - b.lo)}; }

    friend Interval operator*(Interval a, Interval b) {
        double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
        double mn = std::fmin(std::fmin(p1, p2), std::fmin(p3, p4));
        double mx = std::fmax(std::fmax(p1, p2), std::fmax(p3, p4));
        return {down(mn), up(mx)};
    }

    friend Interval operator+(double a, Interval b) { return exact(a) + b; }
    friend Interval operator-(double a, Interval b) { return exact(a) - b; }
    friend Interval operator*(double a, Interval b) { return exact(a) * b; }
};

// Requires x.lo >= 0; sqrt is correctly rounded, so one ulp outward is a
// rigorous enclosure.
inline Interval interval_sqrt(Interval x) {
    if (x.lo < 0) throw ValidationError("interval_sqrt of possibly-negative interval");
    return {Interval::down(std::sqrt(x.lo)), Interval::up(std::sqrt(x.hi))};
}

inline Interval interval_ln2() { return Interval::around(std::numbers::ln2); }

}  // namespace udcp
