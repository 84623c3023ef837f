#pragma once

#include <stdexcept>

namespace fracdhk {

/// Compact domain [a,b] every operator acts on. Both endpoints finite, a < b.
struct Interval {
    double a;
    double b;

    Interval(double a_, double b_) : a(a_), b(b_) {
        if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
            throw std::invalid_argument("Interval: require finite a < b");
    }

    double length() const { return b - a; }
    bool contains(double x) const { return x >= a && x <= b; }
    double clamp(double x) const { return x < a ? a : (x > b ? b : x); }

    friend bool operator==(const Interval& l, const Interval& r) {
        return l.a == r.a && l.b == r.b;
    }
};

} // namespace fracdhk
