#pragma once

// Independent reference computations for the tests. They use textbook formulas
// in long double and brute-force search, never the library's own geometry.

#include <cmath>
#include <functional>
#include <vector>

#include "hadfix/spaces.hpp"

namespace oracle {

inline long double euclid(const std::vector<long double>& a, const std::vector<long double>& b) {
    long double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

inline std::vector<long double> widen(std::span<const double> v) { return {v.begin(), v.end()}; }

/// arcosh(-<p,q>_L), the textbook hyperboloid distance.
inline long double hyperbolic(std::span<const double> p, std::span<const double> q) {
    long double s = -static_cast<long double>(p[0]) * q[0];
    for (std::size_t i = 1; i < p.size(); ++i) s += static_cast<long double>(p[i]) * q[i];
    const long double c = std::max<long double>(1.0L, -s);
    return std::acosh(c);
}

/// R-tree metric: same leg (or hub) |r1 - r2|, different legs r1 + r2.
inline long double spider(int leg1, long double r1, int leg2, long double r2) {
    if (leg1 == 0 || leg2 == 0 || leg1 == leg2) return std::fabs(r1 - r2);
    return r1 + r2;
}

inline long double distance(const hadfix::Point& p, const hadfix::Point& q) {
    switch (p.space().kind()) {
        case hadfix::SpaceKind::Euclidean: return euclid(widen(p.coords()), widen(q.coords()));
        case hadfix::SpaceKind::Hyperboloid: return hyperbolic(p.coords(), q.coords());
        case hadfix::SpaceKind::Spider: return spider(p.leg(), p.radius(), q.leg(), q.radius());
    }
    return NAN;
}

/// Minimizer of a unimodal f on [0,1] by a dense scan followed by ternary refinement.
inline double argmin_unit(const std::function<long double(double)>& f, int grid = 2000) {
    int best = 0;
    long double best_v = f(0.0);
    for (int i = 1; i <= grid; ++i) {
        const long double v = f(static_cast<double>(i) / grid);
        if (v < best_v) best_v = v, best = i;
    }
    double lo = std::max(0.0, (best - 1.0) / grid), hi = std::min(1.0, (best + 1.0) / grid);
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        (f(m1) <= f(m2) ? hi : lo) = (f(m1) <= f(m2) ? m2 : m1);
    }
    return 0.5 * (lo + hi);
}

}  // namespace oracle
