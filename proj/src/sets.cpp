#include "hadfix/sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "detail.hpp"

namespace hadfix {

namespace {

using detail::overloaded;

Point project_to_ball(const Point& center, double radius, const Point& x) {
    // Points within rounding of the sphere count as members, so P_C is exactly idempotent.
    const double d = distance(center, x);
    if (d <= radius * (1.0 + 8.0 * std::numeric_limits<double>::epsilon())) return x;
    return geodesic_point(center, x, radius / d);
}

Point project_to_segment(const shape::Segment& s, const Point& x) {
    const Point& a = s.a;
    const Point& b = s.b;
    if (a == b) return a;
    switch (a.space().kind()) {
        case SpaceKind::Euclidean: {
            const auto pa = a.coords(), pb = b.coords(), px = x.coords();
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < pa.size(); ++i) {
                num += (px[i] - pa[i]) * (pb[i] - pa[i]);
                den += (pb[i] - pa[i]) * (pb[i] - pa[i]);
            }
            return geodesic_point(a, b, std::clamp(num / den, 0.0, 1.0));
        }
        case SpaceKind::Hyperboloid: {
            // Along gamma(s) = cosh(s) a + sinh(s) u the quantity -<x, gamma(s)>_L
            // is stationary where tanh(s) = -<x,u>_L / <x,a>_L.
            const double len = distance(a, b);
            if (len == 0.0) return a;
            TangentVector u = log_map(a, b);
            for (double& c : u.components) c /= len;
            const double xa = lorentz_inner(x.coords(), a.coords());
            const double xu = lorentz_inner(x.coords(), u.components);
            const double ratio = -xu / xa;
            if (ratio <= 0.0) return a;
            if (ratio >= std::tanh(len)) return b;
            return geodesic_point(a, b, std::atanh(ratio) / len);
        }
        case SpaceKind::Spider: {
            // In an R-tree the foot of x on [a,b] sits at Gromov-product distance from a.
            const double ab = distance(a, b);
            if (ab == 0.0) return a;
            const double foot = 0.5 * (distance(a, x) + ab - distance(b, x));
            return geodesic_point(a, b, std::clamp(foot / ab, 0.0, 1.0));
        }
    }
    throw DomainError("unknown space");
}

// Smallest t in [0,1] with inside(t), assuming inside(1) and monotone membership.
template <typename Pred>
double first_inside(Pred&& inside) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (inside(mid) ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace

ConvexSet ConvexSet::ball(Point center, double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("ball radius must be finite and > 0");
    const Space space = center.space();
    if (space.kind() == SpaceKind::Spider) return {space, shape::SpiderBall{std::move(center), radius}};
    return {space, shape::Ball{std::move(center), radius}};
}

ConvexSet ConvexSet::segment(Point a, Point b) {
    require_same_space(a.space(), b.space(), "segment endpoints");
    const Space space = a.space();
    return {space, shape::Segment{std::move(a), std::move(b)}};
}

ConvexSet ConvexSet::halfspace(int dim, std::vector<double> normal, double offset) {
    const Space space = Space::euclidean(dim);
    if (normal.size() != static_cast<std::size_t>(dim)) throw DomainError("halfspace normal has wrong dimension");
    const double n = std::sqrt(std::inner_product(normal.begin(), normal.end(), normal.begin(), 0.0));
    if (!(n > 0.0) || !std::isfinite(n) || !std::isfinite(offset))
        throw DomainError("halfspace needs a finite nonzero normal and finite offset");
    // Already-unit normals are kept bit-for-bit so encode/decode round-trips.
    if (std::abs(n - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon()) return {space, shape::Halfspace{std::move(normal), offset}};
    for (double& c : normal) c /= n;
    return {space, shape::Halfspace{std::move(normal), offset / n}};
}

ConvexSet ConvexSet::spider_leg(int legs, int leg) {
    const Space space = Space::spider(legs);
    if (leg < 1 || leg > legs) throw DomainError("spider leg index out of range");
    return {space, shape::SpiderLeg{leg}};
}

bool ConvexSet::is_compact() const noexcept {
    const ShapeKind k = kind();
    return k == ShapeKind::Ball || k == ShapeKind::Segment || k == ShapeKind::SpiderBall;
}

const char* to_string(ShapeKind kind) {
    switch (kind) {
        case ShapeKind::Ball: return "ball";
        case ShapeKind::Segment: return "segment";
        case ShapeKind::Halfspace: return "halfspace";
        case ShapeKind::SpiderLeg: return "spider_leg";
        case ShapeKind::SpiderBall: return "spider_ball";
    }
    return "?";
}

Point project(const ConvexSet& set, const Point& x) {
    require_same_space(set.space(), x.space(), "project");
    return std::visit(
        overloaded{
            [&](const shape::Ball& b) { return project_to_ball(b.center, b.radius, x); },
            [&](const shape::SpiderBall& b) { return project_to_ball(b.center, b.radius, x); },
            [&](const shape::Segment& s) { return project_to_segment(s, x); },
            [&](const shape::Halfspace& h) {
                const auto px = x.coords();
                const double excess =
                    std::inner_product(px.begin(), px.end(), h.normal.begin(), 0.0) - h.offset;
                if (excess <= 0.0) return x;
                std::vector<double> out(px.begin(), px.end());
                for (std::size_t i = 0; i < out.size(); ++i) out[i] -= excess * h.normal[i];
                return Point::euclidean(std::move(out));
            },
            [&](const shape::SpiderLeg& l) {
                if (x.leg() == 0 || x.leg() == l.leg) return x;
                return Point::origin(x.space());
            },
        },
        set.shape());
}

bool contains(const ConvexSet& set, const Point& x, double tol) {
    if (!(tol > 0.0)) throw DomainError("contains: tol must be > 0");
    return distance(x, project(set, x)) <= tol;
}

Point numeric_project(const ConvexSet& set, const Point& x) {
    require_same_space(set.space(), x.space(), "numeric_project");
    auto ball = [&](const Point& c, double r) {
        if (distance(c, x) <= r) return x;
        const double t = first_inside([&](double s) { return distance(c, geodesic_point(x, c, s)) <= r; });
        return geodesic_point(x, c, t);
    };
    return std::visit(
        overloaded{
            [&](const shape::Ball& b) { return ball(b.center, b.radius); },
            [&](const shape::SpiderBall& b) { return ball(b.center, b.radius); },
            [&](const shape::Segment& s) {
                const double t =
                    golden_section_min([&](double u) { return distance(x, geodesic_point(s.a, s.b, u)); });
                return geodesic_point(s.a, s.b, t);
            },
            [&](const shape::Halfspace& h) {
                const auto px = x.coords();
                auto shifted = [&](double s) {
                    std::vector<double> out(px.begin(), px.end());
                    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= s * h.normal[i];
                    return out;
                };
                auto inside = [&](const std::vector<double>& y) {
                    return std::inner_product(y.begin(), y.end(), h.normal.begin(), 0.0) <= h.offset;
                };
                if (inside(shifted(0.0))) return x;
                double reach = 1.0;
                while (!inside(shifted(reach))) reach *= 2.0;
                const double t = first_inside([&](double s) { return inside(shifted(s * reach)); });
                return Point::euclidean(shifted(t * reach));
            },
            [&](const shape::SpiderLeg& l) {
                const int legs = x.space().legs();
                const double reach = x.radius() + 1.0;
                const double t = golden_section_min(
                    [&](double u) { return distance(x, Point::spider(legs, l.leg, u * reach)); });
                return Point::spider(legs, l.leg, t * reach);
            },
        },
        set.shape());
}

}  // namespace hadfix
