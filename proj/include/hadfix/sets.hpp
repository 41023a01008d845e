#pragma once

#include <variant>
#include <vector>

#include "hadfix/spaces.hpp"

namespace hadfix {

namespace shape {

/// Closed geodesic ball in a Euclidean or hyperboloid space.
struct Ball {
    Point center;
    double radius;

    friend bool operator==(const Ball&, const Ball&) = default;
};

/// Geodesic segment [a, b]; a == b is allowed.
struct Segment {
    Point a;
    Point b;

    friend bool operator==(const Segment&, const Segment&) = default;
};

/// {x : <normal, x> <= offset} in Euclidean space, with |normal| = 1.
struct Halfspace {
    std::vector<double> normal;
    double offset;

    friend bool operator==(const Halfspace&, const Halfspace&) = default;
};

/// A closed leg of a spider together with the hub.
struct SpiderLeg {
    int leg;

    friend bool operator==(const SpiderLeg&, const SpiderLeg&) = default;
};

struct SpiderBall {
    Point center;
    double radius;

    friend bool operator==(const SpiderBall&, const SpiderBall&) = default;
};

}  // namespace shape

enum class ShapeKind { Ball, Segment, Halfspace, SpiderLeg, SpiderBall };

/// Closed geodesically convex subset with an exact metric projection.
class ConvexSet {
public:
    using Shape = std::variant<shape::Ball, shape::Segment, shape::Halfspace, shape::SpiderLeg, shape::SpiderBall>;

    /// Ball around `center`; yields a SpiderBall on spider spaces.
    static ConvexSet ball(Point center, double radius);
    static ConvexSet segment(Point a, Point b);
    /// Halfspace {<normal, x> <= offset}; the pair is rescaled so |normal| = 1.
    static ConvexSet halfspace(int dim, std::vector<double> normal, double offset);
    static ConvexSet spider_leg(int legs, int leg);

    const Space& space() const noexcept { return space_; }
    const Shape& shape() const noexcept { return shape_; }
    ShapeKind kind() const noexcept { return static_cast<ShapeKind>(shape_.index()); }

    /// Balls and segments are compact; halfspaces and spider legs are not.
    bool is_compact() const noexcept;

    friend bool operator==(const ConvexSet&, const ConvexSet&) = default;

private:
    ConvexSet(Space space, Shape shape) : space_(space), shape_(std::move(shape)) {}

    Space space_;
    Shape shape_;
};

const char* to_string(ShapeKind kind);

/// Nearest point of C to x.
Point project(const ConvexSet& set, const Point& x);

/// True iff d(x, P_C x) <= tol. Throws DomainError unless tol > 0.
bool contains(const ConvexSet& set, const Point& x, double tol);

/// Golden-section search for argmin_{t in [0,1]} of a unimodal function.
/// 200 iterations bring the bracket below 1e-12 on the unit interval.
template <typename F>
double golden_section_min(F&& f, int iterations = 200) {
    constexpr double inv_phi = 0.6180339887498949;
    double lo = 0.0, hi = 1.0;
    double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iterations && hi - lo > 1e-15; ++i) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    double best = 0.5 * (lo + hi), fbest = f(best);
    for (double t : {0.0, 1.0}) {
        const double ft = f(t);
        if (ft < fbest) best = t, fbest = ft;
    }
    return best;
}

/// Projection computed without the closed forms used by project(): 1-D
/// searches along geodesics and raw membership predicates. Serves as the
/// independent side of projection cross-checks.
Point numeric_project(const ConvexSet& set, const Point& x);

}  // namespace hadfix
