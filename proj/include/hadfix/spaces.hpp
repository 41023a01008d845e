#pragma once

#include <span>
#include <string>
#include <vector>

#include "hadfix/errors.hpp"

namespace hadfix {

/// Library-wide geometric tolerance used for invariant enforcement. Distinct
/// from the user-facing convergence tolerances in IterationConfig.
inline constexpr double kGeoTol = 1e-9;

enum class SpaceKind { Euclidean, Hyperboloid, Spider };

/// Which Hadamard model space a computation lives in.
///
///  - Euclidean(dim):   flat R^dim.
///  - Hyperboloid(dim): the upper sheet of <x,x>_L = -1 in R^{dim+1}, with the
///                      Lorentz form <x,y>_L = -x0*y0 + sum_i xi*yi (curvature -1).
///  - Spider(legs):     `legs` closed half-lines glued at a common hub; an R-tree.
class Space {
public:
    static Space euclidean(int dim);
    static Space hyperboloid(int dim);
    static Space spider(int legs);

    SpaceKind kind() const noexcept { return kind_; }
    /// Manifold dimension (Euclidean, Hyperboloid). Throws DomainError for Spider.
    int dim() const;
    /// Leg count (Spider). Throws DomainError otherwise.
    int legs() const;
    /// Length of the flat coordinate list a Point serializes to.
    std::size_t coord_count() const noexcept;

    std::string name() const;

    friend bool operator==(const Space&, const Space&) = default;

private:
    Space(SpaceKind kind, int param) : kind_(kind), param_(param) {}

    SpaceKind kind_;
    int param_;
};

/// An element of a model space. Immutable value.
///
/// Hyperboloid points are renormalized on construction by recomputing the
/// time coordinate from the spatial part, so |<x,x>_L + 1| stays at rounding
/// level. Spider points with radius 0 are canonicalized to leg 0 (the hub).
class Point {
public:
    static Point euclidean(std::vector<double> coords);
    /// Ambient coordinates (x0, x1..xn); rejects points off the sheet.
    static Point hyperboloid(std::vector<double> ambient);
    /// Lifts spatial coordinates (x1..xn) onto the sheet.
    static Point hyperboloid_from_spatial(std::span<const double> spatial);
    /// Spider point on `leg` (1-based) at distance `radius` from the hub.
    static Point spider(int legs, int leg, double radius);
    /// Euclidean zero, hyperboloid apex (1,0,...,0), or the spider hub.
    static Point origin(const Space& space);

    const Space& space() const noexcept { return space_; }

    /// Euclidean coordinates or hyperboloid ambient coordinates.
    std::span<const double> coords() const;
    int leg() const;
    double radius() const;

    /// Flat serialization: coords for Euclidean/Hyperboloid, (leg, radius) for Spider.
    std::vector<double> flat() const;

    friend bool operator==(const Point&, const Point&) = default;

private:
    Point(Space space, std::vector<double> coords, int leg) : space_(space), coords_(std::move(coords)), leg_(leg) {}

    Space space_;
    std::vector<double> coords_;  // spider: {radius}
    int leg_ = 0;
};

/// Initial velocity of the geodesic from `base` to a target.
///
/// Spider tangents are a signed scalar along the base's leg (positive is
/// outward) plus the leg the geodesic continues into after passing the hub.
struct TangentVector {
    Point base;
    std::vector<double> components;
    int toward_leg = 0;
};

/// Lorentz form on ambient hyperboloid coordinates.
double lorentz_inner(std::span<const double> x, std::span<const double> y);

void require_same_space(const Space& a, const Space& b, const char* where);

double distance(const Point& p, const Point& q);

/// The point (1-t) p (+) t q on the geodesic from p to q.
Point geodesic_point(const Point& p, const Point& q, double t);

TangentVector log_map(const Point& base, const Point& target);
/// Follows the geodesic with initial velocity `scale * v` for unit time.
Point exp_map(const TangentVector& v, double scale = 1.0);
double norm(const TangentVector& v);

/// Deviation of a hyperboloid point from the sheet, |<x,x>_L + 1|.
double sheet_defect(const Point& p);

}  // namespace hadfix
