#pragma once

#include <variant>

#include "hadfix/sets.hpp"

namespace hadfix {

namespace form {

/// (weight/2) d(x, anchor)^2
struct SqDistance {
    Point anchor;
    double weight = 1.0;

    friend bool operator==(const SqDistance&, const SqDistance&) = default;
};

/// d(x, anchor)
struct Distance {
    Point anchor;

    friend bool operator==(const Distance&, const Distance&) = default;
};

/// 0 on the set, +inf off it.
struct Indicator {
    ConvexSet set;

    friend bool operator==(const Indicator&, const Indicator&) = default;
};

/// (1/2) dist(x, set)^2
struct SqDistanceToSet {
    ConvexSet set;

    friend bool operator==(const SqDistanceToSet&, const SqDistanceToSet&) = default;
};

}  // namespace form

enum class FormKind { SqDistance, Distance, Indicator, SqDistanceToSet };

/// Proper lower semicontinuous convex function on a model space.
class ConvexFunction {
public:
    using Form = std::variant<form::SqDistance, form::Distance, form::Indicator, form::SqDistanceToSet>;

    static ConvexFunction sq_distance(Point anchor, double weight = 1.0);
    static ConvexFunction distance(Point anchor);
    static ConvexFunction indicator(ConvexSet set);
    static ConvexFunction sq_distance_to_set(ConvexSet set);

    const Space& space() const noexcept { return space_; }
    const Form& form() const noexcept { return form_; }
    FormKind kind() const noexcept { return static_cast<FormKind>(form_.index()); }

    friend bool operator==(const ConvexFunction&, const ConvexFunction&) = default;

private:
    ConvexFunction(Space space, Form form) : space_(space), form_(std::move(form)) {}

    Space space_;
    Form form_;
};

const char* to_string(FormKind kind);

/// Proximal step size; always strictly positive.
class Lambda {
public:
    explicit Lambda(double value);
    double value() const noexcept { return value_; }
    friend bool operator==(const Lambda&, const Lambda&) = default;

private:
    double value_;
};

/// f(x); +inf for an indicator evaluated off its set (membership at kGeoTol).
double evaluate(const ConvexFunction& f, const Point& x);

/// f(y) + d(x, y)^2 / (2 lambda).
double prox_objective(const ConvexFunction& f, const Lambda& lambda, const Point& x, const Point& y);

/// Closed-form resolvent argmin_y { f(y) + d(x,y)^2 / (2 lambda) }.
///
/// Every shipped form has its minimizer on a geodesic leaving x:
///   SqDistance       -> gamma_{x,anchor}(w lambda / (1 + w lambda))
///   Distance         -> step of length min(lambda, d(x, anchor)) toward the anchor
///   Indicator(C)     -> P_C x
///   SqDistanceToSet  -> gamma_{x, P_C x}(lambda / (1 + lambda))
Point resolvent(const ConvexFunction& f, const Lambda& lambda, const Point& x);

enum class ProxSearch {
    /// Golden-section search of the prox objective along the geodesic from x
    /// toward the anchor (or the numerically projected set point).
    Geodesic,
    /// Finite-difference gradient descent through exp/log maps. Euclidean and
    /// hyperboloid spaces only; finite-valued forms only.
    Descent,
};

struct NumericProxOptions {
    double tol = 1e-12;
    int max_iter = 10000;
    ProxSearch search = ProxSearch::Geodesic;
};

/// Resolvent computed by numerical minimization, independent of the closed
/// forms in resolvent(). Throws NoConvergence when the descent search cannot
/// reach `tol` within `max_iter` iterations.
Point numeric_prox(const ConvexFunction& f, const Lambda& lambda, const Point& x, const NumericProxOptions& opts = {});

/// Distance from x to argmin f (the anchor for anchor forms, the set otherwise).
double distance_to_argmin(const ConvexFunction& f, const Point& x);

}  // namespace hadfix
