#include "hadfix/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hadfix {

namespace {

// Accepts user-supplied ambient coordinates a little off the sheet; they are
// lifted back onto it from their spatial part.
constexpr double kSheetLoadTol = 1e-8;

double sq_norm(std::span<const double> v) {
    return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
}

}  // namespace

Space Space::euclidean(int dim) {
    if (dim < 1) throw DomainError("euclidean space needs dim >= 1");
    return {SpaceKind::Euclidean, dim};
}

Space Space::hyperboloid(int dim) {
    if (dim < 1) throw DomainError("hyperboloid space needs dim >= 1");
    return {SpaceKind::Hyperboloid, dim};
}

Space Space::spider(int legs) {
    if (legs < 3) throw DomainError("spider space needs legs >= 3");
    return {SpaceKind::Spider, legs};
}

int Space::dim() const {
    if (kind_ == SpaceKind::Spider) throw DomainError("spider space has no dim");
    return param_;
}

int Space::legs() const {
    if (kind_ != SpaceKind::Spider) throw DomainError(name() + " has no legs");
    return param_;
}

std::size_t Space::coord_count() const noexcept {
    switch (kind_) {
        case SpaceKind::Euclidean: return static_cast<std::size_t>(param_);
        case SpaceKind::Hyperboloid: return static_cast<std::size_t>(param_) + 1;
        case SpaceKind::Spider: return 2;
    }
    return 0;
}

std::string Space::name() const {
    switch (kind_) {
        case SpaceKind::Euclidean: return "euclidean(" + std::to_string(param_) + ")";
        case SpaceKind::Hyperboloid: return "hyperboloid(" + std::to_string(param_) + ")";
        case SpaceKind::Spider: return "spider(" + std::to_string(param_) + ")";
    }
    return "?";
}

Point Point::euclidean(std::vector<double> coords) {
    const auto dim = static_cast<int>(coords.size());
    for (double c : coords)
        if (!std::isfinite(c)) throw DomainError("non-finite euclidean coordinate");
    return {Space::euclidean(dim), std::move(coords), 0};
}

Point Point::hyperboloid(std::vector<double> ambient) {
    if (ambient.size() < 2) throw DomainError("hyperboloid point needs at least 2 ambient coordinates");
    for (double c : ambient)
        if (!std::isfinite(c)) throw DomainError("non-finite hyperboloid coordinate");
    if (ambient[0] <= 0.0) throw DomainError("hyperboloid point must lie on the upper sheet (x0 > 0)");
    const double defect = std::abs(lorentz_inner(ambient, ambient) + 1.0);
    if (defect > kSheetLoadTol * std::max(1.0, ambient[0] * ambient[0]))
        throw DomainError("hyperboloid point is off the sheet <x,x>_L = -1");
    return hyperboloid_from_spatial(std::span<const double>(ambient).subspan(1));
}

Point Point::hyperboloid_from_spatial(std::span<const double> spatial) {
    if (spatial.empty()) throw DomainError("hyperboloid point needs dim >= 1");
    std::vector<double> ambient(spatial.size() + 1);
    std::copy(spatial.begin(), spatial.end(), ambient.begin() + 1);
    ambient[0] = std::sqrt(1.0 + sq_norm(spatial));
    if (!std::isfinite(ambient[0])) throw DomainError("hyperboloid point overflow");
    return {Space::hyperboloid(static_cast<int>(spatial.size())), std::move(ambient), 0};
}

Point Point::spider(int legs, int leg, double radius) {
    const Space space = Space::spider(legs);
    if (!(radius >= 0.0) || !std::isfinite(radius)) throw DomainError("spider radius must be finite and >= 0");
    if (radius == 0.0) return {space, {0.0}, 0};
    if (leg < 1 || leg > legs) throw DomainError("spider leg index out of range");
    return {space, {radius}, leg};
}

Point Point::origin(const Space& space) {
    switch (space.kind()) {
        case SpaceKind::Euclidean: return euclidean(std::vector<double>(space.coord_count(), 0.0));
        case SpaceKind::Hyperboloid: return hyperboloid_from_spatial(std::vector<double>(space.dim(), 0.0));
        case SpaceKind::Spider: return spider(space.legs(), 0, 0.0);
    }
    throw DomainError("unknown space");
}

std::span<const double> Point::coords() const {
    if (space_.kind() == SpaceKind::Spider) throw DomainError("spider points have no vector coordinates");
    return coords_;
}

int Point::leg() const {
    if (space_.kind() != SpaceKind::Spider) throw DomainError("leg() on a non-spider point");
    return leg_;
}

double Point::radius() const {
    if (space_.kind() != SpaceKind::Spider) throw DomainError("radius() on a non-spider point");
    return coords_[0];
}

std::vector<double> Point::flat() const {
    if (space_.kind() == SpaceKind::Spider) return {static_cast<double>(leg_), coords_[0]};
    return coords_;
}

double lorentz_inner(std::span<const double> x, std::span<const double> y) {
    double s = -x[0] * y[0];
    for (std::size_t i = 1; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

void require_same_space(const Space& a, const Space& b, const char* where) {
    if (!(a == b)) throw SpaceMismatch(std::string(where) + ": " + a.name() + " vs " + b.name());
}

double distance(const Point& p, const Point& q) {
    require_same_space(p.space(), q.space(), "distance");
    switch (p.space().kind()) {
        case SpaceKind::Euclidean: {
            const auto a = p.coords(), b = q.coords();
            double s = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
            return std::sqrt(s);
        }
        case SpaceKind::Hyperboloid: {
            // 2 asinh(|p-q|_L / 2) avoids the cancellation of acosh(-<p,q>_L) at short range.
            const auto a = p.coords(), b = q.coords();
            double s = -(a[0] - b[0]) * (a[0] - b[0]);
            for (std::size_t i = 1; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
            return 2.0 * std::asinh(std::sqrt(std::max(0.0, s)) / 2.0);
        }
        case SpaceKind::Spider:
            if (p.leg() == q.leg()) return std::abs(p.radius() - q.radius());
            return p.radius() + q.radius();
    }
    return 0.0;
}

Point geodesic_point(const Point& p, const Point& q, double t) {
    require_same_space(p.space(), q.space(), "geodesic_point");
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("geodesic parameter must lie in [0,1]");
    if (t == 0.0) return p;
    if (t == 1.0) return q;

    switch (p.space().kind()) {
        case SpaceKind::Euclidean: {
            const auto a = p.coords(), b = q.coords();
            std::vector<double> out(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) out[i] = (1.0 - t) * a[i] + t * b[i];
            return Point::euclidean(std::move(out));
        }
        case SpaceKind::Hyperboloid: {
            const double d = distance(p, q);
            if (d == 0.0) return p;
            const double sd = std::sinh(d);
            const double wa = std::sinh((1.0 - t) * d) / sd;
            const double wb = std::sinh(t * d) / sd;
            const auto a = p.coords(), b = q.coords();
            std::vector<double> spatial(a.size() - 1);
            for (std::size_t i = 1; i < a.size(); ++i) spatial[i - 1] = wa * a[i] + wb * b[i];
            return Point::hyperboloid_from_spatial(spatial);
        }
        case SpaceKind::Spider: {
            const int legs = p.space().legs();
            if (p.leg() == q.leg() || p.leg() == 0 || q.leg() == 0) {
                // Both on one closed leg.
                const int leg = std::max(p.leg(), q.leg());
                return Point::spider(legs, leg, (1.0 - t) * p.radius() + t * q.radius());
            }
            // Distinct legs: the geodesic runs through the hub.
            const double s = t * (p.radius() + q.radius());
            if (s <= p.radius()) return Point::spider(legs, p.leg(), p.radius() - s);
            return Point::spider(legs, q.leg(), s - p.radius());
        }
    }
    throw DomainError("unknown space");
}

TangentVector log_map(const Point& base, const Point& target) {
    require_same_space(base.space(), target.space(), "log_map");
    switch (base.space().kind()) {
        case SpaceKind::Euclidean: {
            const auto a = base.coords(), b = target.coords();
            std::vector<double> v(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) v[i] = b[i] - a[i];
            return {base, std::move(v), 0};
        }
        case SpaceKind::Hyperboloid: {
            const auto a = base.coords(), b = target.coords();
            std::vector<double> v(a.size(), 0.0);
            const double d = distance(base, target);
            if (d == 0.0) return {base, std::move(v), 0};
            const double ab = lorentz_inner(a, b);
            for (std::size_t i = 0; i < a.size(); ++i) v[i] = b[i] + ab * a[i];
            // Restore tangency lost to rounding, then rescale to length d.
            const double drift = lorentz_inner(a, v);
            for (std::size_t i = 0; i < a.size(); ++i) v[i] += drift * a[i];
            const double n = std::sqrt(std::max(0.0, lorentz_inner(v, v)));
            if (n == 0.0) return {base, std::vector<double>(a.size(), 0.0), 0};
            for (double& c : v) c *= d / n;
            return {base, std::move(v), 0};
        }
        case SpaceKind::Spider: {
            if (base == target) return {base, {0.0}, 0};
            if (base.leg() == 0) return {base, {target.radius()}, target.leg()};
            if (target.leg() == base.leg()) return {base, {target.radius() - base.radius()}, 0};
            if (target.leg() == 0) return {base, {-base.radius()}, 0};
            return {base, {-(base.radius() + target.radius())}, target.leg()};
        }
    }
    throw DomainError("unknown space");
}

Point exp_map(const TangentVector& v, double scale) {
    const Point& p = v.base;
    switch (p.space().kind()) {
        case SpaceKind::Euclidean: {
            const auto a = p.coords();
            if (v.components.size() != a.size()) throw DomainError("tangent dimension mismatch");
            std::vector<double> out(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + scale * v.components[i];
            return Point::euclidean(std::move(out));
        }
        case SpaceKind::Hyperboloid: {
            const auto a = p.coords();
            if (v.components.size() != a.size()) throw DomainError("tangent dimension mismatch");
            const double n = norm(v);
            if (n == 0.0 || scale == 0.0) return p;
            const double len = scale * n;
            const double ch = std::cosh(len), sh = std::sinh(len) / n;
            std::vector<double> spatial(a.size() - 1);
            for (std::size_t i = 1; i < a.size(); ++i) spatial[i - 1] = ch * a[i] + sh * v.components[i];
            return Point::hyperboloid_from_spatial(spatial);
        }
        case SpaceKind::Spider: {
            const int legs = p.space().legs();
            const double s = scale * v.components.at(0);
            if (p.leg() == 0) {
                if (s == 0.0) return p;
                if (s < 0.0 || v.toward_leg == 0) throw DomainError("spider tangent at the hub needs an outward leg");
                return Point::spider(legs, v.toward_leg, s);
            }
            if (s >= 0.0) return Point::spider(legs, p.leg(), p.radius() + s);
            if (-s <= p.radius()) return Point::spider(legs, p.leg(), p.radius() + s);
            if (v.toward_leg == 0 || v.toward_leg == p.leg())
                throw DomainError("spider tangent runs past the hub without a continuation leg");
            return Point::spider(legs, v.toward_leg, -s - p.radius());
        }
    }
    throw DomainError("unknown space");
}

double norm(const TangentVector& v) {
    switch (v.base.space().kind()) {
        case SpaceKind::Euclidean: return std::sqrt(sq_norm(v.components));
        case SpaceKind::Hyperboloid: return std::sqrt(std::max(0.0, lorentz_inner(v.components, v.components)));
        case SpaceKind::Spider: return std::abs(v.components.at(0));
    }
    return 0.0;
}

double sheet_defect(const Point& p) {
    if (p.space().kind() != SpaceKind::Hyperboloid) return 0.0;
    return std::abs(lorentz_inner(p.coords(), p.coords()) + 1.0);
}

}  // namespace hadfix
