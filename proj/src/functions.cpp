#include "hadfix/functions.hpp"

#include <cmath>
#include <limits>

#include "detail.hpp"

namespace hadfix {

using detail::overloaded;

namespace {

// Orthonormal frame of the tangent space at y (Euclidean or hyperboloid).
std::vector<std::vector<double>> tangent_frame(const Point& y) {
    const auto c = y.coords();
    const std::size_t n = c.size();
    std::vector<std::vector<double>> frame;
    if (y.space().kind() == SpaceKind::Euclidean) {
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> e(n, 0.0);
            e[i] = 1.0;
            frame.push_back(std::move(e));
        }
        return frame;
    }
    // Hyperboloid: project spatial axes onto T_y, then Gram-Schmidt in <.,.>_L.
    for (std::size_t i = 1; i < n; ++i) {
        std::vector<double> w(n, 0.0);
        w[i] = 1.0;
        const double yw = lorentz_inner(c, w);
        for (std::size_t k = 0; k < n; ++k) w[k] += yw * c[k];
        for (const auto& e : frame) {
            const double proj = lorentz_inner(w, e);
            for (std::size_t k = 0; k < n; ++k) w[k] -= proj * e[k];
        }
        const double len = std::sqrt(std::max(0.0, lorentz_inner(w, w)));
        for (double& v : w) v /= len;
        frame.push_back(std::move(w));
    }
    return frame;
}

Point move(const Point& y, const std::vector<std::vector<double>>& frame, std::span<const double> h) {
    TangentVector v{y, std::vector<double>(y.coords().size(), 0.0), 0};
    for (std::size_t i = 0; i < frame.size(); ++i)
        for (std::size_t k = 0; k < v.components.size(); ++k) v.components[k] += h[i] * frame[i][k];
    return exp_map(v);
}

Point descent_prox(const ConvexFunction& f, const Lambda& lambda, const Point& x, const NumericProxOptions& opts) {
    if (x.space().kind() == SpaceKind::Spider)
        throw DomainError("descent prox search needs a Euclidean or hyperboloid space");
    if (f.kind() == FormKind::Indicator) throw DomainError("descent prox search needs a finite-valued function");

    const double lam = lambda.value();
    auto objective = [&](const Point& y) { return prox_objective(f, lambda, x, y); };

    Point y = x;
    double fy = objective(y);
    double step = lam;
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        const auto frame = tangent_frame(y);
        const std::size_t n = frame.size();
        const double h = 1e-6;
        std::vector<double> grad(n), probe(n, 0.0);
        double gnorm2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            probe[i] = h;
            const double fp = objective(move(y, frame, probe));
            probe[i] = -h;
            const double fm = objective(move(y, frame, probe));
            probe[i] = 0.0;
            grad[i] = (fp - fm) / (2.0 * h);
            gnorm2 += grad[i] * grad[i];
        }
        // The prox objective is (1/lambda)-strongly convex, so the optimality
        // gap is at most |grad|^2 lambda / 2.
        if (0.5 * gnorm2 * lam <= opts.tol) return y;

        bool accepted = false;
        for (int back = 0; back < 80; ++back) {
            std::vector<double> dir(n);
            for (std::size_t i = 0; i < n; ++i) dir[i] = -step * grad[i];
            Point trial = move(y, frame, dir);
            const double ft = objective(trial);
            if (ft <= fy - 1e-4 * step * gnorm2) {
                y = std::move(trial);
                fy = ft;
                accepted = true;
                step *= 2.0;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) throw NoConvergence("descent prox: line search stalled");
    }
    throw NoConvergence("descent prox: iteration cap reached");
}

}  // namespace

ConvexFunction ConvexFunction::sq_distance(Point anchor, double weight) {
    if (!(weight > 0.0) || !std::isfinite(weight)) throw DomainError("sq_distance weight must be finite and > 0");
    const Space space = anchor.space();
    return {space, form::SqDistance{std::move(anchor), weight}};
}

ConvexFunction ConvexFunction::distance(Point anchor) {
    const Space space = anchor.space();
    return {space, form::Distance{std::move(anchor)}};
}

ConvexFunction ConvexFunction::indicator(ConvexSet set) {
    const Space space = set.space();
    return {space, form::Indicator{std::move(set)}};
}

ConvexFunction ConvexFunction::sq_distance_to_set(ConvexSet set) {
    const Space space = set.space();
    return {space, form::SqDistanceToSet{std::move(set)}};
}

const char* to_string(FormKind kind) {
    switch (kind) {
        case FormKind::SqDistance: return "sq_distance";
        case FormKind::Distance: return "distance";
        case FormKind::Indicator: return "indicator";
        case FormKind::SqDistanceToSet: return "sq_distance_to_set";
    }
    return "?";
}

Lambda::Lambda(double value) : value_(value) {
    if (!(value > 0.0) || !std::isfinite(value)) throw DomainError("lambda must be finite and > 0");
}

double evaluate(const ConvexFunction& f, const Point& x) {
    require_same_space(f.space(), x.space(), "evaluate");
    return std::visit(
        overloaded{
            [&](const form::SqDistance& g) {
                const double d = distance(x, g.anchor);
                return 0.5 * g.weight * d * d;
            },
            [&](const form::Distance& g) { return distance(x, g.anchor); },
            [&](const form::Indicator& g) {
                return contains(g.set, x, kGeoTol) ? 0.0 : std::numeric_limits<double>::infinity();
            },
            [&](const form::SqDistanceToSet& g) {
                const double d = distance(x, project(g.set, x));
                return 0.5 * d * d;
            },
        },
        f.form());
}

double prox_objective(const ConvexFunction& f, const Lambda& lambda, const Point& x, const Point& y) {
    const double d = distance(x, y);
    return evaluate(f, y) + d * d / (2.0 * lambda.value());
}

Point resolvent(const ConvexFunction& f, const Lambda& lambda, const Point& x) {
    require_same_space(f.space(), x.space(), "resolvent");
    const double lam = lambda.value();
    return std::visit(
        overloaded{
            [&](const form::SqDistance& g) {
                const double wl = g.weight * lam;
                return geodesic_point(x, g.anchor, wl / (1.0 + wl));
            },
            [&](const form::Distance& g) {
                const double d = distance(x, g.anchor);
                if (d <= lam) return g.anchor;
                return geodesic_point(x, g.anchor, lam / d);
            },
            [&](const form::Indicator& g) { return project(g.set, x); },
            [&](const form::SqDistanceToSet& g) {
                return geodesic_point(x, project(g.set, x), lam / (1.0 + lam));
            },
        },
        f.form());
}

Point numeric_prox(const ConvexFunction& f, const Lambda& lambda, const Point& x, const NumericProxOptions& opts) {
    require_same_space(f.space(), x.space(), "numeric_prox");
    if (!(opts.tol > 0.0)) throw DomainError("numeric_prox: tol must be > 0");
    if (opts.search == ProxSearch::Descent) return descent_prox(f, lambda, x, opts);

    const double lam = lambda.value();
    auto along = [&](const Point& target, auto&& value_at) {
        const double t = golden_section_min([&](double s) {
            const Point y = geodesic_point(x, target, s);
            const double d = distance(x, y);
            return value_at(y) + d * d / (2.0 * lam);
        });
        return geodesic_point(x, target, t);
    };
    return std::visit(
        overloaded{
            [&](const form::SqDistance& g) {
                return along(g.anchor, [&](const Point& y) {
                    const double d = distance(y, g.anchor);
                    return 0.5 * g.weight * d * d;
                });
            },
            [&](const form::Distance& g) {
                return along(g.anchor, [&](const Point& y) { return distance(y, g.anchor); });
            },
            [&](const form::Indicator& g) { return numeric_project(g.set, x); },
            [&](const form::SqDistanceToSet& g) {
                return along(numeric_project(g.set, x), [&](const Point& y) {
                    const double d = distance(y, numeric_project(g.set, y));
                    return 0.5 * d * d;
                });
            },
        },
        f.form());
}

double distance_to_argmin(const ConvexFunction& f, const Point& x) {
    require_same_space(f.space(), x.space(), "distance_to_argmin");
    return std::visit(
        overloaded{
            [&](const form::SqDistance& g) { return distance(x, g.anchor); },
            [&](const form::Distance& g) { return distance(x, g.anchor); },
            [&](const form::Indicator& g) { return distance(x, project(g.set, x)); },
            [&](const form::SqDistanceToSet& g) { return distance(x, project(g.set, x)); },
        },
        f.form());
}

}  // namespace hadfix
