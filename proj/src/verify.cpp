#include "hadfix/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "detail.hpp"
#include "hadfix/io.hpp"

namespace hadfix {

using detail::overloaded;
using io::Json;
using io::to_json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// Unit tangent at a hyperboloid point, from a Gaussian spatial direction.
TangentVector random_direction(const Point& base, Rng& rng) {
    const auto c = base.coords();
    std::normal_distribution<double> normal;
    std::vector<double> w(c.size(), 0.0);
    double len = 0.0;
    while (len < 1e-6) {
        for (std::size_t i = 1; i < w.size(); ++i) w[i] = normal(rng);
        w[0] = 0.0;
        const double cw = lorentz_inner(c, w);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += cw * c[i];
        len = std::sqrt(std::max(0.0, lorentz_inner(w, w)));
    }
    for (double& v : w) v /= len;
    return {base, std::move(w), 0};
}

Point lift(int dim, std::vector<double> spatial) {
    spatial.resize(static_cast<std::size_t>(dim), 0.0);
    return Point::hyperboloid_from_spatial(spatial);
}

Point axis_point(int dim, double s, double t = 0.0) {
    std::vector<double> v(static_cast<std::size_t>(dim), 0.0);
    v[0] = s;
    if (dim > 1) v[1] = t;
    return Point::euclidean(std::move(v));
}

// Slack accumulator: `raw` is rhs - lhs of the checked inequality; it is a
// violation when raw < -tol.
struct Eval {
    double worst = kInf;
    std::size_t count = 0;
    std::size_t violations = 0;

    void add(double raw, double tol) {
        ++count;
        if (!(raw >= -tol)) ++violations;
        if (!(raw >= worst)) worst = raw;
    }
};

// Evaluates every input (possibly in parallel) and reduces in input order, so
// serial and parallel runs produce identical reports.
template <typename Input, typename EvalFn, typename WitnessFn>
CheckReport run_kernel(std::string name, std::string space, std::uint64_t seed, const std::vector<Input>& inputs,
                       ExecPolicy policy, EvalFn&& eval, WitnessFn&& witness) {
    std::vector<Eval> evals(inputs.size());
    for_each_index(inputs.size(), policy, [&](std::size_t i) { eval(inputs[i], evals[i]); });

    CheckReport r;
    r.name = std::move(name);
    r.space = std::move(space);
    r.seed = seed;
    std::size_t worst_idx = inputs.size();
    double worst = kInf;
    for (std::size_t i = 0; i < evals.size(); ++i) {
        r.samples += evals[i].count;
        r.violations += evals[i].violations;
        if (evals[i].count > 0 && (worst_idx == inputs.size() || evals[i].worst < worst)) {
            worst = evals[i].worst;
            worst_idx = i;
        }
    }
    if (worst_idx < inputs.size()) {
        r.worst_margin = worst;
        r.witness = witness(inputs[worst_idx]).dump();
    }
    return r;
}

Json points_json(std::initializer_list<const Point*> pts) {
    Json arr = Json::array();
    for (const Point* p : pts) arr.push_back(to_json(*p));
    return arr;
}

ConvexSet random_set(const Space& space, Rng& rng) {
    switch (space.kind()) {
        case SpaceKind::Euclidean: {
            const int pick = uniform_int(rng, 0, 2);
            if (pick == 0) return ConvexSet::ball(random_point(space, rng, 2.0), uniform(rng, 0.2, 2.0));
            if (pick == 1) return ConvexSet::segment(random_point(space, rng, 2.0), random_point(space, rng, 2.0));
            std::vector<double> n(static_cast<std::size_t>(space.dim()));
            std::normal_distribution<double> normal;
            for (double& c : n) c = normal(rng);
            if (std::all_of(n.begin(), n.end(), [](double c) { return c == 0.0; })) n[0] = 1.0;
            return ConvexSet::halfspace(space.dim(), std::move(n), uniform(rng, -1.0, 1.0));
        }
        case SpaceKind::Hyperboloid:
            if (uniform_int(rng, 0, 1) == 0)
                return ConvexSet::ball(random_point(space, rng, 1.5), uniform(rng, 0.2, 1.5));
            return ConvexSet::segment(random_point(space, rng, 1.5), random_point(space, rng, 1.5));
        case SpaceKind::Spider: {
            const int pick = uniform_int(rng, 0, 2);
            if (pick == 0) return ConvexSet::ball(random_point(space, rng, 2.0), uniform(rng, 0.2, 2.0));
            if (pick == 1) return ConvexSet::segment(random_point(space, rng, 2.0), random_point(space, rng, 2.0));
            return ConvexSet::spider_leg(space.legs(), uniform_int(rng, 1, space.legs()));
        }
    }
    throw DomainError("unknown space");
}

ConvexFunction random_function(const Space& space, FormKind kind, Rng& rng) {
    switch (kind) {
        case FormKind::SqDistance:
            return ConvexFunction::sq_distance(random_point(space, rng, 2.0), uniform(rng, 0.2, 3.0));
        case FormKind::Distance: return ConvexFunction::distance(random_point(space, rng, 2.0));
        case FormKind::Indicator: return ConvexFunction::indicator(random_set(space, rng));
        case FormKind::SqDistanceToSet: return ConvexFunction::sq_distance_to_set(random_set(space, rng));
    }
    throw DomainError("unknown form");
}

double random_lambda(Rng& rng) { return std::exp(uniform(rng, std::log(0.05), std::log(20.0))); }

}  // namespace

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

Point random_point(const Space& space, Rng& rng, double scale) {
    switch (space.kind()) {
        case SpaceKind::Euclidean: {
            std::vector<double> c(space.coord_count());
            for (double& v : c) v = uniform(rng, -scale, scale);
            return Point::euclidean(std::move(c));
        }
        case SpaceKind::Hyperboloid: {
            std::vector<double> s(static_cast<std::size_t>(space.dim()));
            for (double& v : s) v = uniform(rng, -scale, scale);
            return Point::hyperboloid_from_spatial(s);
        }
        case SpaceKind::Spider: {
            if (uniform(rng, 0.0, 1.0) < 0.05) return Point::origin(space);
            const int leg = uniform_int(rng, 1, space.legs());
            return Point::spider(space.legs(), leg, uniform(rng, 0.0, scale));
        }
    }
    throw DomainError("unknown space");
}

Point sample_member(const ConvexSet& set, Rng& rng) {
    return std::visit(
        overloaded{
            [&](const shape::Ball& b) {
                if (b.center.space().kind() == SpaceKind::Euclidean) {
                    const auto c = b.center.coords();
                    for (;;) {
                        std::vector<double> y(c.size());
                        for (std::size_t i = 0; i < c.size(); ++i) y[i] = c[i] + uniform(rng, -b.radius, b.radius);
                        Point p = Point::euclidean(std::move(y));
                        if (distance(p, b.center) <= b.radius) return p;
                    }
                }
                TangentVector v = random_direction(b.center, rng);
                return exp_map(v, b.radius * uniform(rng, 0.0, 1.0));
            },
            [&](const shape::SpiderBall& b) {
                const int legs = b.center.space().legs();
                const int leg = uniform_int(rng, 1, legs);
                const Point far = Point::spider(legs, leg, (b.center.leg() == 0 ? 0.0 : b.center.radius()) + b.radius);
                const double d = distance(b.center, far);
                const double reach = b.radius * uniform(rng, 0.0, 1.0);
                return geodesic_point(b.center, far, std::min(1.0, reach / d));
            },
            [&](const shape::Segment& s) { return geodesic_point(s.a, s.b, uniform(rng, 0.0, 1.0)); },
            [&](const shape::Halfspace& h) {
                std::vector<double> y(h.normal.size());
                for (std::size_t i = 0; i < y.size(); ++i) y[i] = h.offset * h.normal[i] + uniform(rng, -3.0, 3.0);
                double excess = 0.0;
                for (std::size_t i = 0; i < y.size(); ++i) excess += y[i] * h.normal[i];
                excess -= h.offset;
                if (excess > 0.0)
                    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= 2.0 * excess * h.normal[i];
                return Point::euclidean(std::move(y));
            },
            [&](const shape::SpiderLeg& l) {
                const int legs = set.space().legs();
                if (uniform(rng, 0.0, 1.0) < 0.1) return Point::origin(set.space());
                return Point::spider(legs, l.leg, uniform(rng, 0.0, 3.0));
            },
        },
        set.shape());
}

Point sample_argmin(const ConvexFunction& f, Rng& rng) {
    return std::visit(overloaded{
                          [&](const form::SqDistance& g) { return g.anchor; },
                          [&](const form::Distance& g) { return g.anchor; },
                          [&](const form::Indicator& g) { return sample_member(g.set, rng); },
                          [&](const form::SqDistanceToSet& g) { return sample_member(g.set, rng); },
                      },
                      f.form());
}

Point sample_fixed(const Operator& s, Rng& rng) {
    return std::visit(overloaded{
                          [&](const op::Projection& p) { return sample_member(p.set, rng); },
                          [&](const op::Resolvent& r) { return sample_argmin(r.function, rng); },
                      },
                      s.kind());
}

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

CheckReport cat0_triangle_check(const Space& space, std::size_t n_triangles, std::size_t n_samples,
                                std::uint64_t seed, ExecPolicy policy) {
    if (n_triangles == 0 || n_samples == 0) throw DomainError("cat0_triangle_check needs n >= 1");
    struct Pair {
        int vertex;
        double t, s;
    };
    struct Triangle {
        std::array<Point, 3> x;
        std::vector<Pair> pairs;
    };
    Rng rng(seed);
    std::vector<Triangle> inputs;
    inputs.reserve(n_triangles);
    for (std::size_t i = 0; i < n_triangles; ++i) {
        Triangle tri{{random_point(space, rng), random_point(space, rng), random_point(space, rng)}, {}};
        for (std::size_t k = 0; k < n_samples; ++k)
            tri.pairs.push_back({uniform_int(rng, 0, 2), uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 1.0)});
        inputs.push_back(std::move(tri));
    }

    auto eval = [](const Triangle& tri, Eval& e) {
        // Comparison triangle: x0' = (0,0), x1' = (d01, 0), x2' from the law of cosines.
        const double d01 = distance(tri.x[0], tri.x[1]);
        const double d02 = distance(tri.x[0], tri.x[2]);
        const double d12 = distance(tri.x[1], tri.x[2]);
        std::array<std::array<double, 2>, 3> bar{};
        bar[1] = {d01, 0.0};
        if (d01 > 0.0) {
            const double u = (d01 * d01 + d02 * d02 - d12 * d12) / (2.0 * d01);
            bar[2] = {u, std::sqrt(std::max(0.0, d02 * d02 - u * u))};
        } else {
            bar[2] = {d02, 0.0};
        }
        for (const Pair& pr : tri.pairs) {
            const int i = pr.vertex, j = (pr.vertex + 1) % 3, k = (pr.vertex + 2) % 3;
            const Point p = geodesic_point(tri.x[i], tri.x[j], pr.t);
            const Point q = geodesic_point(tri.x[i], tri.x[k], pr.s);
            const double px = (1 - pr.t) * bar[i][0] + pr.t * bar[j][0], py = (1 - pr.t) * bar[i][1] + pr.t * bar[j][1];
            const double qx = (1 - pr.s) * bar[i][0] + pr.s * bar[k][0], qy = (1 - pr.s) * bar[i][1] + pr.s * bar[k][1];
            e.add(std::hypot(px - qx, py - qy) - distance(p, q), kGeoTol);
        }
    };
    auto witness = [](const Triangle& tri) {
        return Json{{"triangle", points_json({&tri.x[0], &tri.x[1], &tri.x[2]})}};
    };
    return run_kernel("cat0_triangle", space.name(), seed, inputs, policy, eval, witness);
}

CheckReport geodesic_speed_check(const Space& space, std::size_t n_samples, std::uint64_t seed, ExecPolicy policy) {
    struct In {
        Point p, q;
        double t, s;
    };
    Rng rng(seed);
    std::vector<In> inputs;
    for (std::size_t i = 0; i < n_samples; ++i) {
        Point p = random_point(space, rng);
        Point q = random_point(space, rng);
        const double t = uniform(rng, 0.0, 1.0), s = uniform(rng, 0.0, 1.0);
        inputs.push_back({std::move(p), std::move(q), t, s});
    }
    auto eval = [](const In& in, Eval& e) {
        const double d = distance(in.p, in.q);
        const double got = distance(geodesic_point(in.p, in.q, in.t), geodesic_point(in.p, in.q, in.s));
        e.add(-std::abs(got - std::abs(in.t - in.s) * d), 1e-8);
        if (in.p.space().kind() == SpaceKind::Hyperboloid)
            e.add(-sheet_defect(geodesic_point(in.p, in.q, in.t)), kGeoTol);
    };
    auto witness = [](const In& in) { return Json{{"p", to_json(in.p)}, {"q", to_json(in.q)}, {"t", in.t}, {"s", in.s}}; };
    return run_kernel("geodesic_speed", space.name(), seed, inputs, policy, eval, witness);
}

CheckReport metric_axioms_check(const Space& space, std::size_t n_samples, std::uint64_t seed, ExecPolicy policy) {
    struct In {
        Point p, q, r;
    };
    Rng rng(seed);
    std::vector<In> inputs;
    for (std::size_t i = 0; i < n_samples; ++i) {
        Point p = random_point(space, rng), q = random_point(space, rng), r = random_point(space, rng);
        inputs.push_back({std::move(p), std::move(q), std::move(r)});
    }
    auto eval = [](const In& in, Eval& e) {
        const double pq = distance(in.p, in.q), qp = distance(in.q, in.p);
        const double qr = distance(in.q, in.r), pr = distance(in.p, in.r);
        e.add(pq, 0.0);
        e.add(-std::abs(pq - qp), kGeoTol);
        e.add(pq + qr - pr, kGeoTol);
        e.add(-distance(in.p, in.p), 0.0);
        if (!(in.p == in.q)) e.add(pq > 0.0 ? 0.0 : -1.0, 0.0);
    };
    auto witness = [](const In& in) { return points_json({&in.p, &in.q, &in.r}); };
    return run_kernel("metric_axioms", space.name(), seed, inputs, policy, eval, witness);
}

CheckReport geodesic_convexity_check(const Space& space, std::size_t n_samples, std::uint64_t seed,
                                     ExecPolicy policy) {
    struct In {
        Point p1, q1, p2, q2;
        double t, s;
    };
    Rng rng(seed);
    std::vector<In> inputs;
    for (std::size_t i = 0; i < n_samples; ++i) {
        Point p1 = random_point(space, rng), q1 = random_point(space, rng);
        Point p2 = random_point(space, rng), q2 = random_point(space, rng);
        const double t = uniform(rng, 0.0, 1.0), s = uniform(rng, 0.0, 1.0);
        inputs.push_back({std::move(p1), std::move(q1), std::move(p2), std::move(q2), t, s});
    }
    auto eval = [](const In& in, Eval& e) {
        auto gap = [&](double u) {
            return distance(geodesic_point(in.p1, in.q1, u), geodesic_point(in.p2, in.q2, u));
        };
        e.add(0.5 * (gap(in.t) + gap(in.s)) - gap(0.5 * (in.t + in.s)), kGeoTol);
    };
    auto witness = [](const In& in) {
        return Json{{"geodesics", points_json({&in.p1, &in.q1, &in.p2, &in.q2})}, {"t", in.t}, {"s", in.s}};
    };
    return run_kernel("geodesic_convexity", space.name(), seed, inputs, policy, eval, witness);
}

CheckReport projection_check(const ConvexSet& set, std::size_t n_samples, std::uint64_t seed, ExecPolicy policy) {
    struct In {
        Point x, y, member;
    };
    Rng rng(seed);
    std::vector<In> inputs;
    for (std::size_t i = 0; i < n_samples; ++i) {
        Point x = random_point(set.space(), rng);
        Point y = random_point(set.space(), rng);
        Point m = sample_member(set, rng);
        inputs.push_back({std::move(x), std::move(y), std::move(m)});
    }
    auto eval = [&set](const In& in, Eval& e) {
        const Point px = project(set, in.x);
        const Point py = project(set, in.y);
        e.add(-distance(project(set, px), px), kGeoTol);                               // idempotent
        e.add(distance(in.x, in.member) - distance(px, in.member), kGeoTol);          // quasi-nonexpansive
        e.add(distance(in.x, in.y) - distance(px, py), kGeoTol);                      // nonexpansive
        e.add(contains(set, in.member, kGeoTol) ? 0.0 : -1.0, 0.0);                   // sampler lands in C
        e.add(-distance(project(set, in.member), in.member), kGeoTol);                // Fix(P_C) = C
    };
    auto witness = [&set](const In& in) {
        return Json{{"set", to_json(set)}, {"x", to_json(in.x)}, {"y", to_json(in.y)}, {"member", to_json(in.member)}};
    };
    return run_kernel(std::string("projection:") + to_string(set.kind()), set.space().name(), seed, inputs, policy,
                      eval, witness);
}

CheckReport prox_oracle_check(const Space& space, FormKind form, std::size_t n_samples, std::uint64_t seed,
                              ExecPolicy policy, double tol) {
    struct In {
        ConvexFunction f;
        Lambda lambda;
        Point x;
    };
    Rng rng(seed);
    std::vector<In> inputs;
    for (std::size_t i = 0; i < n_samples; ++i) {
        ConvexFunction f = random_function(space, form, rng);
        const Lambda lambda(random_lambda(rng));
        Point x = random_point(space, rng);
        inputs.push_back({std::move(f), lambda, std::move(x)});
    }
    auto eval = [tol](const In& in, Eval& e) {
        const Point closed = resolvent(in.f, in.lambda, in.x);
        const Point oracle = numeric_prox(in.f, in.lambda, in.x);
        const double a = prox_objective(in.f, in.lambda, in.x, closed);
        const double b = prox_objective(in.f, in.lambda, in.x, oracle);
        e.add(std::isfinite(a) && std::isfinite(b) ? -std::abs(a - b) : -kInf, tol);
    };
    auto witness = [](const In& in) {
        return Json{{"function", to_json(in.f)}, {"lambda", in.lambda.value()}, {"x", to_json(in.x)}};
    };
    return run_kernel(std::string("prox_oracle:") + to_string(form), space.name(), seed, inputs, policy, eval,
                      witness);
}

CheckReport resolvent_properties_check(const Space& space, std::size_t n_samples, std::uint64_t seed,
                                       ExecPolicy policy) {
    constexpr std::size_t kCompetitors = 24;
    struct In {
        ConvexFunction f;
        double lam_small, lam_large;
        Point x, minimizer;
        std::vector<Point> competitors;
        std::vector<double> nudges;
    };
    Rng rng(seed);
    std::vector<In> inputs;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const auto form = static_cast<FormKind>(i % 4);
        ConvexFunction f = random_function(space, form, rng);
        double l1 = random_lambda(rng), l2 = random_lambda(rng);
        if (l1 > l2) std::swap(l1, l2);
        Point x = random_point(space, rng);
        Point q = sample_argmin(f, rng);
        std::vector<Point> comp;
        std::vector<double> nudges;
        for (std::size_t k = 0; k < kCompetitors; ++k) {
            comp.push_back(random_point(space, rng));
            nudges.push_back(std::pow(10.0, uniform(rng, -6.0, 0.0)));
        }
        inputs.push_back({std::move(f), l1, l2, std::move(x), std::move(q), std::move(comp), std::move(nudges)});
    }
    auto eval = [](const In& in, Eval& e) {
        const Lambda small(in.lam_small), large(in.lam_large);
        const Point rx = resolvent(in.f, small, in.x);
        const double best = prox_objective(in.f, small, in.x, rx);
        for (std::size_t k = 0; k < in.competitors.size(); ++k) {
            // Far competitors and points a short way from rx toward them.
            const Point& y = in.competitors[k];
            const double dy = distance(rx, y);
            const Point near = dy > 0.0 ? geodesic_point(rx, y, std::min(1.0, in.nudges[k] / dy)) : y;
            for (const Point* c : {&y, &near}) {
                const double v = prox_objective(in.f, small, in.x, *c);
                if (std::isfinite(v)) e.add(v - best, kGeoTol * std::max(1.0, best));
            }
        }
        e.add(distance(in.x, in.minimizer) - distance(rx, in.minimizer), kGeoTol);
        e.add(-distance(in.minimizer, resolvent(in.f, small, in.minimizer)), kGeoTol);
        e.add(distance(in.x, resolvent(in.f, large, in.x)) - distance(in.x, rx), kGeoTol);
    };
    auto witness = [](const In& in) {
        return Json{{"function", to_json(in.f)},
                    {"lambdas", {in.lam_small, in.lam_large}},
                    {"x", to_json(in.x)},
                    {"minimizer", to_json(in.minimizer)}};
    };
    return run_kernel("resolvent_properties", space.name(), seed, inputs, policy, eval, witness);
}

// ---------------------------------------------------------------------------
// Operators and chains
// ---------------------------------------------------------------------------

CheckReport quasi_nonexpansive_check(const std::string& name, const PointMap& map,
                                     std::span<const Point> fixed_points, std::size_t n_samples,
                                     std::uint64_t seed, ExecPolicy policy) {
    if (fixed_points.empty()) throw DomainError("quasi_nonexpansive_check needs fixed points");
    const Space space = fixed_points.front().space();
    for (const Point& q : fixed_points) {
        require_same_space(space, q.space(), "quasi_nonexpansive_check");
        const double r = distance(q, map(q));
        if (r > kGeoTol)
            throw BadFixedPoint("supplied point is not fixed: d(q, Sq) = " + io::format_double(r));
    }
    Rng rng(seed);
    std::vector<Point> inputs;
    for (std::size_t i = 0; i < n_samples; ++i) inputs.push_back(random_point(space, rng));
    auto eval = [&](const Point& x, Eval& e) {
        const Point sx = map(x);
        for (const Point& q : fixed_points) e.add(distance(x, q) - distance(sx, q), kGeoTol);
    };
    auto witness = [](const Point& x) { return Json{{"x", to_json(x)}}; };
    return run_kernel("quasi_nonexpansive:" + name, space.name(), seed, inputs, policy, eval, witness);
}

CheckReport quasi_nonexpansive_check(const Operator& s, std::span<const Point> fixed_points, std::size_t n_samples,
                                     std::uint64_t seed, ExecPolicy policy) {
    return quasi_nonexpansive_check(
        s.describe(), [&s](const Point& x) { return s.apply(x); }, fixed_points, n_samples, seed, policy);
}

CheckReport fixed_point_identity_check(const OperatorChain& chain, std::span<const FixedSetSampler> samplers,
                                       std::size_t n_samples, std::uint64_t seed, ExecPolicy policy) {
    if (samplers.size() != chain.size()) throw DomainError("fixed_point_identity_check needs one sampler per factor");
    const Space& space = chain.space();
    Rng rng(seed);

    auto in_every_fix = [&](const Point& x) {
        for (const Operator& s : chain.factors())
            if (distance(x, s.apply(x)) > kGeoTol) return false;
        return true;
    };

    // Superset direction: common fixed points drawn from the factor samplers.
    std::vector<Point> drawn;
    for (std::size_t i = 0; i < n_samples; ++i) drawn.push_back(samplers[i % samplers.size()](rng));
    std::vector<char> common(drawn.size(), 0);
    for_each_index(drawn.size(), policy, [&](std::size_t i) { common[i] = in_every_fix(drawn[i]) ? 1 : 0; });

    // Subset direction candidates: common points, Picard limits, random points.
    std::vector<Point> starts;
    const std::size_t n_starts = std::max<std::size_t>(8, n_samples / 10);
    for (std::size_t i = 0; i < n_starts; ++i) starts.push_back(random_point(space, rng));
    std::vector<Point> randoms;
    for (std::size_t i = 0; i < n_samples; ++i) randoms.push_back(random_point(space, rng));

    IterationConfig cfg;
    cfg.max_iter = 5000;
    cfg.residual_tol = kGeoTol / 100.0;
    cfg.step_tol = kGeoTol / 100.0;
    cfg.tail_window = 3;
    const std::vector<Trace> runs = picard_batch(chain, starts, cfg, policy);

    struct In {
        Point x;
        bool superset;  // drawn from ∩ Fix(S_i)
    };
    std::vector<In> inputs;
    for (std::size_t i = 0; i < drawn.size(); ++i)
        if (common[i]) inputs.push_back({drawn[i], true});
    const std::size_t n_superset = inputs.size();
    for (const Trace& t : runs) inputs.push_back({t.final_iterate(), false});
    for (Point& p : randoms) inputs.push_back({std::move(p), false});

    std::vector<char> fixed_by_chain(inputs.size(), 0);
    for_each_index(inputs.size(), policy, [&](std::size_t i) {
        fixed_by_chain[i] = residual(chain, inputs[i].x) <= kGeoTol ? 1 : 0;
    });
    std::vector<In> kept;
    std::size_t n_subset = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (inputs[i].superset || fixed_by_chain[i]) {
            n_subset += fixed_by_chain[i] ? 1 : 0;
            kept.push_back(inputs[i]);
        }
    }

    auto eval = [&chain](const In& in, Eval& e) {
        const ChainImage img = apply_chain_traced(chain, in.x);
        const double chain_res = distance(in.x, img.image);
        if (in.superset) e.add(-chain_res, kGeoTol);
        if (chain_res <= kGeoTol) {
            const double worst = *std::max_element(img.factor_residuals.begin(), img.factor_residuals.end());
            e.add(-worst, 10.0 * kGeoTol);
        }
    };
    auto witness = [](const In& in) { return Json{{"x", to_json(in.x)}, {"from_common_sampler", in.superset}}; };

    std::string name = "fixed_point_identity:";
    for (std::size_t i = 0; i < chain.size(); ++i) name += (i ? "," : "") + chain.factors()[i].describe();
    CheckReport r = run_kernel(name, space.name(), seed, kept, policy, eval, witness);
    r.note = "superset samples: " + std::to_string(n_superset) + ", chain-fixed samples: " + std::to_string(n_subset);
    if (n_superset == 0) {
        r.note += "; empty intersection: no common fixed point of the factors was found";
        if (n_subset > 0 && r.violations > 0)
            r.note += "; the product still has fixed points outside the intersection, so the identity fails";
    }
    return r;
}

CheckReport fixed_point_identity_check(const OperatorChain& chain, std::size_t n_samples, std::uint64_t seed,
                                       ExecPolicy policy) {
    std::vector<FixedSetSampler> samplers;
    for (const Operator& s : chain.factors()) samplers.push_back([&s](Rng& rng) { return sample_fixed(s, rng); });
    return fixed_point_identity_check(chain, samplers, n_samples, seed, policy);
}

namespace {

// A run that stopped on an exact fixed point (chain residual 0) has a constant
// orbit from there on: its tail is the final record repeated.
bool constant_tail(const Trace& trace) {
    return trace.status == RunStatus::Converged && !trace.residuals.empty() && trace.residuals.back() == 0.0;
}

}  // namespace

CheckReport residual_vanishing_check(const Trace& trace, double residual_tol, std::size_t window) {
    CheckReport r;
    r.name = "residual_vanishing";
    r.space = trace.space.name();
    const std::size_t n = trace.residuals.size();
    const bool constant = constant_tail(trace);
    const std::size_t from = constant ? n - 1 : (n > window ? n - window : 0);
    double worst = kInf;
    std::size_t worst_k = from;
    for (std::size_t k = from; k < n; ++k) {
        double worst_here = trace.residuals[k];
        for (double f : trace.per_factor_residuals[k]) worst_here = std::max(worst_here, f);
        const double slack = residual_tol - worst_here;
        const std::size_t weight = constant ? window : 1;
        r.samples += weight;
        if (slack < 0.0) r.violations += weight;
        if (slack < worst) worst = slack, worst_k = k;
    }
    if (r.samples > 0) {
        r.worst_margin = worst;
        r.witness = Json{{"iter", trace.iterations[worst_k]},
                         {"residual", trace.residuals[worst_k]},
                         {"per_factor_residuals", trace.per_factor_residuals[worst_k]}}
                        .dump();
    }
    if (constant) r.note = "orbit constant from iteration " + std::to_string(trace.iterations.back());
    if (trace.status != RunStatus::Converged)
        r.note = "run did not converge: the common fixed-point set may be empty (hypothesis violated)";
    return r;
}

CheckReport tail_cauchy_check(const Trace& trace, double step_tol, std::size_t window) {
    CheckReport r;
    r.name = "tail_cauchy";
    r.space = trace.space.name();
    if (constant_tail(trace)) {
        r.samples = window;
        r.worst_margin = step_tol;
        r.witness = Json{{"iter", trace.iterations.back()}}.dump();
        r.note = "orbit constant from iteration " + std::to_string(trace.iterations.back());
        return r;
    }
    const std::size_t n = trace.iterates.size();
    const std::size_t from = n > window + 1 ? n - window : 1;
    double worst = kInf;
    std::size_t worst_k = from;
    for (std::size_t k = from; k < n; ++k) {
        const double slack = step_tol - distance(trace.iterates[k - 1], trace.iterates[k]);
        ++r.samples;
        if (slack < 0.0) ++r.violations;
        if (slack < worst) worst = slack, worst_k = k;
    }
    if (r.samples > 0) {
        r.worst_margin = worst;
        r.witness = Json{{"iter", trace.iterations[worst_k]}}.dump();
    }
    return r;
}

// ---------------------------------------------------------------------------
// Suite
// ---------------------------------------------------------------------------

SuiteSelector parse_selector(const std::string& name) {
    if (name == "all") return SuiteSelector::All;
    if (name == "euclidean") return SuiteSelector::Euclidean;
    if (name == "hyperboloid") return SuiteSelector::Hyperboloid;
    if (name == "spider") return SuiteSelector::Spider;
    throw DomainError("unknown space selector '" + name + "' (expected all, euclidean, hyperboloid or spider)");
}

std::vector<Space> suite_spaces(SuiteSelector selector) {
    std::vector<Space> out;
    if (selector == SuiteSelector::All || selector == SuiteSelector::Euclidean) {
        out.push_back(Space::euclidean(2));
        out.push_back(Space::euclidean(5));
    }
    if (selector == SuiteSelector::All || selector == SuiteSelector::Hyperboloid) {
        out.push_back(Space::hyperboloid(2));
        out.push_back(Space::hyperboloid(3));
    }
    if (selector == SuiteSelector::All || selector == SuiteSelector::Spider) {
        out.push_back(Space::spider(3));
        out.push_back(Space::spider(5));
    }
    return out;
}

std::vector<OperatorChain> reference_chains(const Space& space) {
    using O = Operator;
    using F = ConvexFunction;
    using C = ConvexSet;
    std::vector<OperatorChain> chains;
    auto add = [&](std::vector<Operator> f) { chains.emplace_back(std::move(f)); };

    switch (space.kind()) {
        case SpaceKind::Euclidean: {
            const int n = space.dim();
            const Point o = Point::origin(space);
            std::vector<double> ge_one(static_cast<std::size_t>(n), 0.0);
            ge_one[0] = -1.0;
            add({O::projection(C::ball(o, 2.0)), O::projection(C::ball(axis_point(n, 1.5), 1.5))});
            add({O::projection(C::ball(o, 2.0)), O::projection(C::halfspace(n, ge_one, -1.0))});
            add({O::resolvent(F::sq_distance_to_set(C::ball(o, 2.0)), Lambda(1.0)),
                 O::projection(C::ball(axis_point(n, 1.5), 1.0))});
            add({O::resolvent(F::sq_distance(axis_point(n, 0.5), 2.0), Lambda(0.7)), O::projection(C::ball(o, 1.0))});
            add({O::projection(C::segment(axis_point(n, -2.0, -0.2), axis_point(n, 2.0, 0.2))),
                 O::resolvent(F::indicator(C::ball(o, 1.0)), Lambda(0.5)),
                 O::resolvent(F::distance(axis_point(n, 0.3, 0.03)), Lambda(1.5))});
            std::vector<double> le_half(static_cast<std::size_t>(n), 0.0);
            le_half[0] = 1.0;
            add({O::resolvent(F::sq_distance_to_set(C::halfspace(n, le_half, 0.5)), Lambda(2.0)),
                 O::resolvent(F::indicator(C::ball(o, 1.5)), Lambda(1.0)),
                 O::projection(C::segment(axis_point(n, -2.0, 1.0), axis_point(n, 2.0, -1.0)))});
            break;
        }
        case SpaceKind::Hyperboloid: {
            const int n = space.dim();
            const Point apex = Point::origin(space);
            add({O::projection(C::ball(apex, 1.2)), O::projection(C::ball(lift(n, {1.0}), 1.0))});
            add({O::projection(C::ball(apex, 1.5)), O::projection(C::segment(lift(n, {-2.0, 0.3}), lift(n, {2.0, 0.3})))});
            add({O::resolvent(F::sq_distance_to_set(C::ball(lift(n, {0.8}), 1.0)), Lambda(1.5)),
                 O::projection(C::ball(apex, 1.0))});
            add({O::resolvent(F::sq_distance(lift(n, {0.4}), 1.5), Lambda(0.8)), O::projection(C::ball(apex, 1.0))});
            add({O::resolvent(F::distance(lift(n, {0.2})), Lambda(0.6)),
                 O::resolvent(F::indicator(C::segment(lift(n, {-1.0}), lift(n, {1.0}))), Lambda(1.0)),
                 O::projection(C::ball(apex, 1.0))});
            add({O::resolvent(F::sq_distance_to_set(C::segment(lift(n, {-1.5}), lift(n, {1.5}))), Lambda(0.5)),
                 O::projection(C::ball(lift(n, {0.5}), 0.7))});
            break;
        }
        case SpaceKind::Spider: {
            const int L = space.legs();
            auto sp = [L](int leg, double r) { return Point::spider(L, leg, r); };
            add({O::projection(C::spider_leg(L, 1)), O::projection(C::ball(Point::origin(space), 1.0))});
            add({O::projection(C::ball(sp(1, 1.0), 1.5)), O::projection(C::ball(sp(2, 1.0), 1.5))});
            add({O::resolvent(F::sq_distance_to_set(C::spider_leg(L, 2)), Lambda(1.0)),
                 O::projection(C::ball(sp(2, 2.0), 1.0))});
            add({O::resolvent(F::sq_distance(sp(3, 0.5), 1.0), Lambda(0.9)), O::projection(C::segment(sp(1, 1.0), sp(3, 2.0)))});
            add({O::resolvent(F::distance(sp(1, 0.7)), Lambda(0.4)),
                 O::resolvent(F::indicator(C::spider_leg(L, 1)), Lambda(2.0)),
                 O::projection(C::ball(Point::origin(space), 1.0))});
            add({O::resolvent(F::sq_distance_to_set(C::ball(sp(2, 1.0), 0.5)), Lambda(1.2)),
                 O::projection(C::segment(sp(2, 3.0), sp(1, 1.0)))});
            break;
        }
    }
    return chains;
}

OperatorChain disjoint_balls_chain(const Space& space) {
    switch (space.kind()) {
        case SpaceKind::Euclidean:
            return OperatorChain({Operator::projection(ConvexSet::ball(Point::origin(space), 1.0)),
                                  Operator::projection(ConvexSet::ball(axis_point(space.dim(), 3.0), 1.0))});
        case SpaceKind::Hyperboloid:
            return OperatorChain({Operator::projection(ConvexSet::ball(Point::origin(space), 0.5)),
                                  Operator::projection(ConvexSet::ball(lift(space.dim(), {2.0}), 0.5))});
        case SpaceKind::Spider: {
            const int L = space.legs();
            return OperatorChain({Operator::projection(ConvexSet::ball(Point::spider(L, 1, 2.0), 0.5)),
                                  Operator::projection(ConvexSet::ball(Point::spider(L, 2, 2.0), 0.5))});
        }
    }
    throw DomainError("unknown space");
}

namespace {

std::vector<ConvexSet> probe_sets(const Space& space) {
    std::vector<ConvexSet> sets;
    switch (space.kind()) {
        case SpaceKind::Euclidean: {
            const int n = space.dim();
            std::vector<double> normal(static_cast<std::size_t>(n), 1.0);
            sets.push_back(ConvexSet::ball(axis_point(n, 0.5), 1.5));
            sets.push_back(ConvexSet::segment(axis_point(n, -2.0, 1.0), axis_point(n, 1.0, -2.0)));
            sets.push_back(ConvexSet::halfspace(n, normal, 0.5));
            sets.push_back(ConvexSet::segment(axis_point(n, 1.0), axis_point(n, 1.0)));
            break;
        }
        case SpaceKind::Hyperboloid: {
            const int n = space.dim();
            sets.push_back(ConvexSet::ball(lift(n, {0.5, -0.3}), 1.0));
            sets.push_back(ConvexSet::segment(lift(n, {-1.5, 0.5}), lift(n, {1.0, -1.0})));
            sets.push_back(ConvexSet::segment(lift(n, {0.7}), lift(n, {0.7})));
            break;
        }
        case SpaceKind::Spider: {
            const int L = space.legs();
            sets.push_back(ConvexSet::ball(Point::spider(L, 1, 0.5), 1.5));
            sets.push_back(ConvexSet::segment(Point::spider(L, 2, 2.0), Point::spider(L, 3, 1.0)));
            sets.push_back(ConvexSet::spider_leg(L, L));
            break;
        }
    }
    return sets;
}

}  // namespace

std::vector<CheckReport> run_suite(SuiteSelector selector, const SuiteOptions& opts) {
    std::vector<CheckReport> out;
    std::uint64_t counter = 0;
    auto next_seed = [&] { return opts.seed * 1000003ULL + counter++; };
    const std::size_t n = std::max<std::size_t>(opts.samples, 1);
    const std::size_t quarter = std::max<std::size_t>(n / 4, 1);
    const ExecPolicy pol = opts.policy;

    for (const Space& space : suite_spaces(selector)) {
        out.push_back(cat0_triangle_check(space, n, 10, next_seed(), pol));
        out.push_back(geodesic_speed_check(space, n, next_seed(), pol));
        out.push_back(metric_axioms_check(space, n, next_seed(), pol));
        out.push_back(geodesic_convexity_check(space, n, next_seed(), pol));
        for (const ConvexSet& set : probe_sets(space)) out.push_back(projection_check(set, quarter, next_seed(), pol));
        for (FormKind form : {FormKind::SqDistance, FormKind::Distance, FormKind::Indicator, FormKind::SqDistanceToSet})
            out.push_back(prox_oracle_check(space, form, quarter, next_seed(), pol));
        out.push_back(resolvent_properties_check(space, quarter, next_seed(), pol));

        const ConvexSet ball = probe_sets(space).front();
        const Point center = std::visit(overloaded{
                                            [](const shape::Ball& b) { return b.center; },
                                            [](const shape::SpiderBall& b) { return b.center; },
                                            [&](const auto&) { return Point::origin(space); },
                                        },
                                        ball.shape());
        const std::vector<Point> centers{center};
        out.push_back(quasi_nonexpansive_check(Operator::projection(ball), centers, quarter, next_seed(), pol));
        const Operator pull = Operator::resolvent(ConvexFunction::sq_distance(center), Lambda(1.0));
        out.push_back(quasi_nonexpansive_check(pull, centers, quarter, next_seed(), pol));

        for (const OperatorChain& chain : reference_chains(space))
            out.push_back(fixed_point_identity_check(chain, quarter, next_seed(), pol));

        // Negative controls: a chain of disjoint balls has no fixed point.
        const OperatorChain disjoint = disjoint_balls_chain(space);
        CheckReport empty = fixed_point_identity_check(disjoint, quarter, next_seed(), pol);
        empty.negative_control = true;
        out.push_back(std::move(empty));
        IterationConfig cfg;
        cfg.max_iter = 2000;
        Rng rng(next_seed());
        const Trace cycling = picard(disjoint, random_point(space, rng), cfg);
        CheckReport vanishing = residual_vanishing_check(cycling, cfg.residual_tol);
        vanishing.name = "residual_vanishing:disjoint_balls";
        vanishing.negative_control = true;
        out.push_back(std::move(vanishing));
    }

    if (selector == SuiteSelector::All || selector == SuiteSelector::Euclidean) {
        // Negative control: x -> 2x fixes 0 but moves every other point away from it.
        const std::vector<Point> zero{Point::euclidean({0.0})};
        auto doubling = [](const Point& x) { return Point::euclidean({2.0 * x.coords()[0]}); };
        CheckReport r = quasi_nonexpansive_check("doubling_map", doubling, zero, n, next_seed(), pol);
        r.negative_control = true;
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace hadfix
