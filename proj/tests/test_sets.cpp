#include <gtest/gtest.h>

#include <cmath>

#include "hadfix/sets.hpp"
#include "hadfix/verify.hpp"
#include "oracles.hpp"

using namespace hadfix;

namespace {

Point e2(double x, double y) { return Point::euclidean({x, y}); }
Point h2(double x1, double x2) { return Point::hyperboloid_from_spatial(std::vector<double>{x1, x2}); }

// Brute-force nearest point on [a, b] using the oracle metric.
Point brute_segment_projection(const Point& a, const Point& b, const Point& x) {
    const double t = oracle::argmin_unit([&](double u) { return oracle::distance(x, geodesic_point(a, b, u)); });
    return geodesic_point(a, b, t);
}

}  // namespace

TEST(Project, Examples) {
    EXPECT_EQ(project(ConvexSet::ball(e2(0, 0), 1.0), e2(3, 0)), e2(1, 0));
    EXPECT_EQ(project(ConvexSet::halfspace(2, {0, 1}, 0.0), e2(0, 2)), e2(0, 0));
    EXPECT_EQ(project(ConvexSet::spider_leg(3, 2), Point::spider(3, 1, 1.7)), Point::origin(Space::spider(3)));
}

TEST(Project, SpaceMismatchThrows) {
    EXPECT_THROW(project(ConvexSet::ball(e2(0, 0), 1.0), Point::euclidean({1, 2, 3})), SpaceMismatch);
}

TEST(ConvexSetFactory, Validates) {
    EXPECT_THROW(ConvexSet::ball(e2(0, 0), 0.0), DomainError);
    EXPECT_THROW(ConvexSet::ball(e2(0, 0), -1.0), DomainError);
    EXPECT_THROW(ConvexSet::halfspace(2, {0, 0}, 1.0), DomainError);
    EXPECT_THROW(ConvexSet::halfspace(2, {1, 0, 0}, 1.0), DomainError);
    EXPECT_THROW(ConvexSet::spider_leg(3, 0), DomainError);
    EXPECT_THROW(ConvexSet::segment(e2(0, 0), h2(0, 0)), SpaceMismatch);
    EXPECT_EQ(ConvexSet::ball(Point::spider(3, 1, 1.0), 1.0).kind(), ShapeKind::SpiderBall);
}

TEST(ConvexSetFactory, HalfspaceNormalizes) {
    const ConvexSet h = ConvexSet::halfspace(2, {0, 2}, 4.0);
    const auto& hs = std::get<shape::Halfspace>(h.shape());
    EXPECT_DOUBLE_EQ(hs.normal[1], 1.0);
    EXPECT_DOUBLE_EQ(hs.offset, 2.0);
    EXPECT_EQ(project(h, e2(5, 3)), e2(5, 2));
}

TEST(Contains, Examples) {
    const ConvexSet unit = ConvexSet::ball(e2(0, 0), 1.0);
    EXPECT_TRUE(contains(unit, e2(0.5, 0), 1e-9));
    EXPECT_FALSE(contains(unit, e2(2, 0), 1e-9));
    EXPECT_TRUE(contains(ConvexSet::halfspace(2, {0, 1}, 0.0), e2(5, 1e-12), 1e-9));
    EXPECT_THROW(contains(unit, e2(0, 0), 0.0), DomainError);
}

TEST(Project, DegenerateSegmentCollapses) {
    const ConvexSet s = ConvexSet::segment(h2(0.3, 0.1), h2(0.3, 0.1));
    EXPECT_EQ(project(s, h2(-2, 1)), h2(0.3, 0.1));
}

TEST(Project, SegmentMatchesBruteForce) {
    Rng rng(5);
    for (const Space& s : {Space::euclidean(3), Space::hyperboloid(2), Space::hyperboloid(3), Space::spider(4)}) {
        for (int i = 0; i < 100; ++i) {
            const Point a = random_point(s, rng), b = random_point(s, rng), x = random_point(s, rng);
            const Point p = project(ConvexSet::segment(a, b), x);
            const Point ref = brute_segment_projection(a, b, x);
            // Compare objective values: the minimizer is unique but flat to first order.
            EXPECT_NEAR(static_cast<double>(oracle::distance(x, p)), static_cast<double>(oracle::distance(x, ref)),
                        1e-12)
                << s.name();
            EXPECT_LE(distance(p, ref), 1e-6) << s.name();
        }
    }
}

TEST(Project, AgreesWithNumericOracle) {
    Rng rng(9);
    for (const Space& s : {Space::euclidean(2), Space::hyperboloid(2), Space::spider(3)}) {
        for (int i = 0; i < 200; ++i) {
            const ConvexSet set = i % 2 ? ConvexSet::ball(random_point(s, rng), 0.5 + (i % 7) * 0.3)
                                        : ConvexSet::segment(random_point(s, rng), random_point(s, rng));
            const Point x = random_point(s, rng);
            const Point a = project(set, x), b = numeric_project(set, x);
            EXPECT_NEAR(distance(x, a), distance(x, b), 1e-9) << s.name();
        }
    }
    const ConvexSet h = ConvexSet::halfspace(2, {1, 1}, 0.3);
    for (int i = 0; i < 100; ++i) {
        const Point x = random_point(Space::euclidean(2), rng);
        EXPECT_LE(distance(project(h, x), numeric_project(h, x)), 1e-9);
    }
    const ConvexSet leg = ConvexSet::spider_leg(5, 3);
    for (int i = 0; i < 100; ++i) {
        const Point x = random_point(Space::spider(5), rng);
        EXPECT_LE(distance(project(leg, x), numeric_project(leg, x)), 1e-9);
    }
}

TEST(Project, HyperbolicBallProjectionIsRadial) {
    const Point c = h2(0.2, -0.1);
    const Point x = h2(2.0, 1.5);
    const Point p = project(ConvexSet::ball(c, 0.7), x);
    EXPECT_NEAR(static_cast<double>(oracle::distance(c, p)), 0.7, 1e-12);
    EXPECT_NEAR(static_cast<double>(oracle::distance(c, p) + oracle::distance(p, x)),
                static_cast<double>(oracle::distance(c, x)), 1e-12);
}

// Property sweep over every shape kind.
TEST(ProjectProperties, IdempotentNonexpansiveAndFixOnMembers) {
    std::vector<ConvexSet> sets = {
        ConvexSet::ball(e2(1, -1), 1.5),
        ConvexSet::segment(e2(-2, 0), e2(1, 3)),
        ConvexSet::halfspace(2, {-1, 2}, 0.5),
        ConvexSet::ball(h2(0.5, 0.5), 0.8),
        ConvexSet::segment(h2(-1, 0), h2(1, 2)),
        ConvexSet::spider_leg(3, 2),
        ConvexSet::ball(Point::spider(3, 1, 1.0), 2.0),
        ConvexSet::segment(Point::spider(4, 1, 2.0), Point::spider(4, 4, 1.0)),
    };
    for (const ConvexSet& set : sets) {
        const CheckReport r = projection_check(set, 500, 17, ExecPolicy::Serial);
        EXPECT_TRUE(r.passed()) << r.name << " " << r.space << " worst " << r.worst_margin;
        EXPECT_EQ(r.violations, 0u);
    }
}

TEST(Sampler, MembersLandInTheSet) {
    Rng rng(23);
    const std::vector<ConvexSet> sets = {
        ConvexSet::ball(Point::euclidean({0, 1, 2}), 0.5), ConvexSet::ball(h2(1, 1), 1.2),
        ConvexSet::ball(Point::spider(5, 2, 0.3), 1.0),    ConvexSet::halfspace(3, {0, 0, 1}, -1.0),
        ConvexSet::spider_leg(3, 3),                       ConvexSet::segment(h2(0, 0), h2(3, -1)),
    };
    for (const ConvexSet& set : sets)
        for (int i = 0; i < 500; ++i) EXPECT_TRUE(contains(set, sample_member(set, rng), kGeoTol));
}
