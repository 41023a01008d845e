#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hadfix/engine.hpp"

namespace hadfix {

using Rng = std::mt19937_64;

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

/// Random point of a space: Euclidean and hyperboloid spatial coordinates
/// uniform in [-scale, scale]; spider radius uniform in [0, scale] on a
/// uniform leg, with the hub drawn occasionally.
Point random_point(const Space& space, Rng& rng, double scale = 3.0);

/// Random member of a convex set.
Point sample_member(const ConvexSet& set, Rng& rng);
/// Random element of argmin f.
Point sample_argmin(const ConvexFunction& f, Rng& rng);
/// Random element of Fix(S).
Point sample_fixed(const Operator& s, Rng& rng);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Outcome of one randomized property check. Margins are slack values
/// (rhs - lhs of the checked inequality); a negative margin beyond tolerance
/// is a violation. worst_margin is the smallest margin seen.
struct CheckReport {
    std::string name;
    std::string space;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    std::size_t violations = 0;
    double worst_margin = 0.0;
    /// JSON text describing the inputs of the worst sample.
    std::string witness = "null";
    std::string note;
    /// The check is expected to fail; it guards the harness itself.
    bool negative_control = false;

    bool passed() const noexcept { return samples > 0 && violations == 0; }
    bool as_expected() const noexcept { return negative_control ? !passed() : passed(); }
};

using PointMap = std::function<Point(const Point&)>;
using FixedSetSampler = std::function<Point(Rng&)>;

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

/// CAT(0) comparison: for random triangles and random point pairs on two sides
/// through a common vertex, d(p, q) <= |p' - q'| + kGeoTol in the Euclidean
/// comparison triangle.
CheckReport cat0_triangle_check(const Space& space, std::size_t n_triangles, std::size_t n_samples,
                                std::uint64_t seed, ExecPolicy policy = ExecPolicy::Parallel);

/// d(gamma(t), gamma(s)) = |t - s| d(p, q) within 1e-8.
CheckReport geodesic_speed_check(const Space& space, std::size_t n_samples, std::uint64_t seed,
                                 ExecPolicy policy = ExecPolicy::Parallel);

/// Symmetry, identity and triangle inequality of the metric.
CheckReport metric_axioms_check(const Space& space, std::size_t n_samples, std::uint64_t seed,
                                ExecPolicy policy = ExecPolicy::Parallel);

/// Midpoint convexity of t -> d(gamma_1(t), gamma_2(t)).
CheckReport geodesic_convexity_check(const Space& space, std::size_t n_samples, std::uint64_t seed,
                                     ExecPolicy policy = ExecPolicy::Parallel);

/// Idempotence, quasi-nonexpansiveness toward members, and nonexpansiveness of P_C.
CheckReport projection_check(const ConvexSet& set, std::size_t n_samples, std::uint64_t seed,
                             ExecPolicy policy = ExecPolicy::Parallel);

/// Closed-form resolvent against numeric_prox on random (f, lambda, x) of one
/// form: prox objectives must agree within `tol`.
CheckReport prox_oracle_check(const Space& space, FormKind form, std::size_t n_samples, std::uint64_t seed,
                              ExecPolicy policy = ExecPolicy::Parallel, double tol = 1e-8);

/// Optimality certificate against random competitors, quasi-nonexpansiveness
/// toward argmin f, Fix(R) = argmin f, and monotone movement in lambda.
CheckReport resolvent_properties_check(const Space& space, std::size_t n_samples, std::uint64_t seed,
                                       ExecPolicy policy = ExecPolicy::Parallel);

// ---------------------------------------------------------------------------
// Operators and chains
// ---------------------------------------------------------------------------

/// d(S x, q) <= d(x, q) + kGeoTol for random x and every supplied q.
/// Throws BadFixedPoint if some q has d(q, S q) > kGeoTol.
CheckReport quasi_nonexpansive_check(const std::string& name, const PointMap& map,
                                     std::span<const Point> fixed_points, std::size_t n_samples,
                                     std::uint64_t seed, ExecPolicy policy = ExecPolicy::Parallel);
CheckReport quasi_nonexpansive_check(const Operator& s, std::span<const Point> fixed_points,
                                     std::size_t n_samples, std::uint64_t seed,
                                     ExecPolicy policy = ExecPolicy::Parallel);

/// Fix(S_m ... S_1) = ∩ Fix(S_i) in both directions:
///  ⊇ points drawn from the factor samplers that every factor fixes have
///    chain residual <= kGeoTol;
///  ⊆ points with chain residual <= kGeoTol (drawn samples, Picard limits from
///    random starts, random points) have every partial-application residual
///    <= 10 kGeoTol.
/// When no sampled point is fixed by every factor the report notes an empty
/// intersection.
CheckReport fixed_point_identity_check(const OperatorChain& chain, std::span<const FixedSetSampler> samplers,
                                       std::size_t n_samples, std::uint64_t seed,
                                       ExecPolicy policy = ExecPolicy::Parallel);
/// Same, with samplers derived from the factors.
CheckReport fixed_point_identity_check(const OperatorChain& chain, std::size_t n_samples, std::uint64_t seed,
                                       ExecPolicy policy = ExecPolicy::Parallel);

/// The last `window` logged records have chain residual and every per-factor
/// residual <= residual_tol. Per-factor residuals expose chains whose product
/// has a fixed point although the factors share none (disjoint sets).
CheckReport residual_vanishing_check(const Trace& trace, double residual_tol, std::size_t window = 10);

/// The last `window` consecutive logged steps are all <= step_tol.
///
/// Both tail checks treat a Converged run whose final chain residual is
/// exactly zero as a constant orbit: its tail is the final record repeated.
CheckReport tail_cauchy_check(const Trace& trace, double step_tol, std::size_t window = 10);

// ---------------------------------------------------------------------------
// Suite
// ---------------------------------------------------------------------------

enum class SuiteSelector { All, Euclidean, Hyperboloid, Spider };

/// Throws DomainError for an unknown selector name.
SuiteSelector parse_selector(const std::string& name);

struct SuiteOptions {
    std::uint64_t seed = 42;
    /// Base sample count; individual checks scale from it.
    std::size_t samples = 1000;
    ExecPolicy policy = ExecPolicy::Parallel;
};

/// Runs every positive check and negative control for the selected spaces.
std::vector<CheckReport> run_suite(SuiteSelector selector, const SuiteOptions& opts);

/// Model spaces the suite covers for a selector.
std::vector<Space> suite_spaces(SuiteSelector selector);

/// At least five chains per space, mixing projections and resolvents, each
/// with a common fixed point by construction.
std::vector<OperatorChain> reference_chains(const Space& space);

/// Two balls that do not meet (negative control).
OperatorChain disjoint_balls_chain(const Space& space);

}  // namespace hadfix
