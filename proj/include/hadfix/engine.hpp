#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hadfix/exec.hpp"
#include "hadfix/functions.hpp"

namespace hadfix {

namespace op {

struct Projection {
    ConvexSet set;
};

struct Resolvent {
    ConvexFunction function;
    Lambda lambda;
};

}  // namespace op

/// One strongly quasi-nonexpansive factor: a metric projection or a resolvent.
class Operator {
public:
    using Kind = std::variant<op::Projection, op::Resolvent>;

    static Operator projection(ConvexSet set);
    static Operator resolvent(ConvexFunction f, Lambda lambda);

    const Space& space() const noexcept { return space_; }
    const Kind& kind() const noexcept { return kind_; }

    Point apply(const Point& x) const;
    /// Distance from x to Fix of this operator (the set, or argmin f).
    double distance_to_fixed_set(const Point& x) const;
    std::string describe() const;

    friend bool operator==(const Operator&, const Operator&) = default;

private:
    Operator(Space space, Kind kind) : space_(space), kind_(std::move(kind)) {}

    Space space_;
    Kind kind_;
};

/// The product S_m ... S_1, stored first-applied first.
class OperatorChain {
public:
    /// Throws EmptyInput for no factors, SpaceMismatch naming the first
    /// factor whose space differs from factor 0.
    explicit OperatorChain(std::vector<Operator> factors);

    const Space& space() const noexcept { return space_; }
    std::span<const Operator> factors() const noexcept { return factors_; }
    std::size_t size() const noexcept { return factors_.size(); }

private:
    Space space_;
    std::vector<Operator> factors_;
};

struct ChainImage {
    Point image;
    /// d(y_{k-1}, S_k y_{k-1}) for the partial images y_0 = x, y_k = S_k y_{k-1}.
    std::vector<double> factor_residuals;
};

Point apply_chain(const OperatorChain& chain, const Point& x);
ChainImage apply_chain_traced(const OperatorChain& chain, const Point& x);

/// d(x, S x).
double residual(const OperatorChain& chain, const Point& x);

/// Stopping and logging controls for Picard iteration.
///
/// A record is settled when the chain residual and every per-factor residual
/// are <= residual_tol, so the iterate is (nearly) fixed by each factor and
/// not merely by the product. A run is Converged when a settled record has
/// chain residual exactly zero (the orbit is constant), or when the last
/// `tail_window` logged records are settled and each of the `tail_window`
/// consecutive logged steps has length <= step_tol.
struct IterationConfig {
    std::size_t max_iter = 100000;
    double residual_tol = 1e-10;
    double step_tol = 1e-10;
    std::size_t log_every = 1;
    std::size_t tail_window = 10;

    /// Throws DomainError on non-positive values.
    void validate() const;

    friend bool operator==(const IterationConfig&, const IterationConfig&) = default;
};

enum class RunStatus { Converged, MaxIterReached };

const char* to_string(RunStatus status);

/// Logged Picard orbit. Entry k describes iterate x_{iterations[k]}; the
/// first entry is x_0 and the last is the final iterate.
struct Trace {
    Space space;
    std::vector<std::size_t> iterations;
    std::vector<Point> iterates;
    std::vector<double> residuals;
    std::vector<std::vector<double>> per_factor_residuals;
    RunStatus status = RunStatus::MaxIterReached;
    std::size_t iterations_used = 0;
    std::size_t log_every = 1;

    const Point& final_iterate() const { return iterates.back(); }
    double final_residual() const { return residuals.back(); }
};

/// x_{n+1} = S x_n from x0 until the stopping rule holds or max_iter is hit.
/// Non-convergence is reported through the status, never thrown.
Trace picard(const OperatorChain& chain, const Point& x0, const IterationConfig& cfg);

/// Independent Picard runs, one per starting point.
std::vector<Trace> picard_batch(const OperatorChain& chain, std::span<const Point> starts,
                                const IterationConfig& cfg, ExecPolicy policy = ExecPolicy::Parallel);

struct FejerResult {
    bool monotone = true;
    /// Index k of the first logged pair (k, k+1) with d(x_{k+1}, q) > d(x_k, q) + tol.
    std::optional<std::size_t> first_violation;
    /// min over pairs of d(x_k, q) - d(x_{k+1}, q).
    double worst_margin = 0.0;
};

FejerResult fejer_check(const Trace& trace, const Point& q, double tol = kGeoTol);

}  // namespace hadfix
