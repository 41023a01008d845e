#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hadfix/engine.hpp"

namespace hadfix {

namespace problem {

/// Find a point of C_1 ∩ ... ∩ C_m by cyclic projections.
struct Feasibility {
    std::vector<ConvexSet> sets;

    friend bool operator==(const Feasibility&, const Feasibility&) = default;
};

/// Minimize f_1 + ... + f_m by cycling resolvents; needs ∩ argmin f_i nonempty.
struct SumMinimization {
    std::vector<ConvexFunction> functions;
    std::vector<double> lambdas;

    friend bool operator==(const SumMinimization&, const SumMinimization&) = default;
};

/// Minimize one f by cycling resolvents with different step sizes.
struct MultiLambda {
    ConvexFunction function;
    std::vector<double> lambdas;

    friend bool operator==(const MultiLambda&, const MultiLambda&) = default;
};

}  // namespace problem

struct ProblemSpec {
    using Kind = std::variant<problem::Feasibility, problem::SumMinimization, problem::MultiLambda>;

    Space space;
    Kind kind;
    Point x0;
    IterationConfig config;
    /// Optional point claimed to lie in every factor's fixed set.
    std::optional<Point> witness;

    friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

struct FeasibilityChain {
    OperatorChain chain;
    /// Some factor is a compact set, so the orbit converges strongly.
    bool has_compact_factor = false;
};

FeasibilityChain build_feasibility(const std::vector<ConvexSet>& sets);
OperatorChain build_sum_min(const std::vector<ConvexFunction>& functions, const std::vector<double>& lambdas);
OperatorChain build_multi_lambda(const ConvexFunction& f, const std::vector<double>& lambdas);

/// Builds the chain for any problem kind, checking every operand against `space`.
FeasibilityChain build_chain(const ProblemSpec& spec);

struct Membership {
    std::size_t factor = 0;
    std::string description;
    /// d(limit, S_i limit)
    double fixed_residual = 0.0;
    /// Distance from the limit to Fix(S_i).
    double distance_to_fixed_set = 0.0;
    /// distance_to_fixed_set <= 10 * residual_tol
    bool member = false;
};

struct ProblemReport {
    Trace trace;
    Point limit;
    std::vector<Membership> membership;
    bool hypothesis_verified = false;
    std::string hypothesis_note;
    bool compact_factor = false;
};

ProblemReport run(const ProblemSpec& spec);

}  // namespace hadfix
