#include "hadfix/problems.hpp"

#include <sstream>

#include "detail.hpp"

namespace hadfix {

using detail::overloaded;

FeasibilityChain build_feasibility(const std::vector<ConvexSet>& sets) {
    if (sets.empty()) throw EmptyInput("feasibility problem needs at least one set");
    std::vector<Operator> factors;
    bool compact = false;
    for (const ConvexSet& c : sets) {
        factors.push_back(Operator::projection(c));
        compact = compact || c.is_compact();
    }
    return {OperatorChain(std::move(factors)), compact};
}

OperatorChain build_sum_min(const std::vector<ConvexFunction>& functions, const std::vector<double>& lambdas) {
    if (functions.empty()) throw EmptyInput("sum minimization needs at least one function");
    if (lambdas.size() != functions.size())
        throw DomainError("sum minimization needs one lambda per function");
    std::vector<Operator> factors;
    for (std::size_t i = 0; i < functions.size(); ++i)
        factors.push_back(Operator::resolvent(functions[i], Lambda(lambdas[i])));
    return OperatorChain(std::move(factors));
}

OperatorChain build_multi_lambda(const ConvexFunction& f, const std::vector<double>& lambdas) {
    if (lambdas.empty()) throw EmptyInput("multi-lambda chain needs at least one lambda");
    std::vector<Operator> factors;
    for (double l : lambdas) factors.push_back(Operator::resolvent(f, Lambda(l)));
    return OperatorChain(std::move(factors));
}

FeasibilityChain build_chain(const ProblemSpec& spec) {
    FeasibilityChain built = std::visit(
        overloaded{
            [](const problem::Feasibility& p) { return build_feasibility(p.sets); },
            [](const problem::SumMinimization& p) {
                return FeasibilityChain{build_sum_min(p.functions, p.lambdas), false};
            },
            [](const problem::MultiLambda& p) {
                return FeasibilityChain{build_multi_lambda(p.function, p.lambdas), false};
            },
        },
        spec.kind);
    if (!(built.chain.space() == spec.space))
        throw SpaceMismatch("problem declares " + spec.space.name() + " but its operands live in " +
                                built.chain.space().name(),
                            0);
    require_same_space(spec.space, spec.x0.space(), "x0");
    if (spec.witness) require_same_space(spec.space, spec.witness->space(), "witness");
    return built;
}

ProblemReport run(const ProblemSpec& spec) {
    const FeasibilityChain built = build_chain(spec);
    const OperatorChain& chain = built.chain;

    Trace trace = picard(chain, spec.x0, spec.config);
    const Point limit = trace.final_iterate();

    std::vector<Membership> membership;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const Operator& s = chain.factors()[i];
        Membership m;
        m.factor = i;
        m.description = s.describe();
        m.fixed_residual = distance(limit, s.apply(limit));
        m.distance_to_fixed_set = s.distance_to_fixed_set(limit);
        m.member = m.distance_to_fixed_set <= 10.0 * spec.config.residual_tol;
        membership.push_back(std::move(m));
    }

    bool verified = false;
    std::ostringstream note;
    if (spec.witness) {
        std::optional<std::size_t> rejected;
        double gap = 0.0;
        for (std::size_t i = 0; i < chain.size() && !rejected; ++i) {
            gap = chain.factors()[i].distance_to_fixed_set(*spec.witness);
            if (gap > kGeoTol) rejected = i;
        }
        if (rejected) {
            note << "assumed: supplied witness is not a common fixed point (factor " << *rejected
                 << " at distance " << gap << ")";
        } else {
            verified = true;
            note << "verified via witness";
        }
    } else if (std::holds_alternative<problem::MultiLambda>(spec.kind)) {
        verified = true;
        note << "verified: argmin of a "
             << to_string(std::get<problem::MultiLambda>(spec.kind).function.kind()) << " function is nonempty";
    } else {
        note << "assumed: common fixed-point set not verified (no witness supplied)";
    }
    if (trace.status != RunStatus::Converged && verified)
        note << "; run did not converge within max_iter although a common fixed point exists (slow convergence)";
    else if (trace.status != RunStatus::Converged)
        note << "; run did not converge: the common fixed-point set may be empty (hypothesis violated)";

    return {std::move(trace), limit, std::move(membership), verified, note.str(), built.has_compact_factor};
}

}  // namespace hadfix
