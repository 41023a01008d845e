#include "hadfix/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "detail.hpp"

namespace hadfix {

using detail::overloaded;

Operator Operator::projection(ConvexSet set) {
    const Space space = set.space();
    return {space, op::Projection{std::move(set)}};
}

Operator Operator::resolvent(ConvexFunction f, Lambda lambda) {
    const Space space = f.space();
    return {space, op::Resolvent{std::move(f), lambda}};
}

Point Operator::apply(const Point& x) const {
    return std::visit(overloaded{
                          [&](const op::Projection& p) { return hadfix::project(p.set, x); },
                          [&](const op::Resolvent& r) { return hadfix::resolvent(r.function, r.lambda, x); },
                      },
                      kind_);
}

double Operator::distance_to_fixed_set(const Point& x) const {
    return std::visit(overloaded{
                          [&](const op::Projection& p) { return distance(x, project(p.set, x)); },
                          [&](const op::Resolvent& r) { return distance_to_argmin(r.function, x); },
                      },
                      kind_);
}

std::string Operator::describe() const {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const op::Projection& p) { os << "P[" << to_string(p.set.kind()) << "]"; },
                   [&](const op::Resolvent& r) {
                       os << "R[" << to_string(r.function.kind()) << ", lambda=" << r.lambda.value() << "]";
                   },
               },
               kind_);
    return os.str();
}

OperatorChain::OperatorChain(std::vector<Operator> factors)
    : space_(factors.empty() ? Space::euclidean(1) : factors.front().space()), factors_(std::move(factors)) {
    if (factors_.empty()) throw EmptyInput("operator chain needs at least one factor");
    for (std::size_t i = 1; i < factors_.size(); ++i)
        if (!(factors_[i].space() == space_))
            throw SpaceMismatch("chain factor lives in " + factors_[i].space().name() + ", chain in " + space_.name(),
                                i);
}

ChainImage apply_chain_traced(const OperatorChain& chain, const Point& x) {
    require_same_space(chain.space(), x.space(), "apply_chain");
    ChainImage out{x, {}};
    out.factor_residuals.reserve(chain.size());
    for (const Operator& s : chain.factors()) {
        Point next = s.apply(out.image);
        out.factor_residuals.push_back(distance(out.image, next));
        out.image = std::move(next);
    }
    return out;
}

Point apply_chain(const OperatorChain& chain, const Point& x) {
    require_same_space(chain.space(), x.space(), "apply_chain");
    Point y = x;
    for (const Operator& s : chain.factors()) y = s.apply(y);
    return y;
}

double residual(const OperatorChain& chain, const Point& x) { return distance(x, apply_chain(chain, x)); }

void IterationConfig::validate() const {
    if (max_iter == 0) throw DomainError("max_iter must be positive");
    if (!(residual_tol > 0.0) || !std::isfinite(residual_tol)) throw DomainError("residual_tol must be > 0");
    if (!(step_tol > 0.0) || !std::isfinite(step_tol)) throw DomainError("step_tol must be > 0");
    if (log_every == 0) throw DomainError("log_every must be positive");
    if (tail_window == 0) throw DomainError("tail_window must be positive");
}

const char* to_string(RunStatus status) {
    return status == RunStatus::Converged ? "converged" : "max_iter_reached";
}

namespace {

double worst_factor(const std::vector<double>& factor_residuals) {
    double w = 0.0;
    for (double r : factor_residuals) w = std::max(w, r);
    return w;
}

// Record k certifies a common fixed point: the chain and every factor barely move it.
bool record_settled(const Trace& tr, std::size_t k, double tol) {
    return tr.residuals[k] <= tol && worst_factor(tr.per_factor_residuals[k]) <= tol;
}

bool tail_settled(const Trace& tr, const IterationConfig& cfg) {
    const std::size_t w = cfg.tail_window;
    const std::size_t n = tr.iterates.size();
    if (n < w + 1) return false;
    for (std::size_t k = n - w; k < n; ++k) {
        if (!record_settled(tr, k, cfg.residual_tol)) return false;
        if (distance(tr.iterates[k - 1], tr.iterates[k]) > cfg.step_tol) return false;
    }
    return true;
}

}  // namespace

Trace picard(const OperatorChain& chain, const Point& x0, const IterationConfig& cfg) {
    require_same_space(chain.space(), x0.space(), "picard");
    cfg.validate();

    Trace tr{chain.space(), {}, {}, {}, {}, RunStatus::MaxIterReached, 0, cfg.log_every};
    Point x = x0;
    for (std::size_t n = 0;; ++n) {
        ChainImage step = apply_chain_traced(chain, x);
        const double r = distance(x, step.image);
        const bool exact = r == 0.0 && worst_factor(step.factor_residuals) <= cfg.residual_tol;
        const bool last = n == cfg.max_iter;
        if (n % cfg.log_every == 0 || exact || last) {
            tr.iterations.push_back(n);
            tr.iterates.push_back(x);
            tr.residuals.push_back(r);
            tr.per_factor_residuals.push_back(std::move(step.factor_residuals));
            if (exact || tail_settled(tr, cfg)) {
                tr.status = RunStatus::Converged;
                tr.iterations_used = n;
                return tr;
            }
        }
        if (last) {
            tr.iterations_used = n;
            return tr;
        }
        x = std::move(step.image);
    }
}

std::vector<Trace> picard_batch(const OperatorChain& chain, std::span<const Point> starts,
                                const IterationConfig& cfg, ExecPolicy policy) {
    std::vector<std::optional<Trace>> slots(starts.size());
    for_each_index(starts.size(), policy, [&](std::size_t i) { slots[i] = picard(chain, starts[i], cfg); });
    std::vector<Trace> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

FejerResult fejer_check(const Trace& trace, const Point& q, double tol) {
    require_same_space(trace.space, q.space(), "fejer_check");
    FejerResult res;
    double prev = trace.iterates.empty() ? 0.0 : distance(trace.iterates.front(), q);
    for (std::size_t k = 0; k + 1 < trace.iterates.size(); ++k) {
        const double next = distance(trace.iterates[k + 1], q);
        const double margin = prev - next;
        if (k == 0 || margin < res.worst_margin) res.worst_margin = margin;
        if (margin < -tol && res.monotone) {
            res.monotone = false;
            res.first_violation = k;
        }
        prev = next;
    }
    return res;
}

}  // namespace hadfix
