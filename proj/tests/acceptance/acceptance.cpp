// Acceptance runs: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hadfix/cli.hpp"
#include "hadfix/io.hpp"

using namespace hadfix;
namespace fs = std::filesystem;

namespace {

const fs::path kProblems = HADFIX_EXAMPLES_DIR;

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (cond) return;
        ok = false;
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("hadfix_acceptance_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void require_report(Outcome& o, const CheckReport& r) {
    o.require(r.passed(), r.name + " on " + r.space + ": " + std::to_string(r.violations) + "/" +
                              std::to_string(r.samples) + " violations, worst margin " + fmt(r.worst_margin));
}

// A witness is trusted only if every factor fixes it.
bool verified_fixed(const OperatorChain& chain, const Point& q) {
    for (const Operator& s : chain.factors())
        if (distance(q, s.apply(q)) > kGeoTol) return false;
    return true;
}

Outcome geometry_suite() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    std::uint64_t seed = 1000;
    for (const Space& s : suite_spaces(SuiteSelector::All)) {
        const CheckReport cat0 = cat0_triangle_check(s, 10000, 10, ++seed);
        require_report(o, cat0);
        o.require(cat0.samples == 100000, "cat0 sample count on " + s.name());
        const CheckReport speed = geodesic_speed_check(s, 10000, ++seed);
        require_report(o, speed);
        o.require(speed.samples >= 10000, "speed sample count on " + s.name());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs < 30.0, "runtime " + fmt(secs) + " s exceeds 30 s");
    if (o.ok) o.detail = "6 spaces, 1e4 triangles x 10 pairs, 1e4 speed samples, " + fmt(secs) + " s";
    return o;
}

Outcome prox_oracle() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    std::uint64_t seed = 2000;
    double worst = 0.0;
    for (const Space& s : suite_spaces(SuiteSelector::All)) {
        for (FormKind form : {FormKind::SqDistance, FormKind::Distance, FormKind::Indicator, FormKind::SqDistanceToSet}) {
            const CheckReport r = prox_oracle_check(s, form, 1000, ++seed, ExecPolicy::Parallel, 1e-8);
            require_report(o, r);
            o.require(r.samples == 1000, "prox sample count");
            worst = std::min(worst, r.worst_margin);
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs < 60.0, "runtime " + fmt(secs) + " s exceeds 60 s");
    if (o.ok) o.detail = "4 forms x 6 spaces x 1e3 draws, worst objective gap " + fmt(-worst) + ", " + fmt(secs) + " s";
    return o;
}

Outcome identity() {
    Outcome o;
    std::uint64_t seed = 3000;
    std::size_t configs = 0;
    for (const Space& s : suite_spaces(SuiteSelector::All)) {
        const std::vector<OperatorChain> chains = reference_chains(s);
        o.require(chains.size() >= 5, "fewer than 5 chains on " + s.name());
        for (const OperatorChain& c : chains) {
            const CheckReport r = fixed_point_identity_check(c, 200, ++seed);
            require_report(o, r);
            o.require(r.note.find("superset samples: 0,") == std::string::npos,
                      "no verified common fixed point for " + r.name);
            ++configs;
        }
        const CheckReport neg = fixed_point_identity_check(disjoint_balls_chain(s), 200, ++seed);
        o.require(neg.note.find("empty intersection") != std::string::npos,
                  "disjoint control on " + s.name() + " did not report the empty intersection");
    }
    if (o.ok) o.detail = std::to_string(configs) + " chains, 0 violations; disjoint controls report empty intersection";
    return o;
}

ProblemSpec load(const char* name) { return io::load_problem(kProblems / name); }

void require_fejer(Outcome& o, const ProblemSpec& spec, const ProblemReport& r, const char* name) {
    if (!spec.witness) {
        o.require(false, std::string(name) + " has no witness");
        return;
    }
    const OperatorChain chain = build_chain(spec).chain;
    o.require(verified_fixed(chain, *spec.witness), std::string(name) + " witness is not fixed by every factor");
    const FejerResult f = fejer_check(r.trace, *spec.witness);
    o.require(f.monotone, std::string(name) + " Fejer violation");
}

Outcome convergence() {
    Outcome o;
    ProblemSpec spec = load("two_lines.json");
    const ProblemReport lines = run(spec);
    o.require(spec.x0 == Point::euclidean({3.0, 1.0}), "two_lines x0 is not (3, 1)");
    o.require(lines.trace.status == RunStatus::Converged, "two_lines did not converge");
    const double err = distance(lines.limit, Point::euclidean({0.0, 0.0}));
    o.require(err <= 1e-6, "two_lines limit off by " + fmt(err));
    o.require(lines.trace.iterations_used <= 10000, "two_lines used too many iterations");
    require_fejer(o, spec, lines, "two_lines");

    for (const char* name : {"h2_two_balls.json", "spider_leg_ball.json"}) {
        spec = load(name);
        const ProblemReport r = run(spec);
        o.require(r.trace.status == RunStatus::Converged, std::string(name) + " did not converge");
        for (const Membership& m : r.membership)
            o.require(m.distance_to_fixed_set <= 1e-6,
                      std::string(name) + " membership " + std::to_string(m.factor) + " = " + fmt(m.distance_to_fixed_set));
        require_fejer(o, spec, r, name);
    }
    if (o.ok)
        o.detail = "two_lines limit error " + fmt(err) + " in " + std::to_string(lines.trace.iterations_used) +
                   " iterations; H2 and spider memberships <= 1e-6; Fejer monotone";
    return o;
}

Outcome resolvent_chains() {
    Outcome o;
    ProblemSpec spec = load("multi_lambda.json");
    const ProblemReport ml = run(spec);
    const auto& m = std::get<problem::MultiLambda>(spec.kind);
    const auto& sq = std::get<form::SqDistance>(m.function.form());
    const Point& a = sq.anchor;
    o.require(ml.trace.status == RunStatus::Converged, "multi_lambda did not converge");
    const double err = distance(ml.limit, a);
    o.require(err <= 1e-8, "multi_lambda limit off by " + fmt(err));
    // Each cycle multiplies the distance to a by prod 1 / (1 + w lambda_i).
    double rate = 1.0;
    for (double l : m.lambdas) rate /= 1.0 + sq.weight * l;
    const double d0 = distance(spec.x0, a);
    double worst_rel = 0.0;
    for (std::size_t k = 0; k < ml.trace.iterates.size(); ++k) {
        const double expected = d0 * std::pow(rate, static_cast<double>(ml.trace.iterations[k]));
        if (expected < 1e-6) break;
        worst_rel = std::max(worst_rel, std::abs(distance(ml.trace.iterates[k], a) - expected) / expected);
    }
    o.require(worst_rel <= 1e-9, "multi_lambda departs from the geometric rate by " + fmt(worst_rel));

    spec = load("sum_min.json");
    const ProblemReport sm = run(spec);
    o.require(sm.trace.status == RunStatus::Converged, "sum_min did not converge");
    o.require(spec.witness && verified_fixed(build_chain(spec).chain, *spec.witness), "sum_min witness not verified");
    double worst = 0.0;
    for (const ConvexFunction& f : std::get<problem::SumMinimization>(spec.kind).functions) {
        const ConvexSet& c = std::get<form::SqDistanceToSet>(f.form()).set;
        worst = std::max(worst, distance(sm.limit, project(c, sm.limit)));
    }
    o.require(worst <= 1e-6, "sum_min limit is " + fmt(worst) + " from some C_i");
    if (o.ok)
        o.detail = "multi_lambda error " + fmt(err) + ", rate deviation " + fmt(worst_rel) + "; sum_min dist to sets " +
                   fmt(worst);
    return o;
}

Outcome compact_tail() {
    Outcome o;
    std::vector<ProblemSpec> specs;
    for (const char* name : {"h2_two_balls.json", "spider_leg_ball.json"}) specs.push_back(io::load_problem(kProblems / name));
    // Overlapping ball pairs in every suite space, started far away.
    Rng rng(6000);
    for (const Space& s : suite_spaces(SuiteSelector::All)) {
        for (int rep = 0; rep < 5; ++rep) {
            const ConvexSet first = ConvexSet::ball(random_point(s, rng), 1.0);
            const Point inner = sample_member(first, rng);
            const std::vector<ConvexSet> sets{first, ConvexSet::ball(inner, 0.75)};
            specs.push_back({s, problem::Feasibility{sets}, random_point(s, rng, 8.0), {}, inner});
        }
    }
    std::size_t runs = 0;
    for (const ProblemSpec& spec : specs) {
        const ProblemReport r = run(spec);
        o.require(r.compact_factor, "run without a compact factor");
        o.require(r.trace.status == RunStatus::Converged, "run on " + spec.space.name() + " did not converge");
        const CheckReport tc = tail_cauchy_check(r.trace, spec.config.step_tol);
        require_report(o, tc);
        ++runs;
    }
    if (o.ok) o.detail = std::to_string(runs) + " ball-factor feasibility runs pass tail_cauchy";
    return o;
}

Outcome negative_controls() {
    Outcome o;
    const std::vector<Point> zero{Point::euclidean({0.0})};
    auto doubling = [](const Point& x) { return Point::euclidean({2.0 * x.coords()[0]}); };
    const CheckReport q = quasi_nonexpansive_check("doubling_map", doubling, zero, 1000, 7000);
    o.require(!q.passed(), "doubling map passed quasi_nonexpansive_check");

    const fs::path dir = scratch("disjoint");
    const cli::RunManifest m = cli::cmd_run(kProblems / "disjoint_balls.json", dir, {});
    o.require(m.exit_code() == 2, "disjoint_balls exit code " + std::to_string(m.exit_code()));
    const ProblemReport r = run(io::load_problem(kProblems / "disjoint_balls.json"));
    const CheckReport rv = residual_vanishing_check(r.trace, 1e-10);
    o.require(!rv.passed(), "disjoint_balls passed residual_vanishing_check");
    fs::remove_all(dir);
    if (o.ok)
        o.detail = "doubling map " + std::to_string(q.violations) + "/" + std::to_string(q.samples) +
                   " violations; disjoint_balls exit 2, residual_vanishing worst margin " + fmt(rv.worst_margin);
    return o;
}

Outcome determinism() {
    Outcome o;
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(kProblems)) {
        if (entry.path().extension() != ".json") continue;
        const std::string stem = entry.path().stem().string();
        cli::cmd_run(entry.path(), a / stem, {});
        cli::cmd_run(entry.path(), b / stem, {});
        for (const char* f : {"trace.csv", "trace.json", "report.json"}) {
            o.require(slurp(a / stem / f) == slurp(b / stem / f), stem + "/" + f + " differs");
            ++files;
        }
    }
    const SuiteOptions opts{99, 100, ExecPolicy::Parallel};
    const std::string v1 = cli::cmd_verify(SuiteSelector::All, opts).to_json_text();
    const std::string v2 = cli::cmd_verify(SuiteSelector::All, opts).to_json_text();
    const std::string v3 = cli::cmd_verify(SuiteSelector::All, {99, 100, ExecPolicy::Serial}).to_json_text();
    o.require(v1 == v2, "verify bundle differs between runs");
    o.require(v1 == v3, "verify bundle differs between serial and parallel");
    fs::remove_all(a);
    fs::remove_all(b);
    if (o.ok) o.detail = std::to_string(files) + " run artifacts and the verify bundle are byte-identical";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"geometry suite", geometry_suite},
        {"prox oracle equivalence", prox_oracle},
        {"fixed-point identity", identity},
        {"feasibility convergence", convergence},
        {"resolvent chains", resolvent_chains},
        {"compact-factor tail", compact_tail},
        {"negative controls", negative_controls},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failures += o.ok ? 0 : 1;
        std::printf("%s %zu %s: %s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
