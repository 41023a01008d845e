#include "hadfix/io.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "detail.hpp"

namespace hadfix::io {

using detail::overloaded;

namespace {

const Json& field(const Json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) throw ParseError(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(path + "." + key, "missing field");
    return *it;
}

const Json* optional_field(const Json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) throw ParseError(path, "expected an object");
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double number(const Json& j, const std::string& path) {
    if (!j.is_number()) throw ParseError(path, "expected a number");
    return j.get<double>();
}

long long integer(const Json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ParseError(path, "expected an integer");
    return j.get<long long>();
}

std::size_t positive_count(const Json& j, const std::string& path) {
    const long long v = integer(j, path);
    if (v <= 0) throw ParseError(path, "expected a positive integer");
    return static_cast<std::size_t>(v);
}

std::string text(const Json& j, const std::string& path) {
    if (!j.is_string()) throw ParseError(path, "expected a string");
    return j.get<std::string>();
}

std::vector<double> numbers(const Json& j, const std::string& path) {
    if (!j.is_array()) throw ParseError(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

const Json& array(const Json& j, const std::string& path) {
    if (!j.is_array()) throw ParseError(path, "expected an array");
    return j;
}

// Library validation failures become ParseErrors at the field being decoded.
template <typename F>
auto at_path(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(path, e.what());
    }
}

std::string indexed(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

// Tags a space mismatch inside operand i with its chain factor index.
template <typename F>
auto for_factor(std::size_t i, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const SpaceMismatch& e) {
        if (e.factor()) throw;
        throw SpaceMismatch(e.what(), i);
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Encoding
// ---------------------------------------------------------------------------

Json to_json(const Space& space) {
    switch (space.kind()) {
        case SpaceKind::Euclidean: return {{"kind", "euclidean"}, {"dim", space.dim()}};
        case SpaceKind::Hyperboloid: return {{"kind", "hyperboloid"}, {"dim", space.dim()}};
        case SpaceKind::Spider: return {{"kind", "spider"}, {"legs", space.legs()}};
    }
    return nullptr;
}

Json to_json(const Point& p) {
    if (p.space().kind() == SpaceKind::Spider) return {{"leg", p.leg()}, {"r", p.radius()}};
    const auto c = p.coords();
    return Json(std::vector<double>(c.begin(), c.end()));
}

Json to_json(const ConvexSet& set) {
    return std::visit(overloaded{
                          [](const shape::Ball& b) -> Json {
                              return {{"type", "ball"}, {"center", to_json(b.center)}, {"radius", b.radius}};
                          },
                          [](const shape::SpiderBall& b) -> Json {
                              return {{"type", "ball"}, {"center", to_json(b.center)}, {"radius", b.radius}};
                          },
                          [](const shape::Segment& s) -> Json {
                              return {{"type", "segment"}, {"a", to_json(s.a)}, {"b", to_json(s.b)}};
                          },
                          [](const shape::Halfspace& h) -> Json {
                              return {{"type", "halfspace"}, {"normal", h.normal}, {"offset", h.offset}};
                          },
                          [](const shape::SpiderLeg& l) -> Json { return {{"type", "spider_leg"}, {"leg", l.leg}}; },
                      },
                      set.shape());
}

Json to_json(const ConvexFunction& f) {
    return std::visit(
        overloaded{
            [](const form::SqDistance& g) -> Json {
                return {{"type", "sq_distance"}, {"anchor", to_json(g.anchor)}, {"weight", g.weight}};
            },
            [](const form::Distance& g) -> Json { return {{"type", "distance"}, {"anchor", to_json(g.anchor)}}; },
            [](const form::Indicator& g) -> Json { return {{"type", "indicator"}, {"set", to_json(g.set)}}; },
            [](const form::SqDistanceToSet& g) -> Json {
                return {{"type", "sq_distance_to_set"}, {"set", to_json(g.set)}};
            },
        },
        f.form());
}

Json to_json(const IterationConfig& cfg) {
    return {{"max_iter", cfg.max_iter},   {"residual_tol", cfg.residual_tol}, {"step_tol", cfg.step_tol},
            {"log_every", cfg.log_every}, {"tail_window", cfg.tail_window}};
}

Json to_json(const ProblemSpec& spec) {
    Json problem = std::visit(overloaded{
                                  [](const problem::Feasibility& p) -> Json {
                                      Json sets = Json::array();
                                      for (const auto& s : p.sets) sets.push_back(to_json(s));
                                      return {{"kind", "feasibility"}, {"sets", sets}};
                                  },
                                  [](const problem::SumMinimization& p) -> Json {
                                      Json fs = Json::array();
                                      for (const auto& f : p.functions) fs.push_back(to_json(f));
                                      return {{"kind", "sum_min"}, {"functions", fs}, {"lambdas", p.lambdas}};
                                  },
                                  [](const problem::MultiLambda& p) -> Json {
                                      return {{"kind", "multi_lambda"},
                                              {"function", to_json(p.function)},
                                              {"lambdas", p.lambdas}};
                                  },
                              },
                              spec.kind);
    Json j = {{"space", to_json(spec.space)},
              {"problem", problem},
              {"x0", to_json(spec.x0)},
              {"config", to_json(spec.config)}};
    if (spec.witness) j["witness"] = to_json(*spec.witness);
    return j;
}

Json to_json(const Trace& trace) {
    Json records = Json::array();
    for (std::size_t k = 0; k < trace.iterates.size(); ++k) {
        records.push_back({{"iter", trace.iterations[k]},
                           {"point", to_json(trace.iterates[k])},
                           {"residual", trace.residuals[k]},
                           {"per_factor_residuals", trace.per_factor_residuals[k]}});
    }
    return {{"space", to_json(trace.space)},
            {"status", to_string(trace.status)},
            {"iterations_used", trace.iterations_used},
            {"log_every", trace.log_every},
            {"records", records}};
}

Json to_json(const ProblemReport& report) {
    Json members = Json::array();
    for (const Membership& m : report.membership) {
        members.push_back({{"factor", m.factor},
                           {"operator", m.description},
                           {"fixed_residual", m.fixed_residual},
                           {"distance_to_fixed_set", m.distance_to_fixed_set},
                           {"member", m.member}});
    }
    return {{"status", to_string(report.trace.status)},
            {"iterations_used", report.trace.iterations_used},
            {"final_residual", report.trace.final_residual()},
            {"limit", to_json(report.limit)},
            {"membership", members},
            {"hypothesis_verified", report.hypothesis_verified},
            {"hypothesis_note", report.hypothesis_note},
            {"compact_factor", report.compact_factor}};
}

Json to_json(const CheckReport& r) {
    return {{"name", r.name},
            {"space", r.space},
            {"seed", r.seed},
            {"samples", r.samples},
            {"violations", r.violations},
            {"worst_margin", r.worst_margin},
            {"witness", Json::parse(r.witness)},
            {"note", r.note},
            {"negative_control", r.negative_control},
            {"passed", r.passed()},
            {"as_expected", r.as_expected()}};
}

// ---------------------------------------------------------------------------
// Decoding
// ---------------------------------------------------------------------------

Space space_from_json(const Json& j, const std::string& path) {
    const std::string kind = text(field(j, "kind", path), path + ".kind");
    if (kind == "euclidean" || kind == "hyperboloid") {
        const long long dim = integer(field(j, "dim", path), path + ".dim");
        return at_path(path + ".dim", [&] {
            return kind == "euclidean" ? Space::euclidean(static_cast<int>(dim))
                                       : Space::hyperboloid(static_cast<int>(dim));
        });
    }
    if (kind == "spider") {
        const long long legs = integer(field(j, "legs", path), path + ".legs");
        return at_path(path + ".legs", [&] { return Space::spider(static_cast<int>(legs)); });
    }
    throw ParseError(path + ".kind", "unknown space kind '" + kind + "'");
}

Point point_from_json(const Json& j, const Space& space, const std::string& path) {
    if (space.kind() == SpaceKind::Spider) {
        const long long leg = integer(field(j, "leg", path), path + ".leg");
        const double r = number(field(j, "r", path), path + ".r");
        return at_path(path, [&] { return Point::spider(space.legs(), static_cast<int>(leg), r); });
    }
    std::vector<double> c = numbers(j, path);
    if (c.size() != space.coord_count())
        throw SpaceMismatch(path + ": expected " + std::to_string(space.coord_count()) + " coordinates for " +
                                   space.name() + ", got " + std::to_string(c.size()));
    return at_path(path, [&] {
        return space.kind() == SpaceKind::Euclidean ? Point::euclidean(std::move(c)) : Point::hyperboloid(std::move(c));
    });
}

ConvexSet set_from_json(const Json& j, const Space& space, const std::string& path) {
    const std::string type = text(field(j, "type", path), path + ".type");
    if (type == "ball") {
        Point c = point_from_json(field(j, "center", path), space, path + ".center");
        const double r = number(field(j, "radius", path), path + ".radius");
        return at_path(path + ".radius", [&] { return ConvexSet::ball(std::move(c), r); });
    }
    if (type == "segment") {
        Point a = point_from_json(field(j, "a", path), space, path + ".a");
        Point b = point_from_json(field(j, "b", path), space, path + ".b");
        return ConvexSet::segment(std::move(a), std::move(b));
    }
    if (type == "halfspace") {
        if (space.kind() != SpaceKind::Euclidean)
            throw SpaceMismatch(path + ".type: halfspaces need a euclidean space, got " + space.name());
        std::vector<double> n = numbers(field(j, "normal", path), path + ".normal");
        if (n.size() != static_cast<std::size_t>(space.dim()))
            throw SpaceMismatch(path + ".normal: expected " + std::to_string(space.dim()) + " components for " +
                                space.name() + ", got " + std::to_string(n.size()));
        const double off = number(field(j, "offset", path), path + ".offset");
        return at_path(path, [&] { return ConvexSet::halfspace(space.dim(), std::move(n), off); });
    }
    if (type == "spider_leg") {
        if (space.kind() != SpaceKind::Spider)
            throw SpaceMismatch(path + ".type: spider_leg needs a spider space, got " + space.name());
        const long long leg = integer(field(j, "leg", path), path + ".leg");
        return at_path(path + ".leg", [&] { return ConvexSet::spider_leg(space.legs(), static_cast<int>(leg)); });
    }
    throw ParseError(path + ".type", "unknown set type '" + type + "'");
}

ConvexFunction function_from_json(const Json& j, const Space& space, const std::string& path) {
    const std::string type = text(field(j, "type", path), path + ".type");
    if (type == "sq_distance") {
        Point a = point_from_json(field(j, "anchor", path), space, path + ".anchor");
        double w = 1.0;
        if (const Json* wj = optional_field(j, "weight", path)) w = number(*wj, path + ".weight");
        return at_path(path + ".weight", [&] { return ConvexFunction::sq_distance(std::move(a), w); });
    }
    if (type == "distance") return ConvexFunction::distance(point_from_json(field(j, "anchor", path), space, path + ".anchor"));
    if (type == "indicator")
        return ConvexFunction::indicator(set_from_json(field(j, "set", path), space, path + ".set"));
    if (type == "sq_distance_to_set")
        return ConvexFunction::sq_distance_to_set(set_from_json(field(j, "set", path), space, path + ".set"));
    throw ParseError(path + ".type", "unknown function type '" + type + "'");
}

IterationConfig config_from_json(const Json& j, const std::string& path) {
    IterationConfig cfg;
    if (!j.is_object()) throw ParseError(path, "expected an object");
    if (const Json* v = optional_field(j, "max_iter", path)) cfg.max_iter = positive_count(*v, path + ".max_iter");
    if (const Json* v = optional_field(j, "residual_tol", path)) cfg.residual_tol = number(*v, path + ".residual_tol");
    if (const Json* v = optional_field(j, "step_tol", path)) cfg.step_tol = number(*v, path + ".step_tol");
    if (const Json* v = optional_field(j, "log_every", path)) cfg.log_every = positive_count(*v, path + ".log_every");
    if (const Json* v = optional_field(j, "tail_window", path))
        cfg.tail_window = positive_count(*v, path + ".tail_window");
    at_path(path, [&] {
        cfg.validate();
        return 0;
    });
    return cfg;
}

ProblemSpec problem_from_json(const Json& j) {
    const std::string root = "$";
    if (!j.is_object()) throw ParseError(root, "expected an object");
    const Space space = space_from_json(field(j, "space", root), "$.space");

    const Json& pj = field(j, "problem", root);
    const std::string pp = "$.problem";
    const std::string kind = text(field(pj, "kind", pp), pp + ".kind");
    ProblemSpec::Kind pk = problem::Feasibility{};
    if (kind == "feasibility") {
        problem::Feasibility f;
        const Json& sets = array(field(pj, "sets", pp), pp + ".sets");
        for (std::size_t i = 0; i < sets.size(); ++i)
            f.sets.push_back(for_factor(i, [&] { return set_from_json(sets[i], space, indexed(pp + ".sets", i)); }));
        if (f.sets.empty()) throw ParseError(pp + ".sets", "needs at least one set");
        pk = std::move(f);
    } else if (kind == "sum_min") {
        std::vector<ConvexFunction> fs;
        const Json& arr = array(field(pj, "functions", pp), pp + ".functions");
        for (std::size_t i = 0; i < arr.size(); ++i)
            fs.push_back(
                for_factor(i, [&] { return function_from_json(arr[i], space, indexed(pp + ".functions", i)); }));
        if (fs.empty()) throw ParseError(pp + ".functions", "needs at least one function");
        std::vector<double> lambdas = numbers(field(pj, "lambdas", pp), pp + ".lambdas");
        if (lambdas.size() != fs.size()) throw ParseError(pp + ".lambdas", "needs one lambda per function");
        for (std::size_t i = 0; i < lambdas.size(); ++i)
            at_path(indexed(pp + ".lambdas", i), [&] { return Lambda(lambdas[i]); });
        pk = problem::SumMinimization{std::move(fs), std::move(lambdas)};
    } else if (kind == "multi_lambda") {
        ConvexFunction f = function_from_json(field(pj, "function", pp), space, pp + ".function");
        std::vector<double> lambdas = numbers(field(pj, "lambdas", pp), pp + ".lambdas");
        if (lambdas.empty()) throw ParseError(pp + ".lambdas", "needs at least one lambda");
        for (std::size_t i = 0; i < lambdas.size(); ++i)
            at_path(indexed(pp + ".lambdas", i), [&] { return Lambda(lambdas[i]); });
        pk = problem::MultiLambda{std::move(f), std::move(lambdas)};
    } else {
        throw ParseError(pp + ".kind", "unknown problem kind '" + kind + "'");
    }

    Point x0 = point_from_json(field(j, "x0", root), space, "$.x0");
    IterationConfig cfg;
    if (const Json* c = optional_field(j, "config", root)) cfg = config_from_json(*c, "$.config");
    std::optional<Point> witness;
    if (const Json* w = optional_field(j, "witness", root)) witness = point_from_json(*w, space, "$.witness");
    return {space, std::move(pk), std::move(x0), cfg, std::move(witness)};
}

ProblemSpec parse_problem(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col), "malformed JSON");
    }
    return problem_from_json(j);
}

ProblemSpec load_problem(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ParseError(file.string(), "cannot open problem file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str());
}

std::string trace_csv(const Trace& trace) {
    std::string out = "iter";
    for (std::size_t i = 0; i < trace.space.coord_count(); ++i) out += ",coord_" + std::to_string(i);
    out += ",residual\n";
    for (std::size_t k = 0; k < trace.iterates.size(); ++k) {
        out += std::to_string(trace.iterations[k]);
        for (double c : trace.iterates[k].flat()) out += "," + format_double(c);
        out += "," + format_double(trace.residuals[k]) + "\n";
    }
    return out;
}

void write_atomic(const std::filesystem::path& file, std::string_view contents) {
    const std::filesystem::path tmp = file.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw Error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, file);
}

}  // namespace hadfix::io
