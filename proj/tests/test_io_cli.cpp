#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "hadfix/cli.hpp"
#include "hadfix/io.hpp"

using namespace hadfix;
namespace fs = std::filesystem;

namespace {

const fs::path kProblems = HADFIX_EXAMPLES_DIR;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("hadfix_test_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

struct CliResult {
    int code;
    std::string out, err;
};

CliResult call(std::vector<std::string> args) {
    args.insert(args.begin(), "hadfix");
    std::vector<char*> argv;
    for (std::string& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string expect_parse_error(const std::string& text) {
    try {
        (void)io::parse_problem(text);
    } catch (const ParseError& e) {
        return e.path();
    }
    ADD_FAILURE() << "no ParseError for " << text;
    return {};
}

// Last CSV row's final column.
double last_residual(const std::string& csv) {
    const std::size_t end = csv.find_last_of('\n', csv.size() - 2);
    const std::string row = csv.substr(end + 1);
    return std::stod(row.substr(row.find_last_of(',') + 1));
}

const char* kTwoBalls = R"({"space": {"kind": "euclidean", "dim": 2},
  "problem": {"kind": "feasibility", "sets": [
    {"type": "ball", "center": [0, 0], "radius": 1},
    {"type": "ball", "center": [1, 0], "radius": -1}]},
  "x0": [2, 2]})";

}  // namespace

TEST(ProblemJson, ShippedFilesRoundTrip) {
    std::size_t seen = 0;
    for (const auto& entry : fs::directory_iterator(kProblems)) {
        if (entry.path().extension() != ".json") continue;
        SCOPED_TRACE(entry.path().string());
        const ProblemSpec spec = io::load_problem(entry.path());
        const ProblemSpec back = io::parse_problem(io::to_json(spec).dump());
        EXPECT_EQ(spec, back);
        ++seen;
    }
    EXPECT_GE(seen, 6u);
}

TEST(ProblemJson, RandomSpecsRoundTrip) {
    Rng rng(77);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (const Space& space : suite_spaces(SuiteSelector::All)) {
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<ConvexSet> sets;
            sets.push_back(ConvexSet::ball(random_point(space, rng), u(rng)));
            sets.push_back(ConvexSet::segment(random_point(space, rng), random_point(space, rng)));
            if (space.kind() == SpaceKind::Euclidean) {
                const Point n = random_point(space, rng);
                sets.push_back(ConvexSet::halfspace(space.dim(), {n.coords().begin(), n.coords().end()}, u(rng)));
            }
            const std::vector<ConvexFunction> fs{ConvexFunction::sq_distance(random_point(space, rng), u(rng)),
                                                 ConvexFunction::distance(random_point(space, rng)),
                                                 ConvexFunction::indicator(sets[0]),
                                                 ConvexFunction::sq_distance_to_set(sets[1])};
            IterationConfig cfg;
            cfg.max_iter = 1 + rep;
            cfg.residual_tol = u(rng) * 1e-9;
            cfg.tail_window = 3;
            const std::vector<ProblemSpec> specs{
                {space, problem::Feasibility{sets}, random_point(space, rng), cfg, random_point(space, rng)},
                {space, problem::SumMinimization{fs, {u(rng), u(rng), u(rng), u(rng)}}, random_point(space, rng), cfg,
                 std::nullopt},
                {space, problem::MultiLambda{fs[rep % 4], {u(rng), u(rng)}}, random_point(space, rng), cfg,
                 std::nullopt}};
            for (const ProblemSpec& s : specs) EXPECT_EQ(io::parse_problem(io::to_json(s).dump()), s);
        }
    }
}

TEST(ProblemJson, ErrorsCarryFieldPaths) {
    EXPECT_EQ(expect_parse_error(R"({"problem": {"kind": "feasibility", "sets": []}, "x0": [0]})"), "$.space");
    EXPECT_EQ(expect_parse_error(kTwoBalls), "$.problem.sets[1].radius");
    EXPECT_EQ(expect_parse_error(R"({"space": {"kind": "torus", "dim": 2}})"), "$.space.kind");
    EXPECT_EQ(expect_parse_error(R"({"space": {"kind": "euclidean", "dim": 2},
        "problem": {"kind": "feasibility", "sets": [{"type": "ball", "center": [0, 0], "radius": 1}]},
        "x0": [0, 0], "config": {"max_iter": 0}})"),
              "$.config.max_iter");
    // Hyperboloid points are time-first and must lie on the upper sheet.
    EXPECT_EQ(expect_parse_error(R"({"space": {"kind": "hyperboloid", "dim": 2},
        "problem": {"kind": "feasibility", "sets": [{"type": "ball", "center": [1, 0, 0], "radius": 1}]},
        "x0": [1, 1, 1]})"),
              "$.x0");
}

TEST(ProblemJson, MalformedJsonReportsPosition) {
    try {
        (void)io::parse_problem("{\n  \"space\": {\"kind\": \"euclidean\",,\n}");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("malformed JSON"), std::string::npos) << e.what();
    }
}

TEST(ProblemJson, WrongDimensionIsSpaceMismatchWithFactor) {
    const char* text = R"({"space": {"kind": "euclidean", "dim": 2},
      "problem": {"kind": "feasibility", "sets": [
        {"type": "ball", "center": [0, 0], "radius": 1},
        {"type": "ball", "center": [0, 0, 0], "radius": 1}]},
      "x0": [0, 0]})";
    try {
        (void)io::parse_problem(text);
        FAIL();
    } catch (const SpaceMismatch& e) {
        ASSERT_TRUE(e.factor().has_value());
        EXPECT_EQ(*e.factor(), 1u);
        EXPECT_NE(std::string(e.what()).find("$.problem.sets[1].center"), std::string::npos) << e.what();
    }
    const char* leg = R"({"space": {"kind": "euclidean", "dim": 2},
      "problem": {"kind": "sum_min", "lambdas": [1],
                  "functions": [{"type": "indicator", "set": {"type": "spider_leg", "leg": 1}}]},
      "x0": [0, 0]})";
    try {
        (void)io::parse_problem(leg);
        FAIL();
    } catch (const SpaceMismatch& e) {
        EXPECT_EQ(e.factor().value_or(99), 0u);
    }
}

TEST(TraceCsv, HeaderAndRoundTripDigits) {
    const OperatorChain chain({Operator::resolvent(ConvexFunction::sq_distance(Point::euclidean({0.0, 0.0})),
                                                   Lambda(1.0 / 3.0))});
    IterationConfig cfg;
    cfg.max_iter = 3;
    const Trace t = picard(chain, Point::euclidean({0.1, 1.0 / 7.0}), cfg);
    const std::string csv = io::trace_csv(t);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "iter,coord_0,coord_1,residual");
    std::istringstream rows(csv);
    std::string line;
    std::getline(rows, line);
    for (std::size_t k = 0; std::getline(rows, line); ++k) {
        std::vector<double> fields;
        std::istringstream cells(line);
        for (std::string c; std::getline(cells, c, ',');) fields.push_back(std::stod(c));
        ASSERT_EQ(fields.size(), 4u);
        EXPECT_EQ(fields[0], static_cast<double>(t.iterations[k]));
        EXPECT_EQ(fields[1], t.iterates[k].coords()[0]);
        EXPECT_EQ(fields[2], t.iterates[k].coords()[1]);
        EXPECT_EQ(fields[3], t.residuals[k]);
    }
    EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
}

TEST(WriteAtomic, ReplacesContentsWithoutLeftovers) {
    const fs::path dir = scratch("atomic");
    io::write_atomic(dir / "a.txt", "first");
    io::write_atomic(dir / "a.txt", "second");
    EXPECT_EQ(slurp(dir / "a.txt"), "second");
    EXPECT_EQ(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}), 1);
    EXPECT_ANY_THROW(io::write_atomic(dir / "missing" / "a.txt", "x"));
    fs::remove_all(dir);
}

TEST(Cli, RunConvergesAndWritesArtifacts) {
    const fs::path dir = scratch("run");
    const CliResult r = call({"run", (kProblems / "two_lines.json").string(), "--out", dir.string()});
    EXPECT_EQ(r.code, 0) << r.err;
    const io::Json manifest = io::Json::parse(r.out);
    EXPECT_EQ(manifest["status"], "converged");
    EXPECT_EQ(manifest["exit_code"], 0);
    for (const char* f : {"trace.csv", "trace.json", "report.json"}) EXPECT_TRUE(fs::exists(dir / f)) << f;
    EXPECT_LE(last_residual(slurp(dir / "trace.csv")), 1e-10);
    const io::Json report = io::Json::parse(slurp(dir / "report.json"));
    EXPECT_TRUE(report["hypothesis_verified"].get<bool>());
    fs::remove_all(dir);
}

TEST(Cli, DisjointExitsTwoWithNote) {
    const fs::path dir = scratch("disjoint");
    const CliResult r = call({"run", (kProblems / "disjoint_balls.json").string(), "--out", dir.string()});
    EXPECT_EQ(r.code, 2);
    const io::Json report = io::Json::parse(slurp(dir / "report.json"));
    EXPECT_EQ(report["status"], "max_iter_reached");
    EXPECT_FALSE(report["hypothesis_verified"].get<bool>());
    EXPECT_NE(report["hypothesis_note"].get<std::string>().find("did not converge"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Cli, InputErrorsExitOne) {
    const fs::path dir = scratch("bad");
    io::write_atomic(dir / "bad.json", kTwoBalls);
    CliResult r = call({"run", (dir / "bad.json").string(), "--out", dir.string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("$.problem.sets[1].radius"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(dir / "trace.csv"));

    io::write_atomic(dir / "mixed.json", R"({"space": {"kind": "euclidean", "dim": 2},
      "problem": {"kind": "feasibility", "sets": [
        {"type": "ball", "center": [0, 0], "radius": 1},
        {"type": "halfspace", "normal": [1, 0, 0], "offset": 0}]},
      "x0": [0, 0]})");
    r = call({"run", (dir / "mixed.json").string(), "--out", dir.string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("space mismatch"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("(factor 1)"), std::string::npos) << r.err;

    r = call({"run", (dir / "nope.json").string()});
    EXPECT_EQ(r.code, 1);
    r = call({"run", (kProblems / "two_lines.json").string(), "--out", dir.string(), "--x0", "[1, 2, 3]"});
    EXPECT_EQ(r.code, 1);
    r = call({"frobnicate"});
    EXPECT_EQ(r.code, 1);
    fs::remove_all(dir);
}

TEST(Cli, OverridesApply) {
    const fs::path dir = scratch("override");
    const CliResult r = call({"run", (kProblems / "two_lines.json").string(), "--out", dir.string(), "--max-iter",
                              "3", "--x0", "[0, 0]"});
    EXPECT_EQ(r.code, 0) << r.err;
    const io::Json trace = io::Json::parse(slurp(dir / "trace.json"));
    // The origin is already fixed, so no step is taken.
    EXPECT_EQ(trace["iterations_used"], 0);
    EXPECT_EQ(trace["records"][0]["point"], io::Json::parse("[0.0, 0.0]"));
    const CliResult capped =
        call({"run", (kProblems / "two_lines.json").string(), "--out", dir.string(), "--max-iter", "3"});
    EXPECT_EQ(capped.code, 2);
    fs::remove_all(dir);
}

TEST(Cli, OutDirFromEnvironment) {
    const fs::path dir = scratch("env");
    ::setenv(cli::kOutDirEnv, dir.string().c_str(), 1);
    const CliResult r = call({"run", (kProblems / "spider_leg_ball.json").string()});
    ::unsetenv(cli::kOutDirEnv);
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir / "report.json"));
    fs::remove_all(dir);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
    const fs::path a = scratch("rep_a"), b = scratch("rep_b");
    for (const char* problem : {"h2_two_balls.json", "sum_min.json"}) {
        ASSERT_EQ(call({"run", (kProblems / problem).string(), "--out", a.string()}).code, 0);
        ASSERT_EQ(call({"run", (kProblems / problem).string(), "--out", b.string()}).code, 0);
        for (const char* f : {"trace.csv", "trace.json", "report.json"}) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Cli, VerifySubsetIsDeterministic) {
    const fs::path dir = scratch("verify");
    const CliResult r1 = call({"verify", "euclidean", "--samples", "40", "--seed", "5", "--out",
                               (dir / "v.json").string()});
    const CliResult r2 = call({"verify", "euclidean", "--samples", "40", "--seed", "5"});
    EXPECT_EQ(r1.code, 0) << r1.err;
    EXPECT_EQ(r1.out, r2.out);
    EXPECT_EQ(slurp(dir / "v.json"), r1.out);
    const io::Json bundle = io::Json::parse(r1.out);
    EXPECT_TRUE(bundle["all_as_expected"].get<bool>());
    for (const io::Json& rep : bundle["reports"])
        EXPECT_EQ(rep["space"].get<std::string>().rfind("euclidean", 0), 0u);
    EXPECT_EQ(call({"verify", "sphere"}).code, 1);
    fs::remove_all(dir);
}

TEST(Cli, BinaryRuns) {
    const fs::path dir = scratch("binary");
    const std::string cmd = std::string(HADFIX_CLI_PATH) + " run " + (kProblems / "multi_lambda.json").string() +
                            " --out " + dir.string() + " > " + (dir / "stdout.txt").string();
    const int status = std::system(cmd.c_str());
    EXPECT_EQ(WEXITSTATUS(status), 0);
    EXPECT_TRUE(fs::exists(dir / "trace.csv"));
    EXPECT_EQ(WEXITSTATUS(std::system((std::string(HADFIX_CLI_PATH) + " --version > /dev/null").c_str())), 0);
    fs::remove_all(dir);
}
