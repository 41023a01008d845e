#include "hadfix/cli.hpp"

#include <chrono>
#include <cstdlib>

#include "CLI11.hpp"
#include "hadfix/io.hpp"

namespace hadfix::cli {

using io::Json;

std::string RunManifest::to_json_text() const {
    const Json j = {{"input", input.string()},
                    {"out_dir", out_dir.string()},
                    {"artifacts", artifacts},
                    {"wall_seconds", wall_seconds},
                    {"version", version},
                    {"seed", nullptr},
                    {"status", to_string(status)},
                    {"exit_code", exit_code()}};
    return j.dump(2);
}

RunManifest cmd_run(const std::filesystem::path& problem_file, const std::filesystem::path& out_dir,
                    const RunOverrides& overrides) {
    const auto start = std::chrono::steady_clock::now();
    ProblemSpec spec = io::load_problem(problem_file);
    if (overrides.max_iter) spec.config.max_iter = *overrides.max_iter;
    if (overrides.tol) spec.config.residual_tol = spec.config.step_tol = *overrides.tol;
    if (overrides.residual_tol) spec.config.residual_tol = *overrides.residual_tol;
    if (overrides.step_tol) spec.config.step_tol = *overrides.step_tol;
    if (overrides.x0) {
        Json j;
        try {
            j = Json::parse(*overrides.x0);
        } catch (const Json::parse_error&) {
            throw ParseError("--x0", "malformed JSON");
        }
        spec.x0 = io::point_from_json(j, spec.space, "--x0");
    }
    try {
        spec.config.validate();
    } catch (const DomainError& e) {
        throw ParseError("$.config", e.what());
    }

    const ProblemReport report = run(spec);

    std::filesystem::create_directories(out_dir);
    io::write_atomic(out_dir / "trace.csv", io::trace_csv(report.trace));
    io::write_atomic(out_dir / "trace.json", io::to_json(report.trace).dump(2) + "\n");
    io::write_atomic(out_dir / "report.json", io::to_json(report).dump(2) + "\n");

    RunManifest m;
    m.input = problem_file;
    m.out_dir = out_dir;
    m.artifacts = {"trace.csv", "trace.json", "report.json"};
    m.status = report.trace.status;
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return m;
}

std::string VerifyResult::to_json_text() const {
    Json arr = Json::array();
    for (const CheckReport& r : reports) arr.push_back(io::to_json(r));
    return Json{{"all_as_expected", all_as_expected}, {"reports", arr}}.dump(2);
}

VerifyResult cmd_verify(SuiteSelector selector, const SuiteOptions& opts) {
    VerifyResult v;
    v.reports = run_suite(selector, opts);
    v.all_as_expected = !v.reports.empty();
    for (const CheckReport& r : v.reports) v.all_as_expected = v.all_as_expected && r.as_expected();
    return v;
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fixed-point iteration of projection and resolvent chains on Hadamard model spaces"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    std::string problem_file;
    std::string out_dir;
    RunOverrides ov;
    std::size_t max_iter = 0;
    double tol = 0, residual_tol = 0, step_tol = 0;
    std::string x0;
    CLI::App* run_cmd = app.add_subcommand("run", "Run a problem file and write trace.csv, trace.json, report.json");
    run_cmd->add_option("file", problem_file, "Problem JSON file")->required();
    run_cmd->add_option("--out", out_dir, std::string("Output directory (default: $") + kOutDirEnv + " or .)");
    auto* o_max = run_cmd->add_option("--max-iter", max_iter, "Override config.max_iter");
    auto* o_tol = run_cmd->add_option("--tol", tol, "Override residual_tol and step_tol");
    auto* o_rtol = run_cmd->add_option("--residual-tol", residual_tol, "Override config.residual_tol");
    auto* o_stol = run_cmd->add_option("--step-tol", step_tol, "Override config.step_tol");
    auto* o_x0 = run_cmd->add_option("--x0", x0, "Override the starting point (JSON)");

    std::string selector = "all";
    SuiteOptions sopts;
    std::string report_file;
    CLI::App* verify_cmd = app.add_subcommand("verify", "Run the verification suite");
    verify_cmd->add_option("space", selector, "all, euclidean, hyperboloid or spider")
        ->check(CLI::IsMember({"all", "euclidean", "hyperboloid", "spider"}));
    verify_cmd->add_option("--seed", sopts.seed, "Base seed");
    verify_cmd->add_option("--samples", sopts.samples, "Base sample count")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--out", report_file, "Also write the bundle to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : kInputError;
    }

    if (run_cmd->parsed()) {
        if (*o_max) ov.max_iter = max_iter;
        if (*o_tol) ov.tol = tol;
        if (*o_rtol) ov.residual_tol = residual_tol;
        if (*o_stol) ov.step_tol = step_tol;
        if (*o_x0) ov.x0 = x0;
        if (out_dir.empty()) {
            const char* env = std::getenv(kOutDirEnv);
            out_dir = env && *env ? env : ".";
        }
        try {
            const RunManifest m = cmd_run(problem_file, out_dir, ov);
            out << m.to_json_text() << "\n";
            return m.exit_code();
        } catch (const ParseError& e) {
            err << "error: " << problem_file << ": " << e.what() << "\n";
        } catch (const SpaceMismatch& e) {
            err << "error: space mismatch: " << e.what() << "\n";
        } catch (const Error& e) {
            err << "error: " << e.what() << "\n";
        } catch (const std::filesystem::filesystem_error& e) {
            err << "error: " << e.what() << "\n";
        }
        return kInputError;
    }

    const VerifyResult v = cmd_verify(parse_selector(selector), sopts);
    const std::string text = v.to_json_text() + "\n";
    out << text;
    if (!report_file.empty()) io::write_atomic(report_file, text);
    for (const CheckReport& r : v.reports)
        if (!r.as_expected()) err << "unexpected: " << r.name << " on " << r.space << "\n";
    return v.exit_code();
}

}  // namespace hadfix::cli
