#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hadfix/problems.hpp"
#include "hadfix/verify.hpp"

namespace hadfix::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kOutDirEnv = "HADFIX_OUT_DIR";

enum ExitCode : int { kConverged = 0, kInputError = 1, kMaxIterReached = 2 };

/// Command-line overrides applied on top of the problem file.
struct RunOverrides {
    std::optional<std::size_t> max_iter;
    /// Sets both residual_tol and step_tol.
    std::optional<double> tol;
    std::optional<double> residual_tol;
    std::optional<double> step_tol;
    /// Starting point as JSON text in the problem's point encoding.
    std::optional<std::string> x0;
};

struct RunManifest {
    std::filesystem::path input;
    std::filesystem::path out_dir;
    std::vector<std::string> artifacts;
    double wall_seconds = 0.0;
    std::string version = kVersion;
    RunStatus status = RunStatus::MaxIterReached;

    int exit_code() const noexcept { return status == RunStatus::Converged ? kConverged : kMaxIterReached; }
    std::string to_json_text() const;
};

/// Loads, runs and writes trace.csv, trace.json and report.json into out_dir.
/// Input problems surface as ParseError, SpaceMismatch, DomainError or EmptyInput.
RunManifest cmd_run(const std::filesystem::path& problem_file, const std::filesystem::path& out_dir,
                    const RunOverrides& overrides);

struct VerifyResult {
    std::vector<CheckReport> reports;
    bool all_as_expected = false;

    int exit_code() const noexcept { return all_as_expected ? 0 : 1; }
    std::string to_json_text() const;
};

VerifyResult cmd_verify(SuiteSelector selector, const SuiteOptions& opts);

/// Full command line; returns the process exit code.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace hadfix::cli
