#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "hadfix/problems.hpp"
#include "hadfix/verify.hpp"

namespace hadfix::io {

using Json = nlohmann::json;

/// %.17g; enough digits to round-trip any double.
std::string format_double(double v);

Json to_json(const Space& space);
Json to_json(const Point& p);
Json to_json(const ConvexSet& set);
Json to_json(const ConvexFunction& f);
Json to_json(const IterationConfig& cfg);
Json to_json(const ProblemSpec& spec);
Json to_json(const Trace& trace);
Json to_json(const ProblemReport& report);
Json to_json(const CheckReport& report);

// Decoders report failures as ParseError carrying the field path ("$.problem.sets[1].radius").
Space space_from_json(const Json& j, const std::string& path);
Point point_from_json(const Json& j, const Space& space, const std::string& path);
ConvexSet set_from_json(const Json& j, const Space& space, const std::string& path);
ConvexFunction function_from_json(const Json& j, const Space& space, const std::string& path);
IterationConfig config_from_json(const Json& j, const std::string& path);
ProblemSpec problem_from_json(const Json& j);

/// Parses problem-file text; syntax errors carry line and column.
ProblemSpec parse_problem(std::string_view text);
ProblemSpec load_problem(const std::filesystem::path& file);

/// iter,coord_0,...,coord_k,residual with a header row.
std::string trace_csv(const Trace& trace);

/// Writes through a temporary sibling and renames it into place.
void write_atomic(const std::filesystem::path& file, std::string_view contents);

}  // namespace hadfix::io
