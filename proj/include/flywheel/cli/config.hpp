#pragma once

#include "flywheel/flywheel_model.hpp"
#include "flywheel/optimizer.hpp"
#include "flywheel/stress_solver.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace flywheel::cli {

/// Everything a command needs, loaded from one JSON document with the sections
/// `material`, `design`, `optimizer` and `solver`. Missing keys keep their defaults.
struct RunConfig {
    FlywheelSpec spec;
    ProblemConfig problem = ProblemConfig::with_uniform_bounds(8);
    SolverOptions solver;
};

/// Parses a config document. `source` only labels diagnostics.
/// Throws ConfigError naming the line/column (syntax) or the offending field.
RunConfig parse_config(std::string_view text, std::string_view source = "<config>");

RunConfig load_config(const std::filesystem::path& path);

/// The document that `parse_config` reads back into `config`.
std::string dump_config(const RunConfig& config);

} // namespace flywheel::cli
