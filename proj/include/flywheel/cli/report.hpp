#pragma once

#include "flywheel/bspline.hpp"
#include "flywheel/optimizer.hpp"
#include "flywheel/stress_solver.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace flywheel::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Shortest-round-trip decimal rendering ("%.17g"), '.' separator.
std::string format_number(double value);

/// Header: u,r_m,t_m,Z_N,sigma_r_Pa,sigma_theta_Pa,sigma_vm_Pa
void write_stress_csv(std::ostream& out, const StressField& field);

/// Header: iteration,best_f
void write_convergence_csv(std::ostream& out, const std::vector<double>& history);

/// Header: u,r_m,t_m,t_neg_m. `samples` evenly spaced parameter values over [0, S].
void write_profile_csv(std::ostream& out, const bspline::ProfileCurve& curve, int samples = 201);

/// Radial, tangential and Von-Mises stress (N/mm^2) against radius (mm).
void write_stress_svg(std::ostream& out, const StressField& field);

/// Hex SHA-256 of a file's bytes.
std::string file_sha256(const std::filesystem::path& path);

struct RunManifest {
    std::string config_digest;
    std::string tool_version = kToolVersion;
    std::uint64_t seed = 0;
    std::string started_at;
    std::string finished_at;
    std::vector<std::string> outputs;
};

void write_manifest(std::ostream& out, const RunManifest& manifest);

/// Current UTC time as ISO-8601.
std::string utc_timestamp();

} // namespace flywheel::cli
