#include "flywheel/cli/app.hpp"

#include "flywheel/cli/config.hpp"
#include "flywheel/cli/report.hpp"
#include "flywheel/errors.hpp"
#include "flywheel/optimizer.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>

namespace flywheel::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    return out;
}

// Fields shared by the evaluate report and the optimize summary.
json evaluation_json(std::span<const double> x, const Evaluation& ev) {
    return json{
        {"x", std::vector<double>(x.begin(), x.end())},
        {"mass_kg", ev.mass},
        {"kinetic_energy_J", ev.kinetic_energy},
        {"max_von_mises_Pa", ev.max_stress},
        {"max_von_mises_N_mm2", ev.max_stress / 1e6},
        {"g1_mass_kg", ev.constraints.g1},
        {"g2_stress_Pa", ev.constraints.g2},
        {"mass_feasible", ev.constraints.g1 <= 0.0},
        {"stress_feasible", ev.constraints.g2 <= 0.0},
        {"objective", ev.objective},
    };
}

void print_evaluation(std::ostream& out, std::span<const double> x, const Evaluation& ev) {
    out << "x =";
    for (std::size_t i = 0; i < x.size(); ++i) {
        out << (i ? "," : " ") << format_number(x[i]);
    }
    out << '\n';
    out << "mass_kg = " << format_number(ev.mass) << '\n';
    out << "kinetic_energy_J = " << format_number(ev.kinetic_energy) << '\n';
    out << "max_von_mises_Pa = " << format_number(ev.max_stress) << '\n';
    out << "max_von_mises_N_mm2 = " << format_number(ev.max_stress / 1e6) << '\n';
    out << "g1_mass_kg = " << format_number(ev.constraints.g1) << (ev.constraints.g1 <= 0.0 ? " (ok)" : " (VIOLATED)")
        << '\n';
    out << "g2_stress_Pa = " << format_number(ev.constraints.g2)
        << (ev.constraints.g2 <= 0.0 ? " (ok)" : " (VIOLATED)") << '\n';
    out << "feasible = " << (ev.constraints.feasible() ? "true" : "false") << '\n';
    out << "objective = " << format_number(ev.objective) << '\n';
}

std::vector<double> checked_design(const RunConfig& cfg, const std::string& text, std::ostream& err) {
    std::vector<double> x = parse_thickness_list(text);
    const auto n = static_cast<std::size_t>(cfg.spec.n_control_points);
    if (x.size() != n) {
        throw std::invalid_argument("--x needs " + std::to_string(n) + " thickness values, got " +
                                    std::to_string(x.size()));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] < cfg.problem.lower_bounds[i] || x[i] > cfg.problem.upper_bounds[i]) {
            err << "warning: t" << i + 1 << " = " << format_number(x[i]) << " outside optimizer bounds ["
                << format_number(cfg.problem.lower_bounds[i]) << ", " << format_number(cfg.problem.upper_bounds[i])
                << "]\n";
        }
    }
    return x;
}

int cmd_evaluate(const std::string& config_path, const std::string& x_text, bool as_json, std::ostream& out,
                 std::ostream& err) {
    const RunConfig cfg = load_config(config_path);
    const std::vector<double> x = checked_design(cfg, x_text, err);
    const FlywheelProblem problem(cfg.spec, cfg.solver);
    const Evaluation ev = problem.evaluate(x, cfg.problem);
    if (as_json) {
        out << evaluation_json(x, ev).dump(2) << '\n';
    } else {
        print_evaluation(out, x, ev);
    }
    return kOk;
}

int cmd_analyze(const std::string& config_path, const std::string& x_text, const std::string& csv_path,
                const std::string& svg_path, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = load_config(config_path);
    const std::vector<double> x = checked_design(cfg, x_text, err);
    const StressField field = StressSolver(cfg.spec, cfg.solver).solve(x);
    if (csv_path.empty()) {
        write_stress_csv(out, field);
    } else {
        auto file = open_output(csv_path);
        write_stress_csv(file, field);
    }
    if (!svg_path.empty()) {
        auto file = open_output(svg_path);
        write_stress_svg(file, field);
    }
    return kOk;
}

int cmd_optimize(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out_dir,
                 std::ostream& out) {
    RunManifest manifest;
    manifest.started_at = utc_timestamp();
    RunConfig cfg = load_config(config_path);
    manifest.config_digest = file_sha256(config_path);
    if (seed) {
        cfg.problem.random_seed = *seed;
    }
    manifest.seed = cfg.problem.random_seed;

    const FlywheelProblem problem(cfg.spec, cfg.solver);
    const RunResult result = run(problem, cfg.problem);
    const Evaluation ev = problem.evaluate(result.best_x, cfg.problem);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
    }
    const fs::path dir(out_dir);

    json summary = evaluation_json(result.best_x, ev);
    summary["stop_reason"] = std::string(to_string(result.stop_reason));
    summary["iterations_run"] = result.iterations_run;
    summary["evaluations"] = result.evaluations;
    summary["seed"] = cfg.problem.random_seed;
    {
        auto f = open_output(dir / "summary.json");
        f << summary.dump(2) << '\n';
    }
    {
        auto f = open_output(dir / "convergence.csv");
        write_convergence_csv(f, result.history);
    }
    {
        auto f = open_output(dir / "profile.csv");
        write_profile_csv(f, make_profile(cfg.spec, result.best_x));
    }
    const StressField field = problem.solver().solve(result.best_x);
    {
        auto f = open_output(dir / "stress.csv");
        write_stress_csv(f, field);
    }
    {
        auto f = open_output(dir / "stress.svg");
        write_stress_svg(f, field);
    }
    manifest.outputs = {"summary.json", "convergence.csv", "profile.csv", "stress.csv", "stress.svg",
                        "manifest.json"};
    manifest.finished_at = utc_timestamp();
    {
        auto f = open_output(dir / "manifest.json");
        write_manifest(f, manifest);
    }

    print_evaluation(out, result.best_x, ev);
    out << "stop_reason = " << to_string(result.stop_reason) << '\n';
    out << "iterations_run = " << result.iterations_run << '\n';
    out << "evaluations = " << result.evaluations << '\n';
    out << "output_dir = " << dir.string() << '\n';
    return kOk;
}

} // namespace

std::vector<double> parse_thickness_list(const std::string& text) {
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        std::string token = text.substr(pos, comma - pos);
        token.erase(0, token.find_first_not_of(" \t"));
        token.erase(token.find_last_not_of(" \t") + 1);
        if (token.empty()) {
            throw std::invalid_argument("empty entry in thickness list \"" + text + "\"");
        }
        double v = 0.0;
        const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (ec != std::errc() || end != token.data() + token.size()) {
            throw std::invalid_argument("not a number in thickness list: \"" + token + "\"");
        }
        values.push_back(v);
        pos = comma + 1;
    }
    return values;
}

int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Flywheel cross-section optimizer: B-spline thickness profile, finite-difference stresses, Jaya search",
                 "flywheel"};
    app.require_subcommand(1);

    std::string config_path;
    std::string x_text;
    bool as_json = false;
    auto* evaluate = app.add_subcommand("evaluate", "Mass, kinetic energy, peak stress and feasibility of a design");
    evaluate->add_option("--config", config_path, "JSON config file")->required();
    evaluate->add_option("--x", x_text, "Comma-separated thicknesses t1,...,tn (m)")->required();
    evaluate->add_flag("--json", as_json, "Print the report as JSON");

    std::string csv_path;
    std::string svg_path;
    auto* analyze = app.add_subcommand("analyze", "Per-node stress field of a design as CSV");
    analyze->add_option("--config", config_path, "JSON config file")->required();
    analyze->add_option("--x", x_text, "Comma-separated thicknesses t1,...,tn (m)")->required();
    analyze->add_option("--out", csv_path, "CSV output file (default: stdout)");
    analyze->add_option("--svg", svg_path, "Also write an SVG stress plot");

    std::optional<std::uint64_t> seed;
    std::string out_dir;
    auto* optimize = app.add_subcommand("optimize", "Run the Jaya search and write result files");
    optimize->add_option("--config", config_path, "JSON config file")->required();
    optimize->add_option("--seed", seed, "Random seed (overrides optimizer.seed)");
    optimize->add_option("--out", out_dir, "Output directory")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    try {
        if (evaluate->parsed()) {
            return cmd_evaluate(config_path, x_text, as_json, out, err);
        }
        if (analyze->parsed()) {
            return cmd_analyze(config_path, x_text, csv_path, svg_path, out, err);
        }
        return cmd_optimize(config_path, seed, out_dir, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kIoError;
    } catch (const GeometryError& e) {
        err << "geometry error: " << e.what() << '\n';
        return kNumericalError;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kNumericalError;
    } catch (const DomainError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kNumericalError;
    } catch (const ParameterError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kNumericalError;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsageError;
    }
}

} // namespace flywheel::cli
