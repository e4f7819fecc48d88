#include "flywheel/cli/app.hpp"
#include "flywheel/cli/config.hpp"
#include "flywheel/cli/report.hpp"
#include "flywheel/errors.hpp"

#include "doctest.h"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace flywheel;
using namespace flywheel::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kJayaX = "0.0296,0.01,0.01,0.01,0.01,0.01,0.0226,0.06";

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("flywheel_test_" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }
    fs::path write(const std::string& name, const std::string& text) const {
        const fs::path p = path_ / name;
        std::ofstream(p, std::ios::binary) << text;
        return p;
    }

private:
    fs::path path_;
};

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_app(args, out, err);
    return {code, out.str(), err.str()};
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        lines.push_back(line);
    }
    return lines;
}

std::string default_config_text() { return dump_config(RunConfig{}); }

} // namespace

TEST_SUITE("cli") {

TEST_CASE("empty config keeps every default") {
    const RunConfig cfg = parse_config("{}");
    const RunConfig ref;
    CHECK(cfg.spec.density == ref.spec.density);
    CHECK(cfg.spec.allowable_stress == 6.4e6);
    CHECK(cfg.spec.elastic_modulus == 210e9);
    CHECK(cfg.problem.lower_bounds == std::vector<double>(8, 0.01));
    CHECK(cfg.problem.upper_bounds == std::vector<double>(8, 0.06));
    CHECK(cfg.solver.step == 0.01);
    CHECK(cfg.solver.boundary == BoundaryStencil::second_order);
}

TEST_CASE("units are converted on read") {
    const RunConfig cfg = parse_config(R"({"material": {"elastic_modulus_gpa": 100},
                                           "design": {"allowable_stress_n_mm2": 5}})");
    CHECK(cfg.spec.elastic_modulus == doctest::Approx(100e9));
    CHECK(cfg.spec.allowable_stress == doctest::Approx(5e6));
}

TEST_CASE("config round trip") {
    RunConfig cfg;
    cfg.spec.angular_velocity = 70.0;
    cfg.problem.population_size = 77;
    cfg.problem.random_seed = 12345;
    cfg.problem.upper_bounds[3] = 0.05;
    cfg.problem.penalty_form = PenaltyForm::exponent;
    cfg.problem.random_draws = RandomDraws::per_variable;
    cfg.solver.boundary = BoundaryStencil::first_order;
    cfg.solver.step = 0.005;
    const RunConfig back = parse_config(dump_config(cfg));
    CHECK(back.spec.angular_velocity == 70.0);
    CHECK(back.spec.allowable_stress == cfg.spec.allowable_stress);
    CHECK(back.spec.elastic_modulus == cfg.spec.elastic_modulus);
    CHECK(back.problem.population_size == 77);
    CHECK(back.problem.random_seed == 12345);
    CHECK(back.problem.upper_bounds == cfg.problem.upper_bounds);
    CHECK(back.problem.penalty_form == PenaltyForm::exponent);
    CHECK(back.problem.random_draws == RandomDraws::per_variable);
    CHECK(back.solver.boundary == BoundaryStencil::first_order);
    CHECK(back.solver.step == 0.005);
}

TEST_CASE("shipped config parses to the defaults") {
    const RunConfig cfg = load_config(fs::path(FLYWHEEL_SOURCE_DIR) / "configs" / "thresher.json");
    const RunConfig ref;
    CHECK(cfg.spec.density == ref.spec.density);
    CHECK(cfg.spec.angular_velocity == ref.spec.angular_velocity);
    CHECK(cfg.spec.allowable_stress == ref.spec.allowable_stress);
    CHECK(cfg.problem.population_size == 1000);
    CHECK(cfg.problem.max_iterations == 500);
}

TEST_CASE("config errors name the problem") {
    auto message = [](std::string_view text) {
        try {
            parse_config(text, "cfg.json");
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message("{\n  \"design\": {,}\n}").find("cfg.json:2:") != std::string::npos);
    CHECK(message(R"({"desing": {}})").find("desing") != std::string::npos);
    CHECK(message(R"({"design": {"inner_radius": 0.1}})").find("design.inner_radius") != std::string::npos);
    CHECK(message(R"({"design": {"inner_radius_m": "a"}})").find("inner_radius_m") != std::string::npos);
    CHECK_FALSE(message(R"({"design": {"inner_radius_m": 0.6}})").empty());
    CHECK_FALSE(message(R"({"material": {"density_kg_m3": -1}})").empty());
    CHECK_FALSE(message(R"({"optimizer": {"lower_bound": 0.07}})").empty());
    CHECK_FALSE(message(R"({"optimizer": {"upper_bound": [0.06, 0.06]}})").empty());
    CHECK_FALSE(message(R"({"optimizer": {"penalty_form": "quadratic"}})").empty());
    CHECK_FALSE(message(R"({"solver": {"step": 0.03}})").empty());
    CHECK_FALSE(message("[]").empty());
    CHECK_THROWS_AS(load_config("/nonexistent/flywheel.json"), ConfigError);
}

TEST_CASE("thickness list parsing") {
    CHECK(parse_thickness_list("0.1, 0.2 ,0.3") == std::vector<double>{0.1, 0.2, 0.3});
    CHECK_THROWS_AS(parse_thickness_list(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_thickness_list("0.1,,0.2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_thickness_list("0.1,abc"), std::invalid_argument);
    CHECK_THROWS_AS(parse_thickness_list("0.1,"), std::invalid_argument);
}

TEST_CASE("number formatting round-trips") {
    for (double v : {0.1, 40854.76, 6.4e6, -1e-300, 1.0 / 3.0}) {
        CHECK(std::stod(format_number(v)) == v);
    }
}

TEST_CASE("sha256 of a known file") {
    TempDir dir;
    const fs::path p = dir.write("abc.txt", "abc");
    CHECK(file_sha256(p) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli({}).code == kUsageError);
    CHECK(run_cli({"frobnicate"}).code == kUsageError);
    CHECK(run_cli({"evaluate", "--x", kJayaX}).code == kUsageError);
    CHECK(run_cli({"--help"}).code == kOk);

    TempDir dir;
    const auto cfg = dir.write("c.json", default_config_text()).string();
    CHECK(run_cli({"evaluate", "--config", cfg, "--x", "0.02,0.02"}).code == kUsageError);
    CHECK(run_cli({"evaluate", "--config", cfg, "--x", "0.02,x"}).code == kUsageError);
}

TEST_CASE("config errors exit with code 3") {
    TempDir dir;
    const auto bad = dir.write("bad.json", R"({"design": {"speed": 1}})").string();
    const Outcome o = run_cli({"evaluate", "--config", bad, "--x", kJayaX});
    CHECK(o.code == kConfigError);
    CHECK(o.err.find("design.speed") != std::string::npos);
    CHECK(run_cli({"evaluate", "--config", (dir.path() / "missing.json").string(), "--x", kJayaX}).code ==
          kConfigError);
}

TEST_CASE("evaluate prints the design report") {
    TempDir dir;
    const auto cfg = dir.write("c.json", default_config_text()).string();
    const Outcome o = run_cli({"evaluate", "--config", cfg, "--x", "0.02,0.02,0.02,0.02,0.02,0.02,0.02,0.02"});
    REQUIRE(o.code == kOk);
    CHECK(o.out.find("mass_kg = 112.24") != std::string::npos);
    CHECK(o.out.find("kinetic_energy_J = 30483.6") != std::string::npos);
    CHECK(o.out.find("g1_mass_kg = -2.75") != std::string::npos);
    CHECK(o.out.find("feasible = false") != std::string::npos);
    CHECK(o.out.find("(VIOLATED)") != std::string::npos);
    CHECK(o.err.empty());
}

TEST_CASE("evaluate warns about out-of-bound designs but still reports") {
    TempDir dir;
    const auto cfg = dir.write("c.json", default_config_text()).string();
    const Outcome o = run_cli({"evaluate", "--config", cfg, "--x", "0.08,0.02,0.02,0.02,0.02,0.02,0.02,0.02"});
    CHECK(o.code == kOk);
    CHECK(o.err.find("warning: t1") != std::string::npos);
}

TEST_CASE("negative thickness is a numerical failure") {
    TempDir dir;
    const auto cfg = dir.write("c.json", default_config_text()).string();
    const Outcome o = run_cli({"evaluate", "--config", cfg, "--x", "0.02,0.02,-0.05,-0.05,0.02,0.02,0.02,0.02"});
    CHECK(o.code == kNumericalError);
    CHECK(o.err.find("thickness") != std::string::npos);
}

TEST_CASE("analyze writes one CSV row per node") {
    TempDir dir;
    const auto cfg = dir.write("c.json", default_config_text()).string();
    const Outcome o = run_cli({"analyze", "--config", cfg, "--x", kJayaX});
    REQUIRE(o.code == kOk);
    const auto lines = lines_of(o.out);
    REQUIRE(lines.size() == 502);
    CHECK(lines[0] == "u,r_m,t_m,Z_N,sigma_r_Pa,sigma_theta_Pa,sigma_vm_Pa");
    CHECK(lines[1].rfind("0,0.059999999999999998,0.029600000000000001,", 0) == 0);

    const auto csv = dir.path() / "s.csv";
    const auto svg = dir.path() / "s.svg";
    REQUIRE(run_cli({"analyze", "--config", cfg, "--x", kJayaX, "--out", csv.string(), "--svg", svg.string()}).code ==
            kOk);
    CHECK(read_file(csv) == o.out);
    CHECK(read_file(svg).find("<svg") != std::string::npos);
    CHECK(run_cli({"analyze", "--config", cfg, "--x", kJayaX, "--out", (dir.path() / "no/dir/x.csv").string()})
              .code == kIoError);
}

TEST_CASE("optimize writes a complete, self-consistent result set") {
    TempDir dir;
    RunConfig small;
    small.problem.population_size = 40;
    small.problem.max_iterations = 40;
    small.problem.threads = 1;
    const auto cfg = dir.write("small.json", dump_config(small));
    const auto out_dir = dir.path() / "run";
    const Outcome o = run_cli({"optimize", "--config", cfg.string(), "--seed", "3", "--out", out_dir.string()});
    REQUIRE(o.code == kOk);
    CHECK(o.out.find("stop_reason = ") != std::string::npos);

    for (const char* name : {"summary.json", "convergence.csv", "profile.csv", "stress.csv", "stress.svg",
                             "manifest.json"}) {
        CAPTURE(name);
        CHECK(fs::exists(out_dir / name));
    }

    const json manifest = json::parse(read_file(out_dir / "manifest.json"));
    CHECK(manifest.at("seed") == 3);
    CHECK(manifest.at("tool_version") == kToolVersion);
    CHECK(manifest.at("config_digest").at("algorithm") == "sha256");
    CHECK(manifest.at("config_digest").at("value") == file_sha256(cfg));
    CHECK(manifest.at("outputs").size() == 6);
    CHECK_FALSE(manifest.at("started_at").get<std::string>().empty());

    const json summary = json::parse(read_file(out_dir / "summary.json"));
    CHECK(summary.at("seed") == 3);
    const auto x = summary.at("x").get<std::vector<double>>();
    REQUIRE(x.size() == 8);

    // Convergence history is non-increasing and ends at the reported objective.
    const auto conv = lines_of(read_file(out_dir / "convergence.csv"));
    REQUIRE(conv.size() >= 2);
    CHECK(conv[0] == "iteration,best_f");
    double prev = 1e300;
    double last = 0.0;
    for (std::size_t i = 1; i < conv.size(); ++i) {
        last = std::stod(conv[i].substr(conv[i].find(',') + 1));
        REQUIRE(last <= prev);
        prev = last;
    }
    CHECK(last == summary.at("objective").get<double>());

    // Profile endpoints carry the first and last thickness.
    const auto profile = lines_of(read_file(out_dir / "profile.csv"));
    REQUIRE(profile.size() == 202);
    CHECK(profile[0] == "u,r_m,t_m,t_neg_m");
    CHECK(profile[1] == "0,0.059999999999999998," + format_number(x.front()) + "," + format_number(-x.front()));

    // Re-evaluating the reported design reproduces the summary bit for bit.
    std::string x_text;
    for (std::size_t i = 0; i < x.size(); ++i) {
        x_text += (i ? "," : "") + format_number(x[i]);
    }
    const Outcome ev = run_cli({"evaluate", "--config", cfg.string(), "--x", x_text, "--json"});
    REQUIRE(ev.code == kOk);
    const json report = json::parse(ev.out);
    for (const char* key : {"mass_kg", "kinetic_energy_J", "max_von_mises_Pa", "objective"}) {
        CAPTURE(key);
        CHECK(report.at(key).get<double>() == summary.at(key).get<double>());
    }
}

} // TEST_SUITE
