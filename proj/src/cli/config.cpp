#include "flywheel/cli/config.hpp"

#include "flywheel/errors.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace flywheel::cli {

namespace {

using nlohmann::json;

struct Location {
    std::size_t line = 1;
    std::size_t column = 1;
};

Location locate(std::string_view text, std::size_t byte) {
    Location loc;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++loc.line;
            loc.column = 1;
        } else {
            ++loc.column;
        }
    }
    return loc;
}

// Reads a section, rejecting unknown keys so typos surface as errors.
class Section {
public:
    Section(const json& root, std::string name, std::set<std::string> known, std::string_view source)
        : name_(std::move(name)), source_(source) {
        if (!root.contains(name_)) {
            return;
        }
        node_ = &root.at(name_);
        if (!node_->is_object()) {
            fail(name_, "expected an object");
        }
        for (const auto& item : node_->items()) {
            if (!known.contains(item.key())) {
                fail(name_ + "." + item.key(), "unknown field");
            }
        }
    }

    bool number(const char* key, double& out, bool positive = false, bool non_negative = false) const {
        const json* v = find(key);
        if (!v) {
            return false;
        }
        if (!v->is_number()) {
            fail(path(key), "expected a number");
        }
        out = v->get<double>();
        if (positive && !(out > 0.0)) {
            fail(path(key), "must be positive");
        }
        if (non_negative && !(out >= 0.0)) {
            fail(path(key), "must be non-negative");
        }
        return true;
    }

    template <class Int>
    void integer(const char* key, Int& out, long long minimum) const {
        const json* v = find(key);
        if (!v) {
            return;
        }
        if (!v->is_number_integer()) {
            fail(path(key), "expected an integer");
        }
        const long long value = v->get<long long>();
        if (value < minimum) {
            fail(path(key), "must be at least " + std::to_string(minimum));
        }
        out = static_cast<Int>(value);
    }

    // A number applies to every variable; an array gives one value per variable.
    void bounds(const char* key, std::vector<double>& out, std::size_t n) const {
        const json* v = find(key);
        if (!v) {
            return;
        }
        if (v->is_number()) {
            out.assign(n, v->get<double>());
            return;
        }
        if (!v->is_array() || v->size() != n) {
            fail(path(key), "expected a number or an array of " + std::to_string(n) + " numbers");
        }
        out.clear();
        for (const auto& e : *v) {
            if (!e.is_number()) {
                fail(path(key), "array entries must be numbers");
            }
            out.push_back(e.get<double>());
        }
    }

    template <class Enum>
    void choice(const char* key, Enum& out, std::initializer_list<std::pair<const char*, Enum>> options) const {
        const json* v = find(key);
        if (!v) {
            return;
        }
        std::string allowed;
        if (v->is_string()) {
            for (const auto& [label, value] : options) {
                if (v->get<std::string>() == label) {
                    out = value;
                    return;
                }
            }
        }
        for (const auto& [label, value] : options) {
            allowed += allowed.empty() ? "" : ", ";
            allowed += std::string("\"") + label + "\"";
        }
        fail(path(key), "expected one of " + allowed);
    }

    [[noreturn]] void fail(const std::string& field, const std::string& message) const {
        throw ConfigError(std::string(source_) + ": " + field + ": " + message);
    }

private:
    const json* find(const char* key) const {
        if (!node_ || !node_->contains(key)) {
            return nullptr;
        }
        return &node_->at(key);
    }
    std::string path(const char* key) const { return name_ + "." + key; }

    std::string name_;
    std::string_view source_;
    const json* node_ = nullptr;
};

} // namespace

RunConfig parse_config(std::string_view text, std::string_view source) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const Location loc = locate(text, e.byte > 0 ? e.byte - 1 : 0);
        std::ostringstream msg;
        msg << source << ":" << loc.line << ":" << loc.column << ": JSON syntax error: " << e.what();
        throw ConfigError(msg.str());
    }
    if (!root.is_object()) {
        throw ConfigError(std::string(source) + ": top level must be a JSON object");
    }
    for (const auto& item : root.items()) {
        static const std::set<std::string> sections{"material", "design", "optimizer", "solver"};
        if (!sections.contains(item.key())) {
            throw ConfigError(std::string(source) + ": " + item.key() + ": unknown section");
        }
    }

    RunConfig cfg;
    FlywheelSpec& spec = cfg.spec;

    const Section material(root, "material", {"density_kg_m3", "elastic_modulus_gpa", "poisson_ratio"}, source);
    material.number("density_kg_m3", spec.density, true);
    if (double gpa = 0.0; material.number("elastic_modulus_gpa", gpa, true)) {
        spec.elastic_modulus = gpa * 1e9;
    }
    material.number("poisson_ratio", spec.poisson_ratio, false, true);
    if (!(spec.poisson_ratio < 0.5)) {
        material.fail("material.poisson_ratio", "must be below 0.5");
    }

    const Section design(root, "design",
                         {"control_points", "inner_radius_m", "outer_radius_m", "angular_velocity_rad_s",
                          "max_mass_kg", "allowable_stress_n_mm2"},
                         source);
    design.integer("control_points", spec.n_control_points, 4);
    design.number("inner_radius_m", spec.inner_radius, true);
    design.number("outer_radius_m", spec.outer_radius, true);
    if (!(spec.outer_radius > spec.inner_radius)) {
        design.fail("design.outer_radius_m", "must exceed inner_radius_m");
    }
    design.number("angular_velocity_rad_s", spec.angular_velocity, true);
    design.number("max_mass_kg", spec.max_mass, true);
    if (double n_mm2 = 0.0; design.number("allowable_stress_n_mm2", n_mm2, true)) {
        spec.allowable_stress = n_mm2 * 1e6;
    }

    const std::size_t n = static_cast<std::size_t>(spec.n_control_points);
    ProblemConfig& problem = cfg.problem;
    problem.lower_bounds.assign(n, 0.01);
    problem.upper_bounds.assign(n, 0.06);
    const Section opt(root, "optimizer",
                      {"lower_bound", "upper_bound", "penalty_constant", "penalty_form", "population_size",
                       "max_iterations", "max_stall_generations", "function_tolerance", "seed", "random_draws",
                       "threads"},
                      source);
    opt.bounds("lower_bound", problem.lower_bounds, n);
    opt.bounds("upper_bound", problem.upper_bounds, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(problem.lower_bounds[i] > 0.0)) {
            opt.fail("optimizer.lower_bound", "thickness bounds must be positive");
        }
        if (!(problem.lower_bounds[i] <= problem.upper_bounds[i])) {
            opt.fail("optimizer.upper_bound", "must not be below lower_bound (variable " + std::to_string(i + 1) + ")");
        }
    }
    opt.number("penalty_constant", problem.penalty_constant, true);
    opt.choice("penalty_form", problem.penalty_form,
               {{"per_constraint", PenaltyForm::per_constraint}, {"exponent", PenaltyForm::exponent}});
    opt.integer("population_size", problem.population_size, 2);
    opt.integer("max_iterations", problem.max_iterations, 0);
    opt.integer("max_stall_generations", problem.max_stall_generations, 1);
    opt.number("function_tolerance", problem.function_tolerance, true);
    opt.integer("seed", problem.random_seed, 0);
    opt.choice("random_draws", problem.random_draws,
               {{"per_candidate", RandomDraws::per_candidate}, {"per_variable", RandomDraws::per_variable}});
    problem.threads = 0;
    opt.integer("threads", problem.threads, 0);

    const Section solver(root, "solver", {"step", "boundary_stencil"}, source);
    solver.number("step", cfg.solver.step, true);
    solver.choice("boundary_stencil", cfg.solver.boundary,
                  {{"second_order", BoundaryStencil::second_order}, {"first_order", BoundaryStencil::first_order}});

    const double span = spec.n_control_points - 3.0;
    const double intervals = span / cfg.solver.step;
    if (std::abs(intervals - std::round(intervals)) > 1e-9 * intervals || std::round(intervals) < 2.0) {
        solver.fail("solver.step", "must divide the parameter span " + std::to_string(span) +
                                       " into an integer number (>= 2) of intervals");
    }

    try {
        spec.validate();
        problem.validate(n);
    } catch (const ParameterError& e) {
        throw ConfigError(std::string(source) + ": " + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.string());
}

std::string dump_config(const RunConfig& config) {
    const FlywheelSpec& s = config.spec;
    const ProblemConfig& p = config.problem;
    json doc;
    doc["material"] = {{"density_kg_m3", s.density},
                       {"elastic_modulus_gpa", s.elastic_modulus / 1e9},
                       {"poisson_ratio", s.poisson_ratio}};
    doc["design"] = {{"control_points", s.n_control_points},
                     {"inner_radius_m", s.inner_radius},
                     {"outer_radius_m", s.outer_radius},
                     {"angular_velocity_rad_s", s.angular_velocity},
                     {"max_mass_kg", s.max_mass},
                     {"allowable_stress_n_mm2", s.allowable_stress / 1e6}};
    doc["optimizer"] = {
        {"lower_bound", p.lower_bounds},
        {"upper_bound", p.upper_bounds},
        {"penalty_constant", p.penalty_constant},
        {"penalty_form", p.penalty_form == PenaltyForm::exponent ? "exponent" : "per_constraint"},
        {"population_size", p.population_size},
        {"max_iterations", p.max_iterations},
        {"max_stall_generations", p.max_stall_generations},
        {"function_tolerance", p.function_tolerance},
        {"seed", p.random_seed},
        {"random_draws", p.random_draws == RandomDraws::per_variable ? "per_variable" : "per_candidate"},
        {"threads", p.threads},
    };
    doc["solver"] = {
        {"step", config.solver.step},
        {"boundary_stencil",
         config.solver.boundary == BoundaryStencil::first_order ? "first_order" : "second_order"},
    };
    return doc.dump(2) + "\n";
}

} // namespace flywheel::cli
