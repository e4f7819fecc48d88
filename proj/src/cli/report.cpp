#include "flywheel/cli/report.hpp"

#include "flywheel/errors.hpp"

#include "json.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

namespace flywheel::cli {

std::string format_number(double value) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", value);
    return buf.data();
}

void write_stress_csv(std::ostream& out, const StressField& field) {
    out << "u,r_m,t_m,Z_N,sigma_r_Pa,sigma_theta_Pa,sigma_vm_Pa\n";
    for (std::size_t j = 0; j < field.size(); ++j) {
        out << format_number(field.u[j]) << ',' << format_number(field.radius[j]) << ','
            << format_number(field.thickness[j]) << ',' << format_number(field.z[j]) << ','
            << format_number(field.sigma_r[j]) << ',' << format_number(field.sigma_theta[j]) << ','
            << format_number(field.sigma_vm[j]) << '\n';
    }
}

void write_convergence_csv(std::ostream& out, const std::vector<double>& history) {
    out << "iteration,best_f\n";
    for (std::size_t i = 0; i < history.size(); ++i) {
        out << i << ',' << format_number(history[i]) << '\n';
    }
}

void write_profile_csv(std::ostream& out, const bspline::ProfileCurve& curve, int samples) {
    samples = std::max(samples, 2);
    out << "u,r_m,t_m,t_neg_m\n";
    for (int i = 0; i < samples; ++i) {
        const double u = i + 1 == samples ? curve.span() : curve.span() * i / (samples - 1);
        const bspline::Point p = curve.eval(u);
        out << format_number(u) << ',' << format_number(p.r) << ',' << format_number(p.t) << ','
            << format_number(-p.t) << '\n';
    }
}

void write_stress_svg(std::ostream& out, const StressField& field) {
    constexpr double width = 800.0, height = 500.0;
    constexpr double left = 70.0, right = 160.0, top = 30.0, bottom = 50.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    const double r_min = field.radius.front() * 1e3;
    const double r_max = field.radius.back() * 1e3;
    double s_min = 0.0, s_max = 0.0;
    for (const auto* series : {&field.sigma_r, &field.sigma_theta, &field.sigma_vm}) {
        for (double s : *series) {
            s_min = std::min(s_min, s / 1e6);
            s_max = std::max(s_max, s / 1e6);
        }
    }
    if (s_max - s_min <= 0.0) {
        s_max = s_min + 1.0;
    }
    auto px = [&](double r_mm) { return left + (r_mm - r_min) / (r_max - r_min) * plot_w; };
    auto py = [&](double s_mpa) { return top + (s_max - s_mpa) / (s_max - s_min) * plot_h; };

    out << std::fixed << std::setprecision(2);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double r = r_min + (r_max - r_min) * i / 5.0;
        const double s = s_min + (s_max - s_min) * i / 5.0;
        out << "<text x=\"" << px(r) << "\" y=\"" << height - bottom + 18 << "\" font-size=\"12\" "
            << "text-anchor=\"middle\">" << r << "</text>\n";
        out << "<text x=\"" << left - 6 << "\" y=\"" << py(s) + 4 << "\" font-size=\"12\" "
            << "text-anchor=\"end\">" << s << "</text>\n";
    }
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 8
        << "\" font-size=\"13\" text-anchor=\"middle\">radius (mm)</text>\n";
    out << "<text x=\"16\" y=\"" << top + plot_h / 2 << "\" font-size=\"13\" text-anchor=\"middle\" "
        << "transform=\"rotate(-90 16 " << top + plot_h / 2 << ")\">stress (N/mm&#178;)</text>\n";

    struct Series {
        const std::vector<double>* values;
        const char* colour;
        const char* label;
    };
    const std::array<Series, 3> series{{{&field.sigma_r, "#1f77b4", "radial"},
                                        {&field.sigma_theta, "#d62728", "tangential"},
                                        {&field.sigma_vm, "#2ca02c", "Von-Mises"}}};
    int row = 0;
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.colour << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t j = 0; j < field.size(); ++j) {
            out << px(field.radius[j] * 1e3) << ',' << py((*s.values)[j] / 1e6) << ' ';
        }
        out << "\"/>\n";
        const double ly = top + 20.0 + 20.0 * row++;
        out << "<line x1=\"" << width - right + 15 << "\" y1=\"" << ly << "\" x2=\"" << width - right + 45
            << "\" y2=\"" << ly << "\" stroke=\"" << s.colour << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << width - right + 52 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">" << s.label
            << "</text>\n";
    }
    out << "</svg>\n";
}

std::string file_sha256(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read " + path.string() + " for hashing");
    }
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 initialisation failed");
    }
    std::array<char, 8192> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) {
            EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
        }
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return hex.str();
}

void write_manifest(std::ostream& out, const RunManifest& manifest) {
    nlohmann::json doc{
        {"config_digest", {{"algorithm", "sha256"}, {"value", manifest.config_digest}}},
        {"tool_version", manifest.tool_version},
        {"seed", manifest.seed},
        {"started_at", manifest.started_at},
        {"finished_at", manifest.finished_at},
        {"outputs", manifest.outputs},
    };
    out << doc.dump(2) << '\n';
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::array<char, 32> buf{};
    std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf.data();
}

} // namespace flywheel::cli
