#include "selfsim/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

namespace selfsim {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T v{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ConfigError("invalid value '" + text + "' for key '" + key + "'");
    }
    return v;
}

// "1/480", or a decimal that is the exact reciprocal of an integer.
int parse_spacing(const std::string& text) {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        if (trim(text.substr(0, slash)) != "1") throw ConfigError("h must be written 1/N");
        return parse_number<int>("h", trim(text.substr(slash + 1)));
    }
    const double h = parse_number<double>("h", text);
    if (!(h > 0.0)) throw ConfigError("h must be positive");
    const double m = std::nearbyint(1.0 / h);
    if (std::abs(1.0 / m - h) > 1e-15 * h) throw ConfigError("h must be the reciprocal of an integer");
    return static_cast<int>(m);
}

}  // namespace

RunConfig parse_config(std::istream& in) {
    RunConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "h") c.cells_per_unit = parse_spacing(val);
        else if (key == "cells_per_unit") c.cells_per_unit = parse_number<int>(key, val);
        else if (key == "n_max") c.n_max = parse_number<int>(key, val);
        else if (key == "tol") c.tol = parse_number<double>(key, val);
        else if (key == "value_floor") c.value_floor = parse_number<double>(key, val);
        else if (key == "max_iterations") c.max_iterations = parse_number<int>(key, val);
        else if (key == "stencil") {
            if (val == "5" || val == "5-point") c.stencil = Stencil::FivePoint;
            else if (val == "9" || val == "9-point") c.stencil = Stencil::NinePoint;
            else throw ConfigError("stencil must be 5-point or 9-point");
        }
        else if (key == "omega") c.omega = parse_number<double>(key, val);
        else if (key == "corner_refinement") c.corner_refinement = parse_number<int>(key, val);
        else if (key == "epsilon") c.epsilon = parse_number<double>(key, val);
        else if (key == "line_samples") c.line_samples = parse_number<int>(key, val);
        else if (key == "radii_samples") c.radii_samples = parse_number<int>(key, val);
        else if (key == "slack") c.slack = parse_number<double>(key, val);
        else if (key == "inequality_samples") c.inequality_samples = parse_number<int>(key, val);
        else if (key == "domain_points") c.domain_points = parse_number<int>(key, val);
        else if (key == "square_points") c.square_points = parse_number<int>(key, val);
        else if (key == "boundary_points") c.boundary_points = parse_number<int>(key, val);
        else if (key == "axis_points") c.axis_points = parse_number<int>(key, val);
        else if (key == "circle_samples") c.circle_samples = parse_number<int>(key, val);
        else if (key == "annulus_samples") c.annulus_samples = parse_number<int>(key, val);
        else if (key == "majorant_levels") c.majorant_levels = parse_number<int>(key, val);
        else if (key == "output_dir") c.output_dir = val;
        else throw ConfigError("unknown key '" + key + "'");
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    return parse_config(in);
}

int lattice_multiple(int n_max) { return std::lcm(30 * (1 << n_max), 12); }

void validate(const RunConfig& c) {
    if (c.n_max < 0 || c.n_max > 10) throw ConfigError("n_max must lie in [0, 10]");
    if (c.cells_per_unit <= 0) throw ConfigError("h must be positive");
    // h <= (3/10) 2^-N / 4  <=>  3 m >= 40 2^N
    if (3LL * c.cells_per_unit < 40LL * (1LL << c.n_max)) {
        std::ostringstream os;
        os << "resolution bound violated: h = 1/" << c.cells_per_unit << " exceeds (3/10)*2^-" << c.n_max
           << "/4 = 3/" << 40 * (1 << c.n_max) << " (level-" << c.n_max << " squares need >= 8 cells per side)";
        throw ConfigError(os.str());
    }
    const int mult = lattice_multiple(c.n_max);
    if (c.cells_per_unit % mult != 0) {
        std::ostringstream os;
        os << "lattice alignment violated: 1/h = " << c.cells_per_unit << " must be a multiple of " << mult
           << " so that all square edges and the lines y = 2/3, 4/3 are lattice lines";
        throw ConfigError(os.str());
    }
    if (!(c.tol > 0.0)) throw ConfigError("tol must be positive");
    if (!(c.value_floor >= 0.0)) throw ConfigError("value_floor must be nonnegative");
    if (c.max_iterations <= 0) throw ConfigError("max_iterations must be positive");
    if (c.omega != 0.0 && !(c.omega > 0.0 && c.omega < 2.0)) throw ConfigError("omega must lie in (0, 2) or be 0");
    if (c.corner_refinement < 1) throw ConfigError("corner_refinement must be >= 1");
    if (!(c.epsilon > 0.0 && c.epsilon < std::numbers::pi / 4)) throw ConfigError("epsilon must lie in (0, pi/4)");
    if ((4.0 / (3.0 * c.epsilon)) * std::log(2.0) < 1.5) throw ConfigError("epsilon too large: window (4/(3 eps)) log 2 < 1.5");
    if (c.line_samples < 1 || c.radii_samples < 2) throw ConfigError("need line_samples >= 1 and radii_samples >= 2");
    if (!(c.slack >= 0.0 && c.slack < 1.0)) throw ConfigError("slack must lie in [0, 1)");
    if (c.circle_samples < 64) throw ConfigError("circle_samples must be >= 64");
    if (c.inequality_samples < 2 || c.domain_points < 0 || c.square_points < 0 || c.boundary_points < 0 ||
        c.axis_points < 0 || c.annulus_samples < 1) {
        throw ConfigError("sample counts must be positive");
    }
    if (c.majorant_levels < 0 || c.majorant_levels > c.n_max) throw ConfigError("majorant_levels must lie in [0, n_max]");
}

std::string canonical_text(const RunConfig& c) {
    std::ostringstream os;
    os << "h = 1/" << c.cells_per_unit << "\n"
       << "n_max = " << c.n_max << "\n"
       << "tol = " << format_double(c.tol) << "\n"
       << "value_floor = " << format_double(c.value_floor) << "\n"
       << "max_iterations = " << c.max_iterations << "\n"
       << "stencil = " << stencil_name(c.stencil) << "\n"
       << "omega = " << format_double(c.omega) << "\n"
       << "corner_refinement = " << c.corner_refinement << "\n"
       << "epsilon = " << format_double(c.epsilon) << "\n"
       << "line_samples = " << c.line_samples << "\n"
       << "radii_samples = " << c.radii_samples << "\n"
       << "slack = " << format_double(c.slack) << "\n"
       << "inequality_samples = " << c.inequality_samples << "\n"
       << "domain_points = " << c.domain_points << "\n"
       << "square_points = " << c.square_points << "\n"
       << "boundary_points = " << c.boundary_points << "\n"
       << "axis_points = " << c.axis_points << "\n"
       << "circle_samples = " << c.circle_samples << "\n"
       << "annulus_samples = " << c.annulus_samples << "\n"
       << "majorant_levels = " << c.majorant_levels << "\n";
    return os.str();
}

std::uint64_t config_hash(const RunConfig& c) {
    // FNV-1a, 64 bit
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical_text(c)) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

AssemblyOptions assembly_options(const RunConfig& c) {
    AssemblyOptions o;
    o.cells_per_unit = c.cells_per_unit;
    o.n_max = c.n_max;
    o.solver.tol = c.tol;
    o.solver.value_floor = c.value_floor;
    o.solver.max_iterations = c.max_iterations;
    o.solver.stencil = c.stencil;
    o.solver.omega = c.omega;
    o.corner_refinement = c.corner_refinement;
    return o;
}

}  // namespace selfsim
