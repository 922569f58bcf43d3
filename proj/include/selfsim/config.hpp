#pragma once

// Flat `key = value` run configuration.

#include "selfsim/assembler.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace selfsim {

class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    int cells_per_unit = 480;  // h = 1 / cells_per_unit
    int n_max = 4;
    double tol = 1e-9;
    double value_floor = 1e-8;
    int max_iterations = 200000;
    Stencil stencil = Stencil::FivePoint;
    double omega = 0.0;
    int corner_refinement = 8;
    double epsilon = 0.4;
    int line_samples = 256;
    int radii_samples = 50;
    double slack = 0.1;
    int inequality_samples = 10000;
    int domain_points = 6000;
    int square_points = 2000;
    int boundary_points = 2000;
    int axis_points = 1000;
    int circle_samples = 64;
    int annulus_samples = 2000;
    int majorant_levels = 3;
    std::string output_dir = "selfsim_out";

    double h() const { return 1.0 / cells_per_unit; }
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

// Throws ConfigError naming the violated bound: resolution
// h <= (3/10) 2^-N_max / 4 and lattice alignment of every square edge.
void validate(const RunConfig& config);

// Smallest admissible multiple for 1/h at the given depth.
int lattice_multiple(int n_max);

// Canonical text (fixed key order, shortest round-trip numbers); the
// output directory is not part of it.
std::string canonical_text(const RunConfig& config);
std::uint64_t config_hash(const RunConfig& config);

AssemblyOptions assembly_options(const RunConfig& config);

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace selfsim
