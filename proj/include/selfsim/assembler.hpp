#pragma once

// Builds the global potential on the strip |Im z| <= 4/3: the two perforated
// half-strip solutions, their constants, the self-similar extension into the
// squares, and the gluing across the real axis.

#include "selfsim/geometry.hpp"
#include "selfsim/grid.hpp"
#include "selfsim/laplace.hpp"

#include <cstddef>
#include <memory>
#include <vector>

namespace selfsim {

struct AssemblyOptions {
    int cells_per_unit = 480;
    int n_max = 4;
    SolverOptions solver{};
    // Normal derivatives skip this many lattice spacings next to corners.
    double corner_offset_cells = 2.0;
    int derivative_order = 2;
    // t = t_safety * inf(du/dn) / sup(dG/dn)
    double t_safety = 0.5;
    // The Green function is capped at its value on |w| = pole_cap_radius,
    // i.e. min(G, cap); the extension stays subharmonic and bounded.
    double pole_cap_radius = 0.05;
    // Lattice refinement of the windows around the two top corners of each
    // level-0 square (1 disables them). The window reaches
    // corner_window from the corner and ends on the line y = 4/3.
    int corner_refinement = 8;
    Rational corner_window{1, 12};
};

// Green function of the fundamental square with the pole cap applied.
struct CappedGreen {
    std::shared_ptr<const GreenFunction> green;
    double cap = 0.0;

    double operator()(Point w) const;
};

CappedGreen make_capped_green(std::shared_ptr<const GreenFunction> green, double cap_radius);

struct DerivativeBounds {
    double inf_du_dn = 0.0;  // outward from D0, corner-excluded
    double sup_dg_dn = 0.0;  // inward into the square, corner-excluded
};

struct HalfStripModel {
    Half half = Half::Upper;
    int n_max = 0;
    // Solution on the perforated period cell, in the frame 0 <= y <= 4/3
    // (the lower half is stored reflected).
    Field base;
    // Refined fields over the corner windows; they replace `base` inside.
    std::vector<Field> corner_patches;
    CappedGreen green;
    double t = 0.0;
    double M = 0.0;
    double beta = 0.0;
    DerivativeBounds derivatives;
    double green_min_k = 0.0;  // min of G over K_{0,0}
};

// M = 1 / min of the base field on the lattice row y = 2/3.
double compute_M(const Field& base);

// Fundamental square S_{0,0} of a half in the upper frame.
Box fundamental_box(Half half);
Box fundamental_k_box(Half half);

DerivativeBounds derivative_bounds(const Field& base, Half half, const GreenFunction& green,
                                   const AssemblyOptions& options);

double choose_t(const DerivativeBounds& bounds, double safety);

// min of G over the closed square |Re w|, |Im w| <= 2/7 (reached on its boundary).
double green_min_on_k(const GreenFunction& green, int samples_per_edge = 4096);

double compute_beta(const HalfStripModel& model);

// Windows (upper frame, x in [0, 1)) around the top corners of S_{0,0}.
std::vector<Box> corner_windows(Half half, const Rational& reach);

std::vector<Field> solve_corner_patches(const Field& base, Half half, int n_max,
                                        const AssemblyOptions& options);

HalfStripModel build_half_model(Half half, const CappedGreen& green, const AssemblyOptions& options);

class GluedPotential {
public:
    // `resolution` is the absolute accuracy of the base fields; values
    // below it carry no reliable sign.
    GluedPotential(HalfStripModel upper, HalfStripModel lower, int cells_per_unit, double resolution = 0.0);

    // u(z) for |Im z| <= 4/3; throws DomainError outside the strip.
    double evaluate(Point z) const;
    double operator()(Point z) const { return evaluate(z); }

    // u on one half, addressed in the upper frame (y >= 0).
    double frame_value(Half half, Point frame_point) const;
    // Base-field (harmonic) value, ignoring squares; y in the upper frame.
    double base_value(Half half, Point frame_point) const;

    const HalfStripModel& model(Half half) const { return half == Half::Upper ? upper_ : lower_; }
    const HalfStripModel& upper() const { return upper_; }
    const HalfStripModel& lower() const { return lower_; }
    int n_max() const { return upper_.n_max; }
    int cells_per_unit() const { return cells_per_unit_; }
    double h() const { return 1.0 / cells_per_unit_; }
    double resolution() const { return resolution_; }

    // min(beta, beta_1) and max(M, M_1)
    double beta_min() const;
    double M_max() const;

private:
    HalfStripModel upper_;
    HalfStripModel lower_;
    int cells_per_unit_;
    double resolution_;
};

// Absolute accuracy of a solve with unit data: residual tolerance times the
// value floor, times 100 for the residual-to-error amplification.
double value_resolution(const SolverOptions& options);

GluedPotential build_glued(const AssemblyOptions& options);

// Assembles from already solved fields (used when loading stored models).
GluedPotential assemble_from_fields(Field upper_base, Field lower_base, Field green_regular,
                                    const AssemblyOptions& options);

// Worst value of a sampled inequality margin.
struct Margin {
    double worst = 0.0;
    Point witness{};
    std::size_t samples = 0;
};

// M * u(z/2) - u(z) over points z in D_0 of the given half (upper frame).
Margin check_intermediate(const GluedPotential& glued, Half half, const std::vector<Point>& samples);

}  // namespace selfsim
