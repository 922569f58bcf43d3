#pragma once

// Finite-difference harmonic machinery on aligned lattices.

#include "selfsim/geometry.hpp"
#include "selfsim/grid.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace selfsim {

enum class Stencil { FivePoint, NinePoint };

const char* stencil_name(Stencil s);

struct SolverOptions {
    // Max over interior nodes of |stencil average - u| / max(|u|, floor * D),
    // D the largest Dirichlet datum. Normalising by the local value keeps
    // exponentially small regions (narrow channels) under relative control.
    double tol = 1e-9;
    double value_floor = 1e-8;
    int max_iterations = 200000;
    Stencil stencil = Stencil::FivePoint;
    // 0 selects the over-relaxation factor from the lattice extent.
    double omega = 0.0;
    int check_every = 10;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

private:
    double residual_;
    int iterations_;
};

// Thrown when a requested geometry does not fall on lattice lines.
class GridAlignmentError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DirichletProblem {
    Grid grid;
    std::vector<NodeRole> roles;
    // Dirichlet data on non-interior nodes, initial guess elsewhere.
    std::vector<double> values;
    std::string origin;
};

// Lattice index of an exact coordinate; throws GridAlignmentError when the
// coordinate is not a multiple of 1/cells_per_unit.
std::int64_t lattice_index(const Rational& coord, int cells_per_unit);

// Upper-frame half strip 0 <= y <= 4/3, periodic in x with period 1:
// value 1 on y = 4/3, 0 on y = 0 and on every square of the cell.
// Square nodes strictly inside are Excluded; their edges are Dirichlet.
DirichletProblem make_half_strip_problem(const PeriodCell& cell, int cells_per_unit);

// Periodic strip lo <= y <= hi without obstacles; boundary rows take the
// given per-column data (size nx each).
DirichletProblem make_strip_problem(const Rational& y_lo, const Rational& y_hi,
                                    int cells_per_unit, const std::vector<double>& bottom,
                                    const std::vector<double>& top, std::string origin);

Field solve_dirichlet(const DirichletProblem& problem, const SolverOptions& options);

// Re-solves the window (lattice-aligned on the coarse field) on a lattice
// `factor` times finer. The window boundary takes the coarse values, nodes
// of the closed obstacles are 0 (their interiors Excluded). Used at
// reentrant corners, where bilinear interpolation of the coarse field loses
// accuracy.
Field refine_window(const Field& coarse, const Box& window, const std::vector<Box>& obstacles,
                    int factor, const SolverOptions& options);

// Over-relaxation factor for a lattice of spacing h whose slowest mode has
// the extent of a Dirichlet slab of width `extent`.
double sor_omega(double h, double extent);

// Green function of the square |Re w|, |Im w| <= 3/10 with pole at w = 0,
// G(w) = -(1/2pi) log|w| + H(w) and G = 0 on the boundary; H is the
// discrete harmonic part, the logarithm is kept analytic.
class GreenFunction {
public:
    GreenFunction() = default;
    explicit GreenFunction(Field regular);

    double half_side() const { return half_side_; }
    const Field& regular_field() const { return regular_; }

    // +inf at the pole, 0 on and outside the boundary.
    double value(Point w) const;
    double regular(Point w) const;

    // G at lattice nodes; the pole node holds `pole_value`.
    Field sampled(double pole_value) const;

private:
    Field regular_;
    double half_side_ = 0.3;
};

GreenFunction green_square(int cells_per_unit, const SolverOptions& options);

enum class Edge { Bottom, Top, Left, Right };
enum class NormalSense { Outward, Inward };

struct EdgeProfile {
    std::vector<double> along;  // coordinate along the edge
    std::vector<double> value;  // derivative along the chosen normal

    double min() const;
    double max() const;
};

// One-sided difference quotient along the normal of a square edge lying on
// lattice lines. Outward samples the side away from the square. Nodes
// within `corner_offset` of either corner are skipped. order is 2 or 4.
EdgeProfile normal_derivative(const Field& field, const Box& square, Edge edge,
                              NormalSense sense, double corner_offset, int order = 2);

// d/dy on lattice row `row` from the one-sided nodes row, row+direction, ...
// (direction -1 for a top boundary row, +1 for a bottom one).
EdgeProfile row_derivative(const Field& field, int row, int direction, int order = 2);

class DomainError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

using ScalarFunction = std::function<double(Point)>;
using DiskPredicate = std::function<bool(Point, double)>;

// Trapezoidal circle average of f on |w - z| = r with m samples, minus f(z).
// A nonnegative margin certifies the sub-mean inequality at (z, r).
double sub_mean_test(const ScalarFunction& f, Point z, double r, int m,
                     const DiskPredicate& disk_inside = {});

}  // namespace selfsim
