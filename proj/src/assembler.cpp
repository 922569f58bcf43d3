#include "selfsim/assembler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace selfsim {

namespace {

int cells_from_h(double h) { return static_cast<int>(std::lround(1.0 / h)); }

Box frame_box(Half half, const SquareSpec& s) {
    Box b = s.box();
    if (half == Half::Lower) b = Box{b.x_lo, b.x_hi, -b.y_hi, -b.y_lo};
    return b;
}

// Center of S_{0,0} in the upper frame.
Point frame_center0(Half half) { return half == Half::Upper ? Point{0.0, 1.0} : Point{0.5, 1.0}; }

HalfStripModel model_from_field(Half half, Field base, const CappedGreen& green,
                                const AssemblyOptions& options) {
    HalfStripModel model;
    model.half = half;
    model.n_max = options.n_max;
    model.base = std::move(base);
    model.corner_patches = solve_corner_patches(model.base, half, options.n_max, options);
    model.green = green;
    model.M = compute_M(model.base);
    model.derivatives = derivative_bounds(model.base, half, *green.green, options);
    model.t = choose_t(model.derivatives, options.t_safety);
    model.green_min_k = green_min_on_k(*green.green);
    model.beta = compute_beta(model);
    return model;
}

}  // namespace

double CappedGreen::operator()(Point w) const { return std::min(green->value(w), cap); }

CappedGreen make_capped_green(std::shared_ptr<const GreenFunction> green, double cap_radius) {
    if (!(cap_radius > 0.0) || cap_radius >= to_double(kKHalf)) {
        throw std::invalid_argument("pole cap radius must lie in (0, 2/7)");
    }
    const double cap = std::log(1.0 / cap_radius) / (2.0 * std::numbers::pi) + green->regular(Point{0.0, 0.0});
    return CappedGreen{std::move(green), cap};
}

double compute_M(const Field& base) {
    const Grid& g = base.grid();
    const auto row = lattice_index(kMidLine, cells_from_h(g.h));
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.nx; ++i) lo = std::min(lo, base.at(i, static_cast<int>(row)));
    if (!(lo > 0.0)) throw std::runtime_error("nonpositive minimum on the line y = 2/3");
    return 1.0 / lo;
}

Box fundamental_box(Half half) { return frame_box(half, s_square(half, 0, 0)); }

Box fundamental_k_box(Half half) { return frame_box(half, k_square(half, 0, 0)); }

DerivativeBounds derivative_bounds(const Field& base, Half half, const GreenFunction& green,
                                   const AssemblyOptions& options) {
    const double h = base.grid().h;
    const double offset = options.corner_offset_cells * h;
    const Box square = fundamental_box(half);
    const Box local{-kSHalf, kSHalf, -kSHalf, kSHalf};
    const Field g = green.sampled(0.0);
    DerivativeBounds out{std::numeric_limits<double>::infinity(), 0.0};
    for (Edge e : {Edge::Bottom, Edge::Top, Edge::Left, Edge::Right}) {
        out.inf_du_dn = std::min(
            out.inf_du_dn,
            normal_derivative(base, square, e, NormalSense::Outward, offset, options.derivative_order).min());
        out.sup_dg_dn = std::max(
            out.sup_dg_dn,
            normal_derivative(g, local, e, NormalSense::Inward, offset, options.derivative_order).max());
    }
    return out;
}

double choose_t(const DerivativeBounds& bounds, double safety) {
    if (!(bounds.inf_du_dn > 0.0)) {
        throw std::runtime_error("normal derivative of the base field is not positive on the square");
    }
    if (!(bounds.sup_dg_dn > 0.0)) throw std::runtime_error("green function normal derivative not positive");
    return safety * bounds.inf_du_dn / bounds.sup_dg_dn;
}

double green_min_on_k(const GreenFunction& green, int samples_per_edge) {
    const double a = to_double(kKHalf);
    double lo = std::numeric_limits<double>::infinity();
    for (int q = 0; q <= samples_per_edge; ++q) {
        const double s = -a + 2.0 * a * q / samples_per_edge;
        for (Point w : {Point{s, -a}, Point{s, a}, Point{-a, s}, Point{a, s}}) lo = std::min(lo, green.value(w));
    }
    return lo;
}

double compute_beta(const HalfStripModel& model) { return model.t * model.green_min_k; }

std::vector<Box> corner_windows(Half half, const Rational& reach) {
    const Box sq = fundamental_box(half);
    std::vector<Box> out;
    for (Rational cx : {sq.x_lo, sq.x_hi}) {
        if (cx < Rational(0)) cx += 1;
        out.push_back(Box{cx - reach, cx + reach, sq.y_hi - reach, kStripHeight});
    }
    std::sort(out.begin(), out.end(), [](const Box& a, const Box& b) { return a.x_lo < b.x_lo; });
    return out;
}

std::vector<Field> solve_corner_patches(const Field& base, Half half, int n_max,
                                        const AssemblyOptions& options) {
    std::vector<Field> out;
    if (options.corner_refinement <= 1) return out;
    const PeriodCell cell = make_period_cell(half, n_max);
    std::vector<Box> obstacles;
    for (const Box& b : cell.upper_frame_boxes()) {
        // the window may see the periodic copies of the cell
        for (int shift : {-1, 0, 1}) {
            obstacles.push_back(Box{b.x_lo + shift, b.x_hi + shift, b.y_lo, b.y_hi});
        }
    }
    for (const Box& w : corner_windows(half, options.corner_window)) {
        if (w.x_lo < Rational(0) || w.x_hi > Rational(1)) {
            throw GridAlignmentError("corner window leaves the period cell");
        }
        SolverOptions so = options.solver;
        so.omega = 0.0;
        out.push_back(refine_window(base, w, obstacles, options.corner_refinement, so));
    }
    return out;
}

HalfStripModel build_half_model(Half half, const CappedGreen& green, const AssemblyOptions& options) {
    const PeriodCell cell = make_period_cell(half, options.n_max);
    const DirichletProblem problem = make_half_strip_problem(cell, options.cells_per_unit);
    SolverOptions so = options.solver;
    // slowest mode lives in the slab between the real axis and the squares
    if (so.omega <= 0.0) so.omega = sor_omega(problem.grid.h, to_double(kMidLine));
    return model_from_field(half, solve_dirichlet(problem, so), green, options);
}

double value_resolution(const SolverOptions& options) { return 100.0 * options.tol * options.value_floor; }

GluedPotential::GluedPotential(HalfStripModel upper, HalfStripModel lower, int cells_per_unit, double resolution)
    : upper_(std::move(upper)), lower_(std::move(lower)), cells_per_unit_(cells_per_unit), resolution_(resolution) {
    if (upper_.n_max != lower_.n_max) throw std::invalid_argument("halves truncated at different depths");
}

double GluedPotential::base_value(Half half, Point p) const {
    const double x = p.real() - std::floor(p.real());
    const HalfStripModel& md = model(half);
    for (const Field& f : md.corner_patches) {
        const Grid& g = f.grid();
        if (x >= g.x0 && x <= g.x(g.nx - 1) && p.imag() >= g.y0 && p.imag() <= g.y(g.ny - 1)) {
            return f.interpolate(x, p.imag());
        }
    }
    return md.base.interpolate(x, p.imag());
}

double GluedPotential::frame_value(Half half, Point p) const {
    const double y = p.imag();
    if (y == 0.0) return 0.0;
    if (y < 0.0 || compare(y, kStripHeight) > 0) throw DomainError("frame point outside the half strip");
    const HalfStripModel& md = model(half);
    const double shift = half == Half::Upper ? 0.0 : 0.5;
    const Family fam = half == Half::Upper ? Family::SPlus : Family::SMinus;
    for (int n = 0; n <= md.n_max; ++n) {
        const double scale = std::ldexp(1.0, -n);
        // cheap rejection on the row of level-n squares
        if (std::abs(y - scale) > 0.3 * scale * (1.0 + 1e-9) + 1e-15) continue;
        const double kd = std::nearbyint(p.real() / scale - shift);
        for (double dk = -1.0; dk <= 1.0; dk += 1.0) {
            const auto k = static_cast<std::int64_t>(kd + dk);
            const Box b = frame_box(half, SquareSpec{fam, n, k});
            const Containment c = b.locate(p);
            if (c == Containment::Outside) continue;
            if (c == Containment::Boundary) return 0.0;
            const Point w = std::ldexp(1.0, n) * p - Point{static_cast<double>(k), 0.0} - frame_center0(half);
            return -md.t * std::pow(md.M, -n) * md.green(w);
        }
    }
    if (compare(y, kStripHeight) == 0) return 1.0;
    return base_value(half, p);
}

double GluedPotential::evaluate(Point z) const {
    const double y = z.imag();
    if (!std::isfinite(y) || !std::isfinite(z.real())) throw DomainError("non-finite point");
    if (y == 0.0) return 0.0;
    if (compare(std::abs(y), kStripHeight) > 0) throw DomainError("point outside the strip |Im z| <= 4/3");
    return y > 0.0 ? frame_value(Half::Upper, z) : frame_value(Half::Lower, std::conj(z));
}

double GluedPotential::beta_min() const { return std::min(upper_.beta, lower_.beta); }

double GluedPotential::M_max() const { return std::max(upper_.M, lower_.M); }

GluedPotential build_glued(const AssemblyOptions& options) {
    auto green = std::make_shared<const GreenFunction>(green_square(options.cells_per_unit, options.solver));
    const CappedGreen capped = make_capped_green(green, options.pole_cap_radius);
    HalfStripModel upper = build_half_model(Half::Upper, capped, options);
    HalfStripModel lower = build_half_model(Half::Lower, capped, options);
    return GluedPotential(std::move(upper), std::move(lower), options.cells_per_unit,
                          value_resolution(options.solver));
}

GluedPotential assemble_from_fields(Field upper_base, Field lower_base, Field green_regular,
                                    const AssemblyOptions& options) {
    auto green = std::make_shared<const GreenFunction>(std::move(green_regular));
    const CappedGreen capped = make_capped_green(green, options.pole_cap_radius);
    HalfStripModel upper = model_from_field(Half::Upper, std::move(upper_base), capped, options);
    HalfStripModel lower = model_from_field(Half::Lower, std::move(lower_base), capped, options);
    return GluedPotential(std::move(upper), std::move(lower), options.cells_per_unit,
                          value_resolution(options.solver));
}

Margin check_intermediate(const GluedPotential& glued, Half half, const std::vector<Point>& samples) {
    const double M = glued.model(half).M;
    Margin out{std::numeric_limits<double>::infinity(), {}, 0};
    for (Point z : samples) {
        const double margin = M * glued.frame_value(half, 0.5 * z) - glued.frame_value(half, z);
        if (margin < out.worst) {
            out.worst = margin;
            out.witness = z;
        }
        ++out.samples;
    }
    return out;
}

}  // namespace selfsim
