#include "selfsim/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace selfsim {

const char* stencil_name(Stencil s) { return s == Stencil::NinePoint ? "9-point" : "5-point"; }

std::int64_t lattice_index(const Rational& coord, int cells_per_unit) {
    const Rational scaled = coord * Rational(cells_per_unit);
    if (scaled.denominator() != 1) {
        std::ostringstream os;
        os << "coordinate " << coord.numerator() << "/" << coord.denominator()
           << " is not on the lattice of spacing 1/" << cells_per_unit;
        throw GridAlignmentError(os.str());
    }
    return scaled.numerator();
}

DirichletProblem make_half_strip_problem(const PeriodCell& cell, int cells_per_unit) {
    const int m = cells_per_unit;
    const auto top = lattice_index(kStripHeight, m);
    Grid g{0.0, 0.0, 1.0 / m, m, static_cast<int>(top) + 1, true};
    DirichletProblem p{g, std::vector<NodeRole>(g.size(), NodeRole::Interior),
                       std::vector<double>(g.size(), 0.0),
                       cell.half == Half::Upper ? "upper half strip" : "lower half strip"};
    for (int i = 0; i < g.nx; ++i) {
        p.roles[g.index(i, 0)] = NodeRole::Dirichlet;
        p.roles[g.index(i, g.ny - 1)] = NodeRole::Dirichlet;
        p.values[g.index(i, g.ny - 1)] = 1.0;
    }
    for (const Box& b : cell.upper_frame_boxes()) {
        const auto i0 = lattice_index(b.x_lo, m), i1 = lattice_index(b.x_hi, m);
        const auto j0 = lattice_index(b.y_lo, m), j1 = lattice_index(b.y_hi, m);
        for (auto j = j0; j <= j1; ++j) {
            for (auto i = i0; i <= i1; ++i) {
                const bool edge = i == i0 || i == i1 || j == j0 || j == j1;
                const std::size_t idx = g.index(g.wrap(static_cast<int>(i)), static_cast<int>(j));
                p.roles[idx] = edge ? NodeRole::Dirichlet : NodeRole::Excluded;
                p.values[idx] = 0.0;
            }
        }
    }
    // linear initial guess on interior nodes
    for (int j = 1; j < g.ny - 1; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t idx = g.index(i, j);
            if (p.roles[idx] == NodeRole::Interior) p.values[idx] = static_cast<double>(j) / (g.ny - 1);
        }
    }
    return p;
}

DirichletProblem make_strip_problem(const Rational& y_lo, const Rational& y_hi, int cells_per_unit,
                                    const std::vector<double>& bottom, const std::vector<double>& top,
                                    std::string origin) {
    const int m = cells_per_unit;
    const auto j0 = lattice_index(y_lo, m), j1 = lattice_index(y_hi, m);
    Grid g{0.0, static_cast<double>(j0) / m, 1.0 / m, m, static_cast<int>(j1 - j0) + 1, true};
    if (bottom.size() != static_cast<std::size_t>(m) || top.size() != static_cast<std::size_t>(m)) {
        throw std::invalid_argument("strip boundary data must have one value per column");
    }
    DirichletProblem p{g, std::vector<NodeRole>(g.size(), NodeRole::Interior),
                       std::vector<double>(g.size(), 0.0), std::move(origin)};
    for (int i = 0; i < g.nx; ++i) {
        p.roles[g.index(i, 0)] = NodeRole::Dirichlet;
        p.roles[g.index(i, g.ny - 1)] = NodeRole::Dirichlet;
        p.values[g.index(i, 0)] = bottom[i];
        p.values[g.index(i, g.ny - 1)] = top[i];
        for (int j = 1; j < g.ny - 1; ++j) {
            const double s = static_cast<double>(j) / (g.ny - 1);
            p.values[g.index(i, j)] = (1.0 - s) * bottom[i] + s * top[i];
        }
    }
    return p;
}

namespace {

class Relaxer {
public:
    Relaxer(const DirichletProblem& p, std::vector<double>& u, Stencil stencil)
        : g_(p.grid), roles_(p.roles), u_(u), stencil_(stencil) {}

    // Stencil average of the neighbours of (i, j).
    double average(int i, int j) const {
        const int nx = g_.nx;
        const int w = i == 0 ? nx - 1 : i - 1;
        const int e = i == nx - 1 ? 0 : i + 1;
        const double* row = &u_[g_.index(0, j)];
        const double* dn = row - nx;
        const double* up = row + nx;
        const double cross = row[w] + row[e] + dn[i] + up[i];
        if (stencil_ == Stencil::FivePoint) return 0.25 * cross;
        const double diag = dn[w] + dn[e] + up[w] + up[e];
        return 0.05 * (4.0 * cross + diag);
    }

    void sweep(double omega) {
        const int colors = stencil_ == Stencil::FivePoint ? 2 : 4;
        for (int c = 0; c < colors; ++c) {
#pragma omp parallel for schedule(static)
            for (int j = 1; j < g_.ny - 1; ++j) {
                int start;
                if (stencil_ == Stencil::FivePoint) {
                    start = (c + j) & 1;
                } else {
                    if ((j & 1) != (c >> 1)) continue;
                    start = c & 1;
                }
                for (int i = start; i < g_.nx; i += 2) {
                    const std::size_t idx = g_.index(i, j);
                    if (roles_[idx] != NodeRole::Interior) continue;
                    u_[idx] += omega * (average(i, j) - u_[idx]);
                }
            }
        }
    }

    double residual(double floor) const {
        double worst = 0.0;
#pragma omp parallel for reduction(max : worst) schedule(static)
        for (int j = 1; j < g_.ny - 1; ++j) {
            for (int i = 0; i < g_.nx; ++i) {
                const std::size_t idx = g_.index(i, j);
                if (roles_[idx] != NodeRole::Interior) continue;
                const double r = std::abs(average(i, j) - u_[idx]) / std::max(std::abs(u_[idx]), floor);
                if (!(r <= worst)) worst = std::isnan(r) ? std::numeric_limits<double>::infinity() : r;
            }
        }
        return worst;
    }

private:
    const Grid& g_;
    const std::vector<NodeRole>& roles_;
    std::vector<double>& u_;
    Stencil stencil_;
};

void validate(const DirichletProblem& p) {
    const Grid& g = p.grid;
    if (g.nx < 3 || g.ny < 3) throw std::invalid_argument("lattice too small");
    if (p.roles.size() != g.size() || p.values.size() != g.size()) {
        throw std::invalid_argument("problem arrays do not match lattice");
    }
    if (g.periodic_x && g.nx % 2 != 0) throw std::invalid_argument("periodic lattice needs even nx");
    for (int i = 0; i < g.nx; ++i) {
        if (p.roles[g.index(i, 0)] == NodeRole::Interior ||
            p.roles[g.index(i, g.ny - 1)] == NodeRole::Interior) {
            throw std::invalid_argument("first and last rows must be Dirichlet");
        }
    }
    if (!g.periodic_x) {
        for (int j = 0; j < g.ny; ++j) {
            if (p.roles[g.index(0, j)] == NodeRole::Interior ||
                p.roles[g.index(g.nx - 1, j)] == NodeRole::Interior) {
                throw std::invalid_argument("first and last columns must be Dirichlet");
            }
        }
    }
}

double default_omega(const Grid& g) {
    const double py = std::cos(std::numbers::pi / (g.ny - 1));
    const double px = g.periodic_x ? 1.0 : std::cos(std::numbers::pi / (g.nx - 1));
    const double rho = 0.5 * (px + py);
    return 2.0 / (1.0 + std::sqrt(std::max(0.0, 1.0 - rho * rho)));
}

}  // namespace

double sor_omega(double h, double extent) {
    return 2.0 / (1.0 + std::sin(std::numbers::pi * h / extent));
}

Field solve_dirichlet(const DirichletProblem& problem, const SolverOptions& options) {
    validate(problem);
    std::vector<double> u = problem.values;
    double scale = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (problem.roles[k] == NodeRole::Dirichlet) scale = std::max(scale, std::abs(u[k]));
    }
    if (scale == 0.0) scale = 1.0;
    const double omega = options.omega > 0.0 ? options.omega : default_omega(problem.grid);

    const double floor = std::max(options.value_floor, 0.0) * scale;
    Relaxer relax(problem, u, options.stencil);
    // with a zero floor the residual is absolute, relative to the data scale
    auto measure = [&] { return floor > 0.0 ? relax.residual(floor) : relax.residual(scale); };
    double res = measure();
    int it = 0;
    const int every = std::max(1, options.check_every);
    while (res > options.tol) {
        if (it >= options.max_iterations) {
            std::ostringstream os;
            os << problem.origin << ": no convergence after " << it
               << " iterations (relative residual " << res << ", tolerance " << options.tol
               << ")";
            throw SolverError(os.str(), res, it);
        }
        const int batch = std::min(every, options.max_iterations - it);
        for (int b = 0; b < batch; ++b) relax.sweep(omega);
        it += batch;
        res = measure();
        if (!std::isfinite(res)) throw SolverError(problem.origin + ": solver diverged", res, it);
    }
    Field f(problem.grid, std::move(u), problem.origin);
    f.set_solve_info(res, it);
    return f;
}

Field refine_window(const Field& coarse, const Box& window, const std::vector<Box>& obstacles,
                    int factor, const SolverOptions& options) {
    if (factor < 2) throw std::invalid_argument("refinement factor must be at least 2");
    const int m = static_cast<int>(std::lround(1.0 / coarse.grid().h));
    const int fm = m * factor;
    const auto i0 = lattice_index(window.x_lo, m) * factor, i1 = lattice_index(window.x_hi, m) * factor;
    const auto j0 = lattice_index(window.y_lo, m) * factor, j1 = lattice_index(window.y_hi, m) * factor;
    Grid g{to_double(window.x_lo), to_double(window.y_lo), 1.0 / fm, static_cast<int>(i1 - i0) + 1,
           static_cast<int>(j1 - j0) + 1, false};
    DirichletProblem p{g, std::vector<NodeRole>(g.size(), NodeRole::Interior),
                       std::vector<double>(g.size(), 0.0), coarse.origin() + " (corner window)"};
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t idx = g.index(i, j);
            // exact lattice coordinates keep the window edges on coarse lines
            const double x = static_cast<double>(i0 + i) / fm, y = static_cast<double>(j0 + j) / fm;
            p.values[idx] = coarse.interpolate(x, y);
            if (i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1) p.roles[idx] = NodeRole::Dirichlet;
        }
    }
    for (const Box& b : obstacles) {
        if (!b.intersects(window)) continue;
        const auto bi0 = lattice_index(b.x_lo, fm) - i0, bi1 = lattice_index(b.x_hi, fm) - i0;
        const auto bj0 = lattice_index(b.y_lo, fm) - j0, bj1 = lattice_index(b.y_hi, fm) - j0;
        for (auto j = std::max<std::int64_t>(bj0, 0); j <= std::min<std::int64_t>(bj1, g.ny - 1); ++j) {
            for (auto i = std::max<std::int64_t>(bi0, 0); i <= std::min<std::int64_t>(bi1, g.nx - 1); ++i) {
                const std::size_t idx = g.index(static_cast<int>(i), static_cast<int>(j));
                const bool edge = i == bi0 || i == bi1 || j == bj0 || j == bj1;
                const bool rim = i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1;
                p.roles[idx] = edge || rim ? NodeRole::Dirichlet : NodeRole::Excluded;
                p.values[idx] = 0.0;
            }
        }
    }
    return solve_dirichlet(p, options);
}

double EdgeProfile::min() const { return *std::min_element(value.begin(), value.end()); }

double EdgeProfile::max() const { return *std::max_element(value.begin(), value.end()); }

namespace {

// One-sided first derivative from samples at distance 0, h, 2h, ...
double one_sided(const double* s, double h, int order) {
    if (order == 4) {
        return (-25.0 * s[0] + 48.0 * s[1] - 36.0 * s[2] + 16.0 * s[3] - 3.0 * s[4]) / (12.0 * h);
    }
    return (-3.0 * s[0] + 4.0 * s[1] - s[2]) / (2.0 * h);
}

int on_lattice(double coord, double origin, double h) {
    const double s = (coord - origin) / h;
    const double r = std::nearbyint(s);
    if (std::abs(s - r) > 1e-9) throw GridAlignmentError("square edge not resolved on the lattice");
    return static_cast<int>(r);
}

}  // namespace

EdgeProfile normal_derivative(const Field& field, const Box& square, Edge edge, NormalSense sense,
                              double corner_offset, int order) {
    if (order != 2 && order != 4) throw std::invalid_argument("order must be 2 or 4");
    const Grid& g = field.grid();
    const int i0 = on_lattice(to_double(square.x_lo), g.x0, g.h);
    const int i1 = on_lattice(to_double(square.x_hi), g.x0, g.h);
    const int j0 = on_lattice(to_double(square.y_lo), g.y0, g.h);
    const int j1 = on_lattice(to_double(square.y_hi), g.y0, g.h);
    const bool horizontal = edge == Edge::Bottom || edge == Edge::Top;
    // outward step direction for this edge
    int di = 0, dj = 0;
    switch (edge) {
        case Edge::Bottom: dj = -1; break;
        case Edge::Top: dj = 1; break;
        case Edge::Left: di = -1; break;
        case Edge::Right: di = 1; break;
    }
    if (sense == NormalSense::Inward) {
        di = -di;
        dj = -dj;
    }
    const int skip = static_cast<int>(std::ceil(corner_offset / g.h - 1e-9));
    const int lo = (horizontal ? i0 : j0) + skip;
    const int hi = (horizontal ? i1 : j1) - skip;
    if (lo > hi) throw GridAlignmentError("corner offset leaves no edge samples");
    const int fixed = edge == Edge::Bottom ? j0 : edge == Edge::Top ? j1 : edge == Edge::Left ? i0 : i1;
    const int steps = order == 4 ? 5 : 3;
    EdgeProfile out;
    for (int s = lo; s <= hi; ++s) {
        double samples[5];
        for (int q = 0; q < steps; ++q) {
            const int i = horizontal ? s : fixed + q * di;
            const int j = horizontal ? fixed + q * dj : s;
            if (j < 0 || j >= g.ny || (!g.periodic_x && (i < 0 || i >= g.nx))) {
                throw GridAlignmentError("normal stencil leaves the lattice");
            }
            samples[q] = field.at(i, j);
        }
        out.along.push_back(horizontal ? g.x(s) : g.y(s));
        out.value.push_back(one_sided(samples, g.h, order));
    }
    return out;
}

EdgeProfile row_derivative(const Field& field, int row, int direction, int order) {
    const Grid& g = field.grid();
    const int steps = order == 4 ? 5 : 3;
    if (row + direction * (steps - 1) < 0 || row + direction * (steps - 1) >= g.ny) {
        throw GridAlignmentError("row derivative stencil leaves the lattice");
    }
    EdgeProfile out;
    for (int i = 0; i < g.nx; ++i) {
        double samples[5];
        for (int q = 0; q < steps; ++q) samples[q] = field.at(i, row + q * direction);
        out.along.push_back(g.x(i));
        out.value.push_back(direction * one_sided(samples, g.h, order));
    }
    return out;
}

double sub_mean_test(const ScalarFunction& f, Point z, double r, int m,
                     const DiskPredicate& disk_inside) {
    if (m < 1 || !(r > 0.0)) throw std::invalid_argument("sub_mean_test needs r > 0 and m >= 1");
    if (disk_inside && !disk_inside(z, r)) throw DomainError("disk leaves the domain");
    double sum = 0.0;
    for (int q = 0; q < m; ++q) {
        const double phi = 2.0 * std::numbers::pi * q / m;
        sum += f(z + std::polar(r, phi));
    }
    return sum / m - f(z);
}

}  // namespace selfsim
