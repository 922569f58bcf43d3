#include "selfsim/laplace.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace selfsim {

namespace {

constexpr double kInvTwoPi = 0.5 / std::numbers::pi;

double log_part(Point w) { return -kInvTwoPi * std::log(std::abs(w)); }

}  // namespace

GreenFunction::GreenFunction(Field regular) : regular_(std::move(regular)) {
    half_side_ = -regular_.grid().x0;
}

double GreenFunction::regular(Point w) const { return regular_.interpolate(w.real(), w.imag()); }

double GreenFunction::value(Point w) const {
    if (std::abs(w.real()) >= half_side_ || std::abs(w.imag()) >= half_side_) return 0.0;
    if (w == Point{0.0, 0.0}) return std::numeric_limits<double>::infinity();
    return log_part(w) + regular(w);
}

Field GreenFunction::sampled(double pole_value) const {
    const Grid& g = regular_.grid();
    std::vector<double> v(g.size());
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const bool boundary = i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1;
            const Point w{g.x(i), g.y(j)};
            double value = 0.0;
            if (!boundary) {
                value = (2 * i == g.nx - 1 && 2 * j == g.ny - 1) ? pole_value
                                                                 : log_part(w) + regular_.at(i, j);
            }
            v[g.index(i, j)] = value;
        }
    }
    return Field(g, std::move(v), "green function of the fundamental square");
}

GreenFunction green_square(int cells_per_unit, const SolverOptions& options) {
    const int m = cells_per_unit;
    const auto n = lattice_index(2 * kSHalf, m);
    const double a = to_double(kSHalf);
    Grid g{-a, -a, 1.0 / m, static_cast<int>(n) + 1, static_cast<int>(n) + 1, false};
    if (g.nx % 2 == 0) throw GridAlignmentError("pole must fall on a lattice node");
    DirichletProblem p{g, std::vector<NodeRole>(g.size(), NodeRole::Interior),
                       std::vector<double>(g.size(), 0.0), "green function regular part"};
    double mean = 0.0;
    int count = 0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            if (i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1) {
                const std::size_t idx = g.index(i, j);
                p.roles[idx] = NodeRole::Dirichlet;
                p.values[idx] = -log_part(Point{g.x(i), g.y(j)});
                mean += p.values[idx];
                ++count;
            }
        }
    }
    mean /= count;
    for (std::size_t k = 0; k < p.values.size(); ++k) {
        if (p.roles[k] == NodeRole::Interior) p.values[k] = mean;
    }
    return GreenFunction(solve_dirichlet(p, options));
}

}  // namespace selfsim
