#include "selfsim/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace selfsim {

int Grid::wrap(int i) const {
    if (!periodic_x) return i;
    i %= nx;
    return i < 0 ? i + nx : i;
}

Field::Field(Grid grid, std::vector<double> values, std::string origin)
    : grid_(grid), values_(std::move(values)), origin_(std::move(origin)) {
    if (values_.size() != grid_.size()) throw std::invalid_argument("field size does not match grid");
}

namespace {

// Cell index and fractional offset along one axis of n nodes.
std::pair<int, double> locate_axis(double s, int n, bool periodic) {
    double fl = std::floor(s);
    double frac = s - fl;
    int i = static_cast<int>(fl);
    if (periodic) {
        i %= n;
        if (i < 0) i += n;
        return {i, frac};
    }
    if (i == n - 1 && frac == 0.0) return {n - 2, 1.0};
    if (i < 0 || i > n - 2) throw std::out_of_range("interpolation point outside grid");
    return {i, frac};
}

}  // namespace

double Field::interpolate(double x, double y) const {
    const double sx = (x - grid_.x0) / grid_.h;
    const double sy = (y - grid_.y0) / grid_.h;
    // snap coordinates that are within rounding of a grid line
    auto snap = [](double s) {
        const double r = std::nearbyint(s);
        return std::abs(s - r) < 1e-9 ? r : s;
    };
    const auto [i, fx] = locate_axis(snap(sx), grid_.nx, grid_.periodic_x);
    const auto [j, fy] = locate_axis(snap(sy), grid_.ny, false);
    const int i1 = grid_.periodic_x ? grid_.wrap(i + 1) : i + 1;
    const double v00 = values_[grid_.index(i, j)];
    if (fx == 0.0 && fy == 0.0) return v00;
    const double v10 = values_[grid_.index(i1, j)];
    const double v01 = values_[grid_.index(i, j + 1)];
    const double v11 = values_[grid_.index(i1, j + 1)];
    if (fy == 0.0) return v00 + fx * (v10 - v00);
    if (fx == 0.0) return v00 + fy * (v01 - v00);
    if (fy == 1.0) return v01 + fx * (v11 - v01);
    if (fx == 1.0) return v10 + fy * (v11 - v10);
    return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11);
}

}  // namespace selfsim
