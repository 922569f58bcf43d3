#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace selfsim {

// Uniform node lattice x = x0 + i*h, y = y0 + j*h. A periodic lattice has
// period nx*h in x and no duplicated seam column.
struct Grid {
    double x0 = 0.0;
    double y0 = 0.0;
    double h = 1.0;
    int nx = 0;
    int ny = 0;
    bool periodic_x = false;

    double x(int i) const { return x0 + i * h; }
    double y(int j) const { return y0 + j * h; }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) +
               static_cast<std::size_t>(i);
    }
    std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
    int wrap(int i) const;

    friend bool operator==(const Grid&, const Grid&) = default;
};

enum class NodeRole : std::uint8_t { Interior, Dirichlet, Excluded };

class Field {
public:
    Field() = default;
    Field(Grid grid, std::vector<double> values, std::string origin = {});

    const Grid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double at(int i, int j) const { return values_[grid_.index(grid_.wrap(i), j)]; }

    // Bilinear interpolation; exact at nodes. Throws std::out_of_range
    // outside the lattice (x wraps when periodic).
    double interpolate(double x, double y) const;

    const std::string& origin() const { return origin_; }
    double residual() const { return residual_; }
    int iterations() const { return iterations_; }
    void set_solve_info(double residual, int iterations) {
        residual_ = residual;
        iterations_ = iterations;
    }

private:
    Grid grid_;
    std::vector<double> values_;
    std::string origin_;
    double residual_ = 0.0;
    int iterations_ = 0;
};

}  // namespace selfsim
