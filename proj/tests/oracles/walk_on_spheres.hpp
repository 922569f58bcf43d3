#pragma once

// Walk-on-spheres estimate for the upper perforated half strip
// 0 < y < 4/3 minus the closed squares |z - 2^-n (k + i)|_inf <= 0.3 2^-n,
// n <= n_max, all k. Boundary data: 1 on y = 4/3, 0 elsewhere. The walk
// stops in a shell of width `shell` and takes the data of the nearest
// boundary piece.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace oracle {

struct WosEstimate {
    double mean = 0.0;
    double sigma = 0.0;  // standard error of the mean
};

class PerforatedStrip {
public:
    explicit PerforatedStrip(int n_max, double height = 4.0 / 3.0) : n_max_(n_max), height_(height) {}

    double height() const { return height_; }

    // distance to the union of squares
    double square_distance(double x, double y) const {
        double best = INFINITY;
        for (int n = 0; n <= n_max_; ++n) {
            const double s = std::ldexp(1.0, -n);
            const double half = 0.3 * s;
            const double k0 = std::round(x / s);
            for (double k = k0 - 1; k <= k0 + 1; ++k) {
                const double dx = std::max(std::abs(x - k * s) - half, 0.0);
                const double dy = std::max(std::abs(y - s) - half, 0.0);
                best = std::min(best, std::hypot(dx, dy));
            }
        }
        return best;
    }

    bool inside_square(double x, double y) const {
        for (int n = 0; n <= n_max_; ++n) {
            const double s = std::ldexp(1.0, -n);
            const double k = std::round(x / s);
            if (std::abs(x - k * s) <= 0.3 * s && std::abs(y - s) <= 0.3 * s) return true;
        }
        return false;
    }

    // Walks run in 64 independently seeded chunks, so the estimate does not
    // depend on the thread count.
    WosEstimate estimate(double x, double y, long walks, double shell, std::uint64_t seed) const {
        constexpr int chunks = 64;
        long hits = 0;
#pragma omp parallel for reduction(+ : hits) schedule(dynamic)
        for (int c = 0; c < chunks; ++c) {
            std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(c + 1));
            std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
            const long n = walks / chunks + (c < walks % chunks ? 1 : 0);
            for (long w = 0; w < n; ++w) hits += walk(x, y, shell, rng, angle);
        }
        WosEstimate e;
        e.mean = static_cast<double>(hits) / walks;
        e.sigma = std::sqrt(e.mean * (1 - e.mean) / walks);
        return e;
    }

private:
    // 1 when the walk stops next to the top line
    int walk(double px, double py, double shell, std::mt19937_64& rng,
             std::uniform_real_distribution<double>& angle) const {
        for (;;) {
            const double top = height_ - py;
            const double sq = square_distance(px, py);
            const double r = std::min({py, top, sq});
            if (r < shell) return top <= py && top <= sq ? 1 : 0;
            const double t = angle(rng);
            px += r * std::cos(t);
            py += r * std::sin(t);
        }
    }

    int n_max_;
    double height_;
};

}  // namespace oracle
