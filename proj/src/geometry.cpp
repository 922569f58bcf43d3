#include "selfsim/geometry.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace selfsim {

namespace {

using boost::multiprecision::cpp_rational;

Rational pow2(int n) { return Rational(std::int64_t{1} << n); }

Rational inv_pow2(int n) { return Rational(1, std::int64_t{1} << n); }

int compare_exact(double x, const Rational& q) {
    cpp_rational lhs(x);
    cpp_rational rhs(q.numerator(), q.denominator());
    if (lhs < rhs) return -1;
    if (lhs > rhs) return 1;
    return 0;
}

int compare_points(Containment a) { return static_cast<int>(a); }

Containment axis_containment(int lo_cmp, int hi_cmp) {
    // lo_cmp = sign(v - lo), hi_cmp = sign(v - hi)
    if (lo_cmp < 0 || hi_cmp > 0) return Containment::Outside;
    if (lo_cmp == 0 || hi_cmp == 0) return Containment::Boundary;
    return Containment::Interior;
}

Containment combine(Containment a, Containment b) {
    return static_cast<Containment>(std::min(compare_points(a), compare_points(b)));
}

}  // namespace

double to_double(const Rational& q) {
    return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

int compare(double x, const Rational& q) {
    const double qd = to_double(q);
    const double slack = 1e-12 * (1.0 + std::abs(qd));
    if (x > qd + slack) return 1;
    if (x < qd - slack) return -1;
    return compare_exact(x, q);
}

ExactPoint apply(const GroupElement& g, const ExactPoint& z) {
    const Rational s = inv_pow2(g.n);
    return {(z.re + Rational(g.k)) * s, z.im * s};
}

Point apply(const GroupElement& g, Point z) {
    return {std::ldexp(z.real() + static_cast<double>(g.k), -g.n), std::ldexp(z.imag(), -g.n)};
}

Point apply_inverse(const GroupElement& g, Point z) {
    return {std::ldexp(z.real(), g.n) - static_cast<double>(g.k), std::ldexp(z.imag(), g.n)};
}

GroupElement compose(const GroupElement& first, const GroupElement& second) {
    return {first.n + second.n, second.k * (std::int64_t{1} << first.n) + first.k};
}

const char* family_name(Family f) {
    switch (f) {
        case Family::SPlus: return "S+";
        case Family::KPlus: return "K+";
        case Family::SMinus: return "S-";
        case Family::KMinus: return "K-";
    }
    return "?";
}

bool is_upper(Family f) { return f == Family::SPlus || f == Family::KPlus; }

bool is_k_family(Family f) { return f == Family::KPlus || f == Family::KMinus; }

Containment Box::locate(const ExactPoint& z) const {
    auto sgn = [](const Rational& a, const Rational& b) { return a < b ? -1 : (b < a ? 1 : 0); };
    const Containment cx = axis_containment(sgn(z.re, x_lo), sgn(z.re, x_hi));
    const Containment cy = axis_containment(sgn(z.im, y_lo), sgn(z.im, y_hi));
    return combine(cx, cy);
}

Containment Box::locate(Point z) const {
    const Containment cx = axis_containment(compare(z.real(), x_lo), compare(z.real(), x_hi));
    if (cx == Containment::Outside) return cx;
    const Containment cy = axis_containment(compare(z.imag(), y_lo), compare(z.imag(), y_hi));
    return combine(cx, cy);
}

bool Box::intersects(const Box& o) const {
    return x_lo <= o.x_hi && o.x_lo <= x_hi && y_lo <= o.y_hi && o.y_lo <= y_hi;
}

ExactPoint SquareSpec::center() const {
    const Rational s = inv_pow2(n);
    if (is_upper(family)) return {Rational(k) * s, s};
    return {(Rational(k) + Rational(1, 2)) * s, -s};
}

Rational SquareSpec::half_side() const {
    return (is_k_family(family) ? kKHalf : kSHalf) * inv_pow2(n);
}

Box SquareSpec::box() const {
    const ExactPoint c = center();
    const Rational a = half_side();
    return {c.re - a, c.re + a, c.im - a, c.im + a};
}

std::string describe(const SquareSpec& s) {
    std::ostringstream os;
    os << family_name(s.family) << "(" << s.n << "," << s.k << ")";
    return os.str();
}

namespace {

// Candidate index at level n whose square column could contain x.
std::int64_t nearest_index(double x, int n, bool lower) {
    const double scaled = std::ldexp(x, n) - (lower ? 0.5 : 0.0);
    return static_cast<std::int64_t>(std::llround(scaled));
}

std::int64_t nearest_index(const Rational& x, int n, bool lower) {
    Rational scaled = x * pow2(n) - (lower ? Rational(1, 2) : Rational(0));
    // round half up; ties cannot lie inside a square
    Rational shifted = scaled + Rational(1, 2);
    std::int64_t fl = shifted.numerator() / shifted.denominator();
    if (shifted.numerator() < 0 && shifted.numerator() % shifted.denominator() != 0) --fl;
    return fl;
}

template <typename P>
std::optional<Located> locate_impl(const P& z, std::initializer_list<Family> families, int n_max) {
    for (Family f : families) {
        const bool lower = !is_upper(f);
        for (int n = 0; n <= n_max; ++n) {
            const std::int64_t k0 = nearest_index(z.real(), n, lower);
            for (std::int64_t k = k0 - 1; k <= k0 + 1; ++k) {
                const SquareSpec s{f, n, k};
                const Containment c = s.box().locate(z);
                if (c != Containment::Outside) return Located{s, c == Containment::Boundary};
            }
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<Located> locate_square(Point z, std::initializer_list<Family> families, int n_max) {
    return locate_impl(z, families, n_max);
}

std::optional<Located> locate_square(const ExactPoint& z, std::initializer_list<Family> families,
                                     int n_max) {
    for (Family f : families) {
        const bool lower = !is_upper(f);
        for (int n = 0; n <= n_max; ++n) {
            const std::int64_t k0 = nearest_index(z.re, n, lower);
            for (std::int64_t k = k0 - 1; k <= k0 + 1; ++k) {
                const SquareSpec s{f, n, k};
                const Containment c = s.box().locate(z);
                if (c != Containment::Outside) return Located{s, c == Containment::Boundary};
            }
        }
    }
    return std::nullopt;
}

DisjointResult check_disjoint(int n_max, std::initializer_list<Family> families,
                              Rational level0_half_side) {
    struct Entry {
        SquareSpec spec;
        Box box;
    };
    std::vector<Entry> squares;
    for (Family f : families) {
        for (int n = 0; n <= n_max; ++n) {
            const std::int64_t per = std::int64_t{1} << n;
            // two periods, so every intersecting pair has a representative
            for (std::int64_t k = 0; k <= 2 * per; ++k) {
                const SquareSpec s{f, n, k};
                const ExactPoint c = s.center();
                const Rational a = level0_half_side * inv_pow2(n);
                squares.push_back({s, Box{c.re - a, c.re + a, c.im - a, c.im + a}});
            }
        }
    }
    for (std::size_t i = 0; i < squares.size(); ++i) {
        for (std::size_t j = i + 1; j < squares.size(); ++j) {
            if (squares[i].box.intersects(squares[j].box)) {
                return {false, std::make_pair(squares[i].spec, squares[j].spec)};
            }
        }
    }
    return {};
}

std::vector<SquareSpec> projection_cover(const Rational& x0, int n) {
    std::vector<SquareSpec> out;
    for (Family f : {Family::KPlus, Family::KMinus}) {
        const std::int64_t k0 = nearest_index(x0, n, f == Family::KMinus);
        for (std::int64_t k = k0 - 1; k <= k0 + 1; ++k) {
            const SquareSpec s{f, n, k};
            const Box b = s.box();
            if (b.x_lo <= x0 && x0 <= b.x_hi) out.push_back(s);
        }
    }
    if (out.empty()) throw std::logic_error("projection cover is empty; covering property violated");
    return out;
}

std::vector<SquareSpec> projection_cover(double x0, int n) {
    std::vector<SquareSpec> out;
    for (Family f : {Family::KPlus, Family::KMinus}) {
        const std::int64_t k0 = nearest_index(x0, n, f == Family::KMinus);
        for (std::int64_t k = k0 - 1; k <= k0 + 1; ++k) {
            const SquareSpec s{f, n, k};
            const Box b = s.box();
            if (compare(x0, b.x_lo) >= 0 && compare(x0, b.x_hi) <= 0) out.push_back(s);
        }
    }
    if (out.empty()) throw std::logic_error("projection cover is empty; covering property violated");
    return out;
}

Rational line_intersection_length(const Rational& x0, int n) {
    Rational total{0};
    for (const SquareSpec& s : projection_cover(x0, n)) total += 2 * s.half_side();
    return total;
}

Rational line_intersection_length(double x0, int n) {
    Rational total{0};
    for (const SquareSpec& s : projection_cover(x0, n)) total += 2 * s.half_side();
    return total;
}

CoverResult projection_covers_period(int n) {
    std::vector<std::pair<Rational, Rational>> intervals;
    const std::int64_t per = std::int64_t{1} << n;
    for (Family f : {Family::KPlus, Family::KMinus}) {
        for (std::int64_t k = -1; k <= per; ++k) {
            const Box b = SquareSpec{f, n, k}.box();
            intervals.emplace_back(b.x_lo, b.x_hi);
        }
    }
    std::sort(intervals.begin(), intervals.end());
    Rational reach{0};
    for (const auto& [lo, hi] : intervals) {
        if (hi < reach) continue;
        if (lo > reach) return {false, reach};
        reach = hi;
        if (reach >= Rational(1)) return {};
    }
    return {reach >= Rational(1), reach >= Rational(1) ? std::nullopt : std::optional(reach)};
}

Rational PeriodCell::y_lo() const { return half == Half::Upper ? Rational(0) : -kStripHeight; }

Rational PeriodCell::y_hi() const { return half == Half::Upper ? kStripHeight : Rational(0); }

std::vector<Box> PeriodCell::upper_frame_boxes() const {
    std::vector<Box> out;
    out.reserve(squares.size());
    for (const SquareSpec& s : squares) {
        Box b = s.box();
        if (half == Half::Lower) b = Box{b.x_lo, b.x_hi, -b.y_hi, -b.y_lo};
        out.push_back(b);
    }
    return out;
}

std::vector<int> PeriodCell::per_level_counts() const {
    std::vector<std::vector<std::int64_t>> ks(static_cast<std::size_t>(std::max(n_max + 1, 0)));
    for (const SquareSpec& s : squares) ks[static_cast<std::size_t>(s.n)].push_back(s.k);
    std::vector<int> counts;
    for (auto& v : ks) {
        std::sort(v.begin(), v.end());
        counts.push_back(static_cast<int>(std::unique(v.begin(), v.end()) - v.begin()));
    }
    return counts;
}

bool PeriodCell::squares_inside_strip() const {
    for (const SquareSpec& s : squares) {
        const Box b = s.box();
        if (!(b.y_lo > y_lo() && b.y_hi < y_hi())) return false;
    }
    return true;
}

SquareSpec s_square(Half half, int n, std::int64_t k) {
    return {half == Half::Upper ? Family::SPlus : Family::SMinus, n, k};
}

SquareSpec k_square(Half half, int n, std::int64_t k) {
    return {half == Half::Upper ? Family::KPlus : Family::KMinus, n, k};
}

PeriodCell make_period_cell(Half half, int n_max) {
    PeriodCell cell;
    cell.half = half;
    cell.n_max = n_max;
    for (int n = 0; n <= n_max; ++n) {
        const std::int64_t per = std::int64_t{1} << n;
        for (std::int64_t k = 0; k < per; ++k) cell.squares.push_back(s_square(half, n, k));
    }
    return cell;
}

}  // namespace selfsim
