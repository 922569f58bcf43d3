#include "selfsim/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace selfsim {

std::uint64_t Rng::next() { return state_(); }

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::int64_t Rng::integer(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next() % span);
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::PassDiscretization: return "pass (discretization)";
        case Verdict::Fail: return "fail";
    }
    return "?";
}

Verdict CheckRecord::verdict() const {
    if (samples == 0 || !std::isfinite(worst_margin)) return Verdict::Fail;
    if (worst_margin >= 0.0) return Verdict::Pass;
    return worst_margin >= -tolerance ? Verdict::PassDiscretization : Verdict::Fail;
}

void CheckRecord::add(double margin, Point where) {
    if (samples == 0 || margin < worst_margin || std::isnan(margin)) {
        worst_margin = margin;
        witness = where;
    }
    if (!(margin >= -tolerance)) ++violations;
    ++samples;
}

double inequality_tolerance(double h) { return 10.0 * h * h; }

namespace {

Point actual_point(Half half, Point frame) { return half == Half::Upper ? frame : std::conj(frame); }

Family s_family(Half half) { return half == Half::Upper ? Family::SPlus : Family::SMinus; }

Family k_family(Half half) { return half == Half::Upper ? Family::KPlus : Family::KMinus; }

CheckRecord make_record(std::string name, std::string quantifier, double tolerance) {
    CheckRecord r;
    r.name = std::move(name);
    r.quantifier = std::move(quantifier);
    r.tolerance = tolerance;
    return r;
}

// Uniform point of a closed box, optionally shrunk towards its center.
Point point_in(const Box& b, Rng& rng, double shrink = 1.0) {
    const double cx = 0.5 * (to_double(b.x_lo) + to_double(b.x_hi));
    const double cy = 0.5 * (to_double(b.y_lo) + to_double(b.y_hi));
    const double a = 0.5 * (to_double(b.x_hi) - to_double(b.x_lo)) * shrink;
    return {cx + rng.uniform(-a, a), cy + rng.uniform(-a, a)};
}

// Uniform point on the boundary of a square box.
Point point_on_edge(const Box& b, Rng& rng) {
    const double x0 = to_double(b.x_lo), x1 = to_double(b.x_hi);
    const double y0 = to_double(b.y_lo), y1 = to_double(b.y_hi);
    const double s = rng.uniform();
    switch (rng.integer(0, 3)) {
        case 0: return {x0 + s * (x1 - x0), y0};
        case 1: return {x0 + s * (x1 - x0), y1};
        case 2: return {x0, y0 + s * (y1 - y0)};
        default: return {x1, y0 + s * (y1 - y0)};
    }
}

// Random square of levels <= n_max in one period, levels weighted equally.
SquareSpec random_square(Family f, int n_max, Rng& rng) {
    const int n = static_cast<int>(rng.integer(0, n_max));
    return SquareSpec{f, n, rng.integer(0, (std::int64_t{1} << n) - 1)};
}

std::string count_text(std::size_t n, const std::string& what) {
    std::ostringstream os;
    os << n << " " << what;
    return os.str();
}

}  // namespace

bool in_s_square(Half half, Point frame_point, int n_max) {
    return locate_square(actual_point(half, frame_point), {s_family(half)}, n_max).has_value();
}

std::vector<Point> sample_domain(Half half, int n_max, std::size_t count, Rng& rng) {
    std::vector<Point> out;
    out.reserve(count);
    const double top = to_double(kStripHeight);
    for (std::size_t s = 0; s < count; ++s) {
        const double x = (static_cast<double>(s) + rng.uniform()) / static_cast<double>(count);
        for (;;) {
            const Point z{x, rng.uniform(0.0, top)};
            if (z.imag() > 0.0 && !in_s_square(half, z, n_max)) {
                out.push_back(z);
                break;
            }
        }
    }
    return out;
}

CheckRecord check_periodicity(const GluedPotential& glued, std::size_t count, Rng& rng) {
    CheckRecord r = make_record("periodicity", count_text(count, "points of the strip, shifts by 1"),
                                inequality_tolerance(glued.h()));
    const double top = to_double(kStripHeight);
    for (std::size_t s = 0; s < count; ++s) {
        const Point z{rng.uniform(-2.0, 2.0), rng.uniform(-top, top)};
        r.add(-std::abs(glued.evaluate(z + 1.0) - glued.evaluate(z)), z);
    }
    return r;
}

CheckRecord check_intermediate_suite(const GluedPotential& glued, std::size_t count, Rng& rng) {
    CheckRecord r = make_record("intermediate", count_text(count, "points of D0 (both halves), M u(z/2) - u(z)"),
                                inequality_tolerance(glued.h()));
    for (Half half : {Half::Upper, Half::Lower}) {
        const double M = glued.model(half).M;
        for (const Point z : sample_domain(half, glued.n_max(), count / 2, rng)) {
            r.add(M * glued.frame_value(half, 0.5 * z) - glued.frame_value(half, z), actual_point(half, z));
        }
    }
    return r;
}

CheckRecord check_selfsimilarity(const GluedPotential& glued, std::size_t count, Rng& rng) {
    CheckRecord r = make_record("selfsimilarity",
                                count_text(count, "pairs (z in D0, gamma_{n,k}), u(gamma z) - M^-n u(z)"),
                                inequality_tolerance(glued.h()));
    const int n_max = glued.n_max();
    for (Half half : {Half::Upper, Half::Lower}) {
        const double M = glued.model(half).M;
        for (const Point z : sample_domain(half, n_max, count / 2, rng)) {
            const GroupElement g{static_cast<int>(rng.integer(1, n_max)), rng.integer(0, (std::int64_t{1} << n_max) - 1)};
            const double lhs = glued.frame_value(half, apply(g, z));
            r.add(lhs - std::pow(M, -g.n) * glued.frame_value(half, z), actual_point(half, apply(g, z)));
        }
    }
    return r;
}

CheckRecord check_negative_bounds(const GluedPotential& glued, Half half, std::size_t count, Rng& rng) {
    const HalfStripModel& md = glued.model(half);
    CheckRecord r = make_record(half == Half::Upper ? "negative" : "u1negative",
                                count_text(count, "points of K squares, levels <= N_max, -beta M^-n - u"),
                                inequality_tolerance(glued.h()));
    const Family f = k_family(half);
    for (std::size_t s = 0; s < count; ++s) {
        const SquareSpec sq = random_square(f, md.n_max, rng);
        // the closed K square lies in the open S square
        const Point z = point_in(sq.box(), rng);
        r.add(-md.beta * std::pow(md.M, -sq.n) - glued.evaluate(z), z);
    }
    return r;
}

CheckRecord check_sign_structure(const GluedPotential& glued, std::size_t count, Rng& rng) {
    CheckRecord r = make_record("sign structure",
                                count_text(count, "points: u on D0, -u in squares, -|u| on R; tolerance is the field resolution"),
                                glued.resolution());
    const int n_max = glued.n_max();
    for (std::size_t s = 0; s < count; ++s) {
        const Half half = s % 2 ? Half::Lower : Half::Upper;
        switch (s % 3) {
            case 0: {
                const Point z = sample_domain(half, n_max, 1, rng).front();
                r.add(glued.frame_value(half, z), actual_point(half, z));
                break;
            }
            case 1: {
                const Point z = point_in(random_square(s_family(half), n_max, rng).box(), rng, 0.999);
                const double v = glued.evaluate(z);
                r.add(v < 0.0 ? -v : -1.0, z);
                break;
            }
            default: {
                const Point z{rng.uniform(-1.0, 2.0), 0.0};
                r.add(-std::abs(glued.evaluate(z)), z);
            }
        }
    }
    return r;
}

CheckRecord check_continuity(const GluedPotential& glued, std::size_t count, Rng& rng) {
    const double h = glued.h();
    CheckRecord r = make_record("continuity", count_text(count, "square edge points, |u(inside) - u(outside)| at distance h/100"),
                                5.0 * h);
    for (std::size_t s = 0; s < count; ++s) {
        const Half half = s % 2 ? Half::Lower : Half::Upper;
        const SquareSpec sq = random_square(s_family(half), glued.n_max(), rng);
        const Box b = sq.box();
        const Point e = point_on_edge(b, rng);
        const Point c{0.5 * (to_double(b.x_lo) + to_double(b.x_hi)), 0.5 * (to_double(b.y_lo) + to_double(b.y_hi))};
        const Point dir = (e - c) / std::abs(e - c);
        const double d = 0.01 * h;
        const double jump = std::abs(glued.evaluate(e + d * dir) - glued.evaluate(e - d * dir));
        r.add(-jump, e);
    }
    return r;
}

const char* stratum_name(Stratum s) {
    switch (s) {
        case Stratum::Domain: return "domain";
        case Stratum::SquareInterior: return "square interior";
        case Stratum::SquareBoundary: return "square boundary";
        case Stratum::RealAxis: return "real axis";
    }
    return "?";
}

int circle_sample_count(int radius_cells, int minimum) {
    return std::max(minimum, static_cast<int>(std::ceil(8.0 * std::numbers::pi * radius_cells)));
}

std::vector<CheckRecord> check_subharmonic(const GluedPotential& glued, const SubharmonicOptions& options,
                                           Rng& rng) {
    if (options.circle_samples < 64) throw std::invalid_argument("sub-mean test needs at least 64 circle samples");
    const double h = glued.h();
    const double top = to_double(kStripHeight);
    const int n_max = glued.n_max();
    const ScalarFunction u = [&glued](Point z) { return glued.evaluate(z); };
    const DiskPredicate inside = [top](Point z, double r) { return std::abs(z.imag()) + r <= top; };
    std::vector<CheckRecord> out;
    for (Stratum st : {Stratum::Domain, Stratum::SquareInterior, Stratum::SquareBoundary, Stratum::RealAxis}) {
        std::size_t count = 0;
        switch (st) {
            case Stratum::Domain: count = options.domain_points; break;
            case Stratum::SquareInterior: count = options.square_points; break;
            case Stratum::SquareBoundary: count = options.boundary_points; break;
            case Stratum::RealAxis: count = options.axis_points; break;
        }
        std::ostringstream q;
        q << count << " points x radii {";
        for (std::size_t i = 0; i < options.radii_cells.size(); ++i) q << (i ? "," : "") << options.radii_cells[i] << "h";
        q << "}, >= " << options.circle_samples << " circle samples, arc spacing <= h/4";
        CheckRecord r = make_record(std::string("subharmonic: ") + stratum_name(st), q.str(), inequality_tolerance(h));
        for (std::size_t s = 0; s < count; ++s) {
            const Half half = s % 2 ? Half::Lower : Half::Upper;
            Point z;
            switch (st) {
                case Stratum::Domain:
                    z = actual_point(half, sample_domain(half, n_max, 1, rng).front());
                    break;
                case Stratum::SquareInterior:
                    z = point_in(random_square(s_family(half), n_max, rng).box(), rng, 0.999);
                    break;
                case Stratum::SquareBoundary:
                    z = point_on_edge(random_square(s_family(half), n_max, rng).box(), rng);
                    break;
                case Stratum::RealAxis:
                    z = Point{rng.uniform(0.0, 1.0), 0.0};
                    break;
            }
            for (int cells : options.radii_cells) {
                const double radius = cells * h;
                Point zc = z;
                // keep the disk inside the strip
                if (std::abs(zc.imag()) + radius > top) zc.imag(std::copysign(top - radius, zc.imag()));
                r.add(sub_mean_test(u, zc, radius, circle_sample_count(cells, options.circle_samples), inside), zc);
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

MajorantResult check_majorant(const GluedPotential& glued, int n, const SolverOptions& solver) {
    const int m = glued.cells_per_unit();
    const Rational band = kStripHeight * Rational(1, std::int64_t{1} << n);
    std::vector<double> bottom(m), top(m);
    const double yb = to_double(band);
    for (int i = 0; i < m; ++i) {
        const double x = static_cast<double>(i) / m;
        top[i] = glued.evaluate({x, yb});
        bottom[i] = glued.evaluate({x, -yb});
    }
    std::ostringstream origin;
    origin << "majorant v_" << n;
    SolverOptions so = solver;
    so.omega = 0.0;
    const Field v = solve_dirichlet(make_strip_problem(-band, band, m, bottom, top, origin.str()), so);
    MajorantResult res;
    res.n = n;
    const double tol = inequality_tolerance(glued.h());
    std::ostringstream q;
    q << "lattice nodes of |Im z| <= (4/3)2^-" << n << ", v_n - u";
    res.dominates = make_record("majorant v_" + std::to_string(n), q.str(), tol);
    res.axis = make_record("majorant v_" + std::to_string(n) + " on R", "lattice nodes of the real axis, v_n(x)", 0.0);
    const Grid& g = v.grid();
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const Point z{g.x(i), g.y(j)};
            const double diff = v.at(i, j) - glued.evaluate(z);
            res.dominates.add(diff, z);
            res.sup_difference = std::max(res.sup_difference, std::abs(diff));
            if (g.y(j) == 0.0) res.axis.add(v.at(i, j) > 0.0 ? v.at(i, j) : -1.0, z);
        }
    }
    return res;
}

std::vector<std::pair<Rational, Rational>> line_intervals(double x0, int n, bool k_family) {
    std::vector<std::pair<Rational, Rational>> out;
    const Family fams[2] = {k_family ? Family::KPlus : Family::SPlus, k_family ? Family::KMinus : Family::SMinus};
    for (Family f : fams) {
        const double shift = is_upper(f) ? 0.0 : 0.5;
        const auto k0 = static_cast<std::int64_t>(std::llround(std::ldexp(x0, n) - shift));
        for (std::int64_t k = k0 - 1; k <= k0 + 1; ++k) {
            const Box b = SquareSpec{f, n, k}.box();
            if (compare(x0, b.x_lo) >= 0 && compare(x0, b.x_hi) <= 0) out.emplace_back(b.y_lo, b.y_hi);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

double midpoint(const GluedPotential& glued, double x0, const std::pair<Rational, Rational>& iv, double step) {
    const double lo = to_double(iv.first), hi = to_double(iv.second);
    const int pieces = midpoint_pieces(iv, step);
    const double dy = (hi - lo) / pieces;
    double sum = 0.0;
    for (int q = 0; q < pieces; ++q) sum += glued.evaluate({x0, lo + (q + 0.5) * dy});
    return sum * dy;
}

}  // namespace

LinePieces line_pieces(double x0, int n) {
    LinePieces out;
    out.k = line_intervals(x0, n, true);
    for (const auto& iv : line_intervals(x0, n, false)) {
        Rational lo = iv.first;
        for (const auto& k : out.k) {
            if (k.first < lo || k.second > iv.second) continue;
            if (lo < k.first) out.rest.emplace_back(lo, k.first);
            lo = k.second;
        }
        if (lo < iv.second) out.rest.emplace_back(lo, iv.second);
    }
    return out;
}

int midpoint_pieces(const std::pair<Rational, Rational>& iv, double step) {
    return static_cast<int>(std::ceil((to_double(iv.second) - to_double(iv.first)) / step - 1e-12));
}

LineIntegrals line_decay(const GluedPotential& glued, double x0, int n, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("quadrature step must be positive");
    const LinePieces pieces = line_pieces(x0, n);
    LineIntegrals out;
    double rest = 0.0;
    for (const auto& iv : pieces.rest) rest += midpoint(glued, x0, iv, step);
    for (const auto& iv : pieces.k) out.over_k += midpoint(glued, x0, iv, step);
    out.over_e = out.over_k + rest;
    return out;
}

std::vector<double> decay_lines(int n_max, std::size_t count, Rng& rng) {
    std::vector<double> out;
    for (std::size_t s = 0; s < count; ++s) out.push_back((static_cast<double>(s) + rng.uniform()) / count);
    for (int n = 0; n <= n_max; ++n) {
        const std::int64_t per = std::int64_t{1} << n;
        for (Family f : {Family::SPlus, Family::KPlus, Family::SMinus, Family::KMinus}) {
            for (std::int64_t k = 0; k < per; ++k) {
                const Box b = SquareSpec{f, n, k}.box();
                for (const Rational& e : {b.x_lo, b.x_hi}) {
                    double x = to_double(e);
                    x -= std::floor(x);
                    out.push_back(x);
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double estimate_c(const std::vector<double>& a) {
    double c = 1.0;
    for (std::size_t n = 1; n < a.size(); ++n) {
        if (!(a[n] > 0.0) || a[n] >= 1.0) continue;
        c = std::max(c, std::pow(a[n], -1.0 / static_cast<double>(n)));
    }
    return c;
}

DecayTable decay_table(const GluedPotential& glued, const std::vector<double>& lines, double slack) {
    DecayTable t;
    t.lines = lines.size();
    const double beta = glued.beta_min(), M = glued.M_max();
    const double step = glued.h();
    std::vector<double> a;
    for (int n = 0; n <= glued.n_max(); ++n) {
        DecayRow row;
        row.n = n;
        row.a_n = std::numeric_limits<double>::infinity();
        row.bound = (4.0 / 7.0) * std::ldexp(1.0, -n) * beta * std::pow(M, -n);
        bool ordered = true;
        for (double x0 : lines) {
            if (line_intersection_length(x0, n) < Rational(4, 7) * Rational(1, std::int64_t{1} << n)) t.chords_ok = false;
            const LineIntegrals li = line_decay(glued, x0, n, step);
            if (!(li.over_e <= li.over_k && li.over_k <= 0.0)) ordered = false;
            if (std::abs(li.over_k) < row.a_n) {
                row.a_n = std::abs(li.over_k);
                row.worst_x0 = x0;
            }
        }
        t.ordered = t.ordered && ordered;
        row.pass = ordered && row.a_n >= row.bound * (1.0 - slack);
        if (row.a_n >= 1.0) t.anomalies.push_back(n);
        a.push_back(row.a_n);
        t.rows.push_back(row);
    }
    t.c = estimate_c(a);
    t.c_predicted = 2.0 * M;
    return t;
}

}  // namespace selfsim
