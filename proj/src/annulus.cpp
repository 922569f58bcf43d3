#include "selfsim/annulus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace selfsim {

namespace {

constexpr double kPi = std::numbers::pi;

// zeta = exp((3 eps / 4) z)
Point from_strip(Point z, double eps) { return std::exp((3.0 * eps / 4.0) * z); }

CheckRecord record(std::string name, std::string quantifier, double tolerance) {
    CheckRecord r;
    r.name = std::move(name);
    r.quantifier = std::move(quantifier);
    r.tolerance = tolerance;
    return r;
}

// Margin of a strict sign condition: positive part kept, zero counted as a failure.
double strict_positive(double v) { return v > 0.0 ? v : v - 1.0; }

}  // namespace

Point map_to_strip(Point zeta, double eps) {
    if (zeta == Point{0.0, 0.0}) throw DomainError("log is undefined at zeta = 0");
    return (4.0 / (3.0 * eps)) * Point{std::log(std::abs(zeta)), std::arg(zeta)};
}

InterfaceSlope interface_slope(const GluedPotential& glued, double eps) {
    double sup = 0.0;
    for (Half half : {Half::Upper, Half::Lower}) {
        const HalfStripModel& md = glued.model(half);
        sup = std::max(sup, row_derivative(md.base, md.base.grid().ny - 1, -1).max());
        for (const Field& f : md.corner_patches) {
            const Grid& g = f.grid();
            // one-sided d/dy on the patch's last row, Im z = 4/3
            for (int i = 0; i < g.nx; ++i) {
                const double d = (3.0 * f.at(i, g.ny - 1) - 4.0 * f.at(i, g.ny - 2) + f.at(i, g.ny - 3)) / (2.0 * g.h);
                sup = std::max(sup, d);
            }
        }
    }
    return InterfaceSlope{(4.0 / (3.0 * eps)) * sup};
}

double choose_a_out(const InterfaceSlope& slope, double lambda) {
    if (!(slope.sup_inner > 0.0) || !(lambda > 0.0)) throw std::invalid_argument("degenerate interface slope");
    return 2.0 * slope.sup_inner / lambda;
}

AnnulusPotential::AnnulusPotential(const GluedPotential& glued, double eps, double a_out)
    : glued_(&glued), eps_(eps) {
    if (!(eps > 0.0) || !(eps < kPi / 4.0)) throw std::invalid_argument("eps must lie in (0, pi/4)");
    lambda_ = kPi / (2.0 * (kPi - eps));
    window_ = (4.0 / (3.0 * eps)) * std::log(2.0);
    if (window_ < 1.5) throw std::invalid_argument("annulus window shorter than 1.5 periods; decrease eps");
    slope_ = interface_slope(glued, eps);
    a_out_ = a_out > 0.0 ? a_out : choose_a_out(slope_, lambda_);
}

bool AnnulusPotential::in_sector(Point zeta) const { return std::abs(std::arg(zeta)) <= eps_; }

double AnnulusPotential::outer(Point zeta) const {
    double theta = std::arg(zeta);
    if (theta < 0.0) theta += 2.0 * kPi;
    return 1.0 + a_out_ * std::pow(std::abs(zeta), lambda_) * std::cos(lambda_ * (theta - kPi));
}

double AnnulusPotential::evaluate(Point zeta) const {
    const double r = std::abs(zeta);
    if (!(r >= 1.0 - 1e-12 && r <= 2.0 + 1e-12)) throw DomainError("point outside the closed annulus 1 <= |zeta| <= 2");
    if (!in_sector(zeta)) return outer(zeta);
    Point z = map_to_strip(zeta, eps_);
    const double top = to_double(kStripHeight);
    // arg = +-eps exactly lands on the strip edge up to rounding
    if (std::abs(z.imag()) > top) z.imag(std::copysign(top, z.imag()));
    return glued_->evaluate(z);
}

double AnnulusPotential::inf() const {
    const double t = std::max(glued_->upper().t, glued_->lower().t);
    return -t * glued_->upper().green.cap;
}

PropertyTwo check_property_ii(const AnnulusPotential& pot, double c, int count, double slack) {
    if (count < 2) throw std::invalid_argument("need at least two radii");
    const GluedPotential& glued = pot.glued();
    const double jac = 3.0 * pot.eps() / 4.0;
    const double h = glued.h();
    PropertyTwo out;
    std::ostringstream q;
    q << count << " radii of [1,2] x levels 0.." << glued.n_max() << ", (-delta_n - integral)/delta_n";
    out.record = record("property (ii)", q.str(), 0.0);
    out.consistency = record("property (ii) chart consistency", "strip line vs theta quadrature, relative difference", 1e-9);
    for (int i = 0; i < count; ++i) {
        const double r = 1.0 + static_cast<double>(i) / (count - 1);
        const double x0 = pot.strip_scale() * std::log(r);
        for (int n = 0; n <= glued.n_max(); ++n) {
            PropertyTwoRow row;
            row.r = r;
            row.n = n;
            row.delta = n == 0 ? jac * (4.0 / 7.0) * glued.beta_min() * (1.0 - slack)
                               : jac * std::pow(c, -n) * (1.0 - slack);
            row.integral = jac * line_decay(glued, x0, n, h).over_e;
            // same cells as the strip quadrature, in the angle variable
            const LinePieces lp = line_pieces(x0, n);
            for (const auto* part : {&lp.k, &lp.rest}) {
                for (const auto& iv : *part) {
                    const double t0 = jac * to_double(iv.first), t1 = jac * to_double(iv.second);
                    const int pieces = midpoint_pieces(iv, h);
                    const double dt = (t1 - t0) / pieces;
                    for (int p = 0; p < pieces; ++p) row.direct += pot.evaluate(std::polar(r, t0 + (p + 0.5) * dt)) * dt;
                }
            }
            row.pass = row.integral <= -row.delta;
            out.record.add((-row.delta - row.integral) / row.delta, Point{r, static_cast<double>(n)});
            const double scale = std::max(std::abs(row.integral), 1e-300);
            out.consistency.add(-std::abs(row.integral - row.direct) / scale, Point{r, static_cast<double>(n)});
            out.rows.push_back(row);
        }
    }
    return out;
}

namespace {

// A point of a random square (family of the half, level <= n_max) whose
// strip abscissa lies in [0, window]; `edge` puts it on the boundary.
Point square_point_in_window(const AnnulusPotential& pot, Half half, bool edge, Rng& rng) {
    const int n_max = pot.glued().n_max();
    const Family f = half == Half::Upper ? Family::SPlus : Family::SMinus;
    for (;;) {
        const int n = static_cast<int>(rng.integer(0, n_max));
        const auto kmax = static_cast<std::int64_t>(std::ceil(std::ldexp(pot.window(), n)));
        const Box b = SquareSpec{f, n, rng.integer(0, kmax)}.box();
        const double x0 = to_double(b.x_lo), x1 = to_double(b.x_hi), y0 = to_double(b.y_lo), y1 = to_double(b.y_hi);
        Point z;
        if (edge) {
            const double s = rng.uniform();
            switch (rng.integer(0, 3)) {
                case 0: z = {x0 + s * (x1 - x0), y0}; break;
                case 1: z = {x0 + s * (x1 - x0), y1}; break;
                case 2: z = {x0, y0 + s * (y1 - y0)}; break;
                default: z = {x1, y0 + s * (y1 - y0)};
            }
        } else {
            const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1), a = 0.4995 * (x1 - x0);
            z = {cx + rng.uniform(-a, a), cy + rng.uniform(-a, a)};
        }
        if (z.real() >= 0.0 && z.real() <= pot.window()) return z;
    }
}

}  // namespace

std::vector<CheckRecord> check_components(const AnnulusPotential& pot, std::size_t count, Rng& rng) {
    const GluedPotential& glued = pot.glued();
    const double h = glued.h();
    const double eps = pot.eps();
    std::vector<CheckRecord> out;
    auto q = [count](const char* what) {
        std::ostringstream os;
        os << count << " " << what;
        return os.str();
    };
    CheckRecord inside = record("components: square interiors", q("points of squares meeting Q, w < 0"), 0.0);
    CheckRecord edges = record("components: square edges", q("points of square edges in Q, 5h - |w|"), 0.0);
    CheckRecord rest = record("components: rest of Q", q("points of Q off the squares, w >= 0 to the field resolution"),
                              glued.resolution());
    CheckRecord outer = record("components: outer sector", q("points with eps < |arg| <= pi, w - 1"), 0.0);
    for (std::size_t s = 0; s < count; ++s) {
        const Half half = s % 2 ? Half::Lower : Half::Upper;
        const double sign = half == Half::Upper ? 1.0 : -1.0;
        {
            const Point z = square_point_in_window(pot, half, false, rng);
            const Point zeta = from_strip(z, eps);
            inside.add(strict_positive(-pot.evaluate(zeta)), zeta);
        }
        {
            const Point z = square_point_in_window(pot, half, true, rng);
            const Point zeta = from_strip(z, eps);
            edges.add(5.0 * h - std::abs(pot.evaluate(zeta)), zeta);
        }
        {
            // strip sample of the perforated half, shifted into the window
            Point z = sample_domain(half, glued.n_max(), 1, rng).front();
            z += std::floor(rng.uniform(0.0, pot.window()));
            if (z.real() > pot.window()) z -= 1.0;
            const Point zeta = from_strip(Point{z.real(), sign * z.imag()}, eps);
            rest.add(pot.evaluate(zeta), zeta);
        }
        {
            const double theta = rng.uniform(eps, kPi) * (rng.integer(0, 1) ? 1.0 : -1.0);
            const Point zeta = std::polar(rng.uniform(1.0, 2.0), std::abs(theta) <= eps ? kPi : theta);
            outer.add(pot.evaluate(zeta) - 1.0, zeta);
        }
    }
    CheckRecord disjoint = record("components: E_n disjoint", "exact pairwise test of all S squares, both families", 0.0);
    const DisjointResult d = check_disjoint(glued.n_max(), {Family::SPlus, Family::SMinus});
    disjoint.add(d.disjoint ? 0.0 : -1.0, Point{});
    for (CheckRecord* r : {&inside, &edges, &rest, &outer, &disjoint}) out.push_back(std::move(*r));
    return out;
}

std::vector<CheckRecord> check_annulus_subharmonic(const AnnulusPotential& pot, std::size_t count,
                                                   int circle_samples, Rng& rng) {
    const GluedPotential& glued = pot.glued();
    const double h = glued.h();
    const double eps = pot.eps();
    const double tol = inequality_tolerance(h);
    const ScalarFunction w = [&pot](Point zeta) { return pot.evaluate(zeta); };
    const DiskPredicate inside = [](Point zeta, double rho) {
        const double r = std::abs(zeta);
        return r - rho >= 1.0 && r + rho <= 2.0;
    };
    const char* names[] = {"annulus subharmonic: sector", "annulus subharmonic: squares",
                           "annulus subharmonic: square edges", "annulus subharmonic: interface rays",
                           "annulus subharmonic: outer sector", "annulus subharmonic: real axis"};
    std::vector<CheckRecord> out;
    for (int stratum = 0; stratum < 6; ++stratum) {
        std::ostringstream q;
        q << count << " points x radii {2h,4h,8h} (strip metric), >= " << circle_samples << " circle samples, arc spacing <= h/4";
        CheckRecord rec = record(names[stratum], q.str(), tol);
        for (std::size_t s = 0; s < count; ++s) {
            const Half half = s % 2 ? Half::Lower : Half::Upper;
            const double sign = half == Half::Upper ? 1.0 : -1.0;
            Point zeta;
            switch (stratum) {
                case 0: {
                    Point z = sample_domain(half, glued.n_max(), 1, rng).front();
                    z += std::floor(rng.uniform(0.0, pot.window()));
                    if (z.real() > pot.window()) z -= 1.0;
                    zeta = from_strip(Point{z.real(), sign * z.imag()}, eps);
                    break;
                }
                case 1: zeta = from_strip(square_point_in_window(pot, half, false, rng), eps); break;
                case 2: zeta = from_strip(square_point_in_window(pot, half, true, rng), eps); break;
                case 3: zeta = std::polar(rng.uniform(1.0, 2.0), sign * eps); break;
                case 4: zeta = std::polar(rng.uniform(1.0, 2.0), sign * rng.uniform(eps, kPi)); break;
                default: zeta = std::polar(rng.uniform(1.0, 2.0), 0.0); break;
            }
            for (int cells : {2, 4, 8}) {
                const double rho = cells * h * (3.0 * eps / 4.0) * std::abs(zeta);
                // pull the disk inside the annulus along the ray
                const double r = std::clamp(std::abs(zeta), 1.0 + rho * 1.0000001, 2.0 - rho * 1.0000001);
                const Point zc = std::polar(r, std::arg(zeta));
                rec.add(sub_mean_test(w, zc, rho, circle_sample_count(cells, circle_samples), inside), zc);
            }
        }
        out.push_back(std::move(rec));
    }
    return out;
}

CheckRecord check_chart_agreement(const AnnulusPotential& pot, std::size_t count) {
    const double h = pot.glued().h();
    std::ostringstream q;
    q << count << " points on each ray arg = +-eps, 5h - |inner - outer|";
    CheckRecord rec = record("chart agreement", q.str(), 0.0);
    const double top = to_double(kStripHeight);
    for (std::size_t s = 0; s < count; ++s) {
        const double r = 1.0 + (static_cast<double>(s) + 0.5) / count;
        for (double sign : {1.0, -1.0}) {
            const Point zeta = std::polar(r, sign * pot.eps());
            const double x = pot.strip_scale() * std::log(r);
            const double inner = pot.glued().evaluate(Point{x, sign * top});
            rec.add(5.0 * h - std::abs(inner - pot.outer(zeta)), zeta);
        }
    }
    return rec;
}

}  // namespace selfsim
