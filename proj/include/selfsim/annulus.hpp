#pragma once

// Transport of the strip potential to the annulus 1 < |zeta| < 2 through
// z = (4/(3 eps)) log zeta, with a harmonic sector function outside the
// sector |arg zeta| < eps.

#include "selfsim/assembler.hpp"
#include "selfsim/verify.hpp"

#include <cmath>
#include <vector>

namespace selfsim {

// z = (4/(3 eps)) Log zeta; throws DomainError at zeta = 0.
Point map_to_strip(Point zeta, double eps);

struct InterfaceSlope {
    double sup_inner = 0.0;  // sup of (4/(3 eps)) du/dy on Im z = +-4/3
};

class AnnulusPotential {
public:
    // a_out <= 0 selects the amplitude from the interface slope.
    AnnulusPotential(const GluedPotential& glued, double eps, double a_out = 0.0);

    double eps() const { return eps_; }
    double lambda() const { return lambda_; }
    double a_out() const { return a_out_; }
    // (4/(3 eps)) log 2, the strip length covered by the annulus
    double window() const { return window_; }
    double strip_scale() const { return 4.0 / (3.0 * eps_); }
    const GluedPotential& glued() const { return *glued_; }
    const InterfaceSlope& slope() const { return slope_; }

    // w(zeta) on the closed annulus; throws DomainError outside it.
    double evaluate(Point zeta) const;
    double operator()(Point zeta) const { return evaluate(zeta); }

    // The outer chart 1 + a_out r^lambda cos(lambda (theta - pi)), theta in [0, 2 pi).
    double outer(Point zeta) const;
    bool in_sector(Point zeta) const;

    double sup() const { return 1.0 + a_out_ * std::pow(2.0, lambda_); }
    // Lowest value: the deepest point of the level-0 squares.
    double inf() const;

private:
    const GluedPotential* glued_;
    double eps_;
    double lambda_;
    double a_out_;
    double window_;
    InterfaceSlope slope_;
};

// sup over the lines Im z = +-4/3 (both halves, corner windows included) of
// the inner angular derivative (4/(3 eps)) du/dy.
InterfaceSlope interface_slope(const GluedPotential& glued, double eps);

// a_out = 2 sup(inner slope) / inf over r in [1,2] of d/dtheta[r^lambda cos(lambda(theta - pi))]
// at theta = eps, the latter being lambda.
double choose_a_out(const InterfaceSlope& slope, double lambda);

struct PropertyTwoRow {
    double r = 0.0;
    int n = 0;
    double integral = 0.0;  // via the strip line (times 3 eps / 4)
    double direct = 0.0;    // direct theta quadrature of w(r e^{i theta})
    double delta = 0.0;
    bool pass = false;
};

struct PropertyTwo {
    std::vector<PropertyTwoRow> rows;
    CheckRecord record;       // -delta - integral, tolerance 0
    CheckRecord consistency;  // strip vs theta quadrature
};

// Radii: `count` points of [1, 2] including both endpoints. delta_n are
// (3 eps / 4) c^-n (1 - slack) for n >= 1; level 0 uses the explicit
// bound (3 eps / 4)(4/7) beta~ (1 - slack).
PropertyTwo check_property_ii(const AnnulusPotential& pot, double c, int count, double slack);

// Negative components: square interiors meeting Q have w < 0, square edges
// |w| <= 5h, the rest of Q w > 0, the outer sector w >= 1, and the E_n
// pairwise disjoint.
std::vector<CheckRecord> check_components(const AnnulusPotential& pot, std::size_t count, Rng& rng);

// Sub-mean test on the annulus; radii are 2h, 4h, 8h measured in the strip
// metric and converted with |dzeta/dz|. Includes the interface rays.
std::vector<CheckRecord> check_annulus_subharmonic(const AnnulusPotential& pot, std::size_t count,
                                                   int circle_samples, Rng& rng);

// |inner - outer| along arg zeta = +-eps, tolerance 5h.
CheckRecord check_chart_agreement(const AnnulusPotential& pot, std::size_t count);

}  // namespace selfsim
