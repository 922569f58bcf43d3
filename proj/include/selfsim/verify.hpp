#pragma once

// Sampled checks of the inequalities behind the construction, the line
// integrals over the square sets and the decay base c.

#include "selfsim/assembler.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace selfsim {

// Portable uniform deviates: the top 53 bits of a 64-bit Mersenne twister.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    double uniform();                      // [0, 1)
    double uniform(double lo, double hi);  // [lo, hi)
    std::int64_t integer(std::int64_t lo, std::int64_t hi);  // [lo, hi]

private:
    std::uint64_t next();
    std::mt19937_64 state_;
};

enum class Verdict { Pass, PassDiscretization, Fail };

const char* verdict_name(Verdict v);

struct CheckRecord {
    std::string name;
    std::string quantifier;
    double worst_margin = 0.0;
    double tolerance = 0.0;
    Point witness{};
    std::size_t samples = 0;
    // Count of margins below -tolerance.
    std::size_t violations = 0;

    Verdict verdict() const;
    bool pass() const { return verdict() != Verdict::Fail; }
    // Folds one sample into the record.
    void add(double margin, Point where);
};

// Additive tolerance 10 h^2 used by every continuum inequality.
double inequality_tolerance(double h);

// True when the upper-frame point lies in a closed S square of the half at
// level <= n_max.
bool in_s_square(Half half, Point frame_point, int n_max);

// Points of the perforated half strip (upper frame), x stratified over [0, 1).
std::vector<Point> sample_domain(Half half, int n_max, std::size_t count, Rng& rng);

CheckRecord check_periodicity(const GluedPotential& glued, std::size_t count, Rng& rng);
CheckRecord check_intermediate_suite(const GluedPotential& glued, std::size_t count, Rng& rng);
CheckRecord check_selfsimilarity(const GluedPotential& glued, std::size_t count, Rng& rng);
// u <= -beta M^-n on the K squares of one half.
CheckRecord check_negative_bounds(const GluedPotential& glued, Half half, std::size_t count, Rng& rng);
// Sign structure: u > 0 on the perforated domain, u < 0 inside squares,
// u = 0 on the real axis; margins are the signed values.
CheckRecord check_sign_structure(const GluedPotential& glued, std::size_t count, Rng& rng);
// |inside limit - outside limit| across square edges, tolerance 5h.
CheckRecord check_continuity(const GluedPotential& glued, std::size_t count, Rng& rng);

// Samples on a circle of radius `radius_cells` lattice spacings: arc spacing
// at most h/4, and never fewer than `minimum`.
int circle_sample_count(int radius_cells, int minimum);

enum class Stratum { Domain, SquareInterior, SquareBoundary, RealAxis };

const char* stratum_name(Stratum s);

struct SubharmonicOptions {
    std::vector<int> radii_cells{2, 4, 8};
    int circle_samples = 64;
    std::size_t domain_points = 6000;
    std::size_t square_points = 2000;
    std::size_t boundary_points = 2000;
    std::size_t axis_points = 1000;
};

// One record per stratum.
std::vector<CheckRecord> check_subharmonic(const GluedPotential& glued, const SubharmonicOptions& options,
                                           Rng& rng);

struct MajorantResult {
    int n = 0;
    CheckRecord dominates;   // v_n - u over lattice nodes of the band
    CheckRecord axis;        // v_n on the real axis, must be > 0
    double sup_difference = 0.0;
};

// v_n: equal to u off the band |Im z| < (4/3) 2^-n, harmonic inside it.
MajorantResult check_majorant(const GluedPotential& glued, int n, const SolverOptions& solver);

struct LineIntegrals {
    double over_e = 0.0;  // over l cap E_n
    double over_k = 0.0;  // over l cap K_n
};

// Exact y-intervals where the line Re z = x0 meets the level-n squares of
// the S (or K) families of both halves.
std::vector<std::pair<Rational, Rational>> line_intervals(double x0, int n, bool k_family);

// The chords of l cap K_n, and the rest of l cap E_n cut at those chords.
struct LinePieces {
    std::vector<std::pair<Rational, Rational>> k;
    std::vector<std::pair<Rational, Rational>> rest;
};

LinePieces line_pieces(double x0, int n);

// Number of equal midpoint cells of length <= step on an interval.
int midpoint_pieces(const std::pair<Rational, Rational>& interval, double step);

// Composite midpoint rule on the line pieces with step <= `step`; the
// integral over E_n is the one over K_n plus the rest.
LineIntegrals line_decay(const GluedPotential& glued, double x0, int n, double step);

struct DecayRow {
    int n = 0;
    double a_n = 0.0;       // min over lines of |integral over l cap K_n|
    double bound = 0.0;     // (4/7) 2^-n beta~ M~^-n
    double worst_x0 = 0.0;  // line attaining a_n
    bool pass = false;      // a_n >= bound (1 - slack) and both integrals ordered
};

struct DecayTable {
    std::vector<DecayRow> rows;
    double c = 0.0;
    double c_predicted = 0.0;  // 2 M~
    // Levels with a_n >= 1, excluded from the estimate of c.
    std::vector<int> anomalies;
    std::size_t lines = 0;
    bool chords_ok = true;  // line_intersection_length >= (4/7) 2^-n on every line
    bool ordered = true;    // integral over E_n <= integral over K_n <= 0
};

// Line positions: `count` stratified over [0, 1) plus the projection
// endpoints of all square families at levels <= n_max.
std::vector<double> decay_lines(int n_max, std::size_t count, Rng& rng);

DecayTable decay_table(const GluedPotential& glued, const std::vector<double>& lines, double slack);

// c = max over n >= 1 of a_n^(-1/n).
double estimate_c(const std::vector<double>& a);

}  // namespace selfsim
