#pragma once

// Exact dyadic geometry of the semigroup z -> 2^-n (z + k) and the square
// families it generates in the strip |Im z| <= 4/3.

#include <boost/rational.hpp>

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace selfsim {

using Rational = boost::rational<std::int64_t>;
using Point = std::complex<double>;

struct ExactPoint {
    Rational re{0};
    Rational im{0};

    friend bool operator==(const ExactPoint&, const ExactPoint&) = default;
};

double to_double(const Rational& q);

// Sign of (x - q), decided exactly for every finite double x.
int compare(double x, const Rational& q);

// gamma_{n,k}(z) = 2^-n (z + k)
struct GroupElement {
    int n = 0;
    std::int64_t k = 0;

    friend bool operator==(const GroupElement&, const GroupElement&) = default;
};

ExactPoint apply(const GroupElement& g, const ExactPoint& z);
Point apply(const GroupElement& g, Point z);
Point apply_inverse(const GroupElement& g, Point z);

// The element equal to applying `first` and then `second`.
GroupElement compose(const GroupElement& first, const GroupElement& second);

enum class Family { SPlus, KPlus, SMinus, KMinus };

const char* family_name(Family f);
bool is_upper(Family f);
bool is_k_family(Family f);

enum class Containment { Outside, Boundary, Interior };

// Closed axis-aligned rectangle with rational corners.
struct Box {
    Rational x_lo, x_hi, y_lo, y_hi;

    Containment locate(const ExactPoint& z) const;
    Containment locate(Point z) const;
    bool intersects(const Box& other) const;
};

struct SquareSpec {
    Family family = Family::SPlus;
    int n = 0;
    std::int64_t k = 0;

    ExactPoint center() const;
    Rational half_side() const;
    Box box() const;

    friend bool operator==(const SquareSpec&, const SquareSpec&) = default;
};

std::string describe(const SquareSpec& s);

// Strip half-height 4/3, the line l_1 at 2/3 and the two half-side ratios.
inline const Rational kStripHeight{4, 3};
inline const Rational kMidLine{2, 3};
inline const Rational kSHalf{3, 10};
inline const Rational kKHalf{2, 7};

struct Located {
    SquareSpec square;
    bool on_boundary = false;
};

// First square (in the order the families are given) at level <= n_max
// containing z. Closed squares; boundary hits are flagged.
std::optional<Located> locate_square(Point z, std::initializer_list<Family> families,
                                     int n_max);
std::optional<Located> locate_square(const ExactPoint& z,
                                     std::initializer_list<Family> families, int n_max);

struct DisjointResult {
    bool disjoint = true;
    std::optional<std::pair<SquareSpec, SquareSpec>> witness;
};

// Pairwise test of all squares of the given S families at levels <= n_max
// over one period (plus wrap-around neighbours). `level0_half_side` replaces
// the level-0 half-side 3/10 (scaled by 2^-n at deeper levels).
DisjointResult check_disjoint(int n_max, std::initializer_list<Family> families = {Family::SPlus},
                              Rational level0_half_side = kSHalf);

// K-family squares at level n whose x-projection contains x0.
// Never empty; an empty cover throws std::logic_error.
std::vector<SquareSpec> projection_cover(const Rational& x0, int n);
std::vector<SquareSpec> projection_cover(double x0, int n);

// Total vertical chord length of l = {Re z = x0} through K_n^+ and K_n^-.
Rational line_intersection_length(const Rational& x0, int n);
Rational line_intersection_length(double x0, int n);

struct CoverResult {
    bool covered = true;
    std::optional<Rational> gap_start;
};

// Exact interval-union test that the K-projections at level n cover [0, 1).
CoverResult projection_covers_period(int n);

enum class Half { Upper, Lower };

// One unit period of the half strip with all S squares at levels 0..n_max.
// n_max = -1 gives the square-free strip.
struct PeriodCell {
    Half half = Half::Upper;
    int n_max = 0;
    Rational x_lo{0};
    std::vector<SquareSpec> squares;

    Rational y_lo() const;
    Rational y_hi() const;

    // Squares as boxes in the frame where the strip is 0 <= y <= 4/3
    // (the lower half is reflected through the real axis).
    std::vector<Box> upper_frame_boxes() const;

    // Per-level count of distinct k values; each must equal 2^n.
    std::vector<int> per_level_counts() const;
    // Every listed square lies strictly inside the open half strip.
    bool squares_inside_strip() const;
};

PeriodCell make_period_cell(Half half, int n_max);

// The S square of the given level/index for a half.
SquareSpec s_square(Half half, int n, std::int64_t k);
SquareSpec k_square(Half half, int n, std::int64_t k);

}  // namespace selfsim
