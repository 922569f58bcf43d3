#include "selfsim/geometry.hpp"

#include <doctest.h>

#include <random>

using namespace selfsim;

TEST_SUITE("geometry") {

TEST_CASE("apply on fixed elements") {
    CHECK((selfsim::apply(GroupElement{0, 0}, Point{0.3, 0.4}) == Point{0.3, 0.4}));
    CHECK((selfsim::apply(GroupElement{1, 1}, Point{0.2, 0.4}) == Point{0.6, 0.2}));
    CHECK((selfsim::apply(GroupElement{2, 3}, Point{0.0, 1.0}) == Point{0.75, 0.25}));
    const ExactPoint e = selfsim::apply(GroupElement{2, 3}, ExactPoint{Rational(0), Rational(1)});
    CHECK(e.re == Rational(3, 4));
    CHECK(e.im == Rational(1, 4));
}

TEST_CASE("composition law on random pairs") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> level(0, 10);
    std::uniform_int_distribution<int> index(-100, 100);
    for (int s = 0; s < 2000; ++s) {
        const GroupElement g1{level(rng), index(rng)};
        const GroupElement g2{level(rng), index(rng)};
        const ExactPoint z{Rational(index(rng), 7), Rational(index(rng), 11)};
        const GroupElement c = compose(g1, g2);
        REQUIRE(selfsim::apply(g2, apply(g1, z)) == apply(c, z));
        CHECK(c.n == g1.n + g2.n);
        CHECK(c.k == g2.k * (std::int64_t{1} << g1.n) + g1.k);
    }
}

TEST_CASE("square families") {
    const SquareSpec s{Family::SPlus, 2, 3};
    CHECK(s.half_side() == Rational(3, 40));
    CHECK(s.center() == ExactPoint{Rational(3, 4), Rational(1, 4)});
    const SquareSpec k{Family::KMinus, 1, 1};
    CHECK(k.half_side() == Rational(1, 7));
    CHECK(k.center() == ExactPoint{Rational(3, 4), Rational(-1, 2)});
    for (Family f : {Family::SPlus, Family::SMinus}) {
        for (int n = 0; n <= 4; ++n) {
            for (std::int64_t j = -3; j <= 3; ++j) {
                const Box outer = SquareSpec{f, n, j}.box();
                const Box inner = SquareSpec{f == Family::SPlus ? Family::KPlus : Family::KMinus, n, j}.box();
                CHECK(outer.x_lo < inner.x_lo);
                CHECK(inner.x_hi < outer.x_hi);
                CHECK(outer.y_lo < inner.y_lo);
                CHECK(inner.y_hi < outer.y_hi);
            }
        }
    }
}

TEST_CASE("locate_square") {
    auto hit = locate_square(Point{0.0, 1.0}, {Family::SPlus}, 4);
    REQUIRE(hit);
    CHECK(hit->square == SquareSpec{Family::SPlus, 0, 0});
    CHECK_FALSE(hit->on_boundary);
    hit = locate_square(Point{0.5, 0.5}, {Family::SPlus}, 4);
    REQUIRE(hit);
    CHECK(hit->square == SquareSpec{Family::SPlus, 1, 1});
    // 0.65 is the top edge of S+_{1,1}: a boundary hit, not a miss
    hit = locate_square(ExactPoint{Rational(1, 2), Rational(13, 20)}, {Family::SPlus}, 4);
    REQUIRE(hit);
    CHECK(hit->on_boundary);
    CHECK_FALSE(locate_square(ExactPoint{Rational(1, 2), Rational(27, 40)}, {Family::SPlus, Family::SMinus}, 6));
}

TEST_CASE("locate_square inverts apply") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.29, 0.29);
    for (int s = 0; s < 500; ++s) {
        const int n = static_cast<int>(rng() % 5);
        const auto k = static_cast<std::int64_t>(rng() % 40) - 20;
        const Point c{u(rng), 1.0 + u(rng)};
        const auto hit = locate_square(selfsim::apply(GroupElement{n, k}, c), {Family::SPlus}, 4);
        REQUIRE(hit);
        CHECK(hit->square == SquareSpec{Family::SPlus, n, k});
    }
}

TEST_CASE("disjointness") {
    CHECK(check_disjoint(0).disjoint);
    CHECK(check_disjoint(6).disjoint);
    CHECK(check_disjoint(6, {Family::SPlus, Family::SMinus}).disjoint);
    const DisjointResult bad = check_disjoint(0, {Family::SPlus}, Rational(1, 2));
    REQUIRE_FALSE(bad.disjoint);
    REQUIRE(bad.witness);
    const auto [a, b] = *bad.witness;
    CHECK(a.n == 0);
    CHECK(b.n == 0);
    CHECK(std::abs(a.k - b.k) == 1);
}

TEST_CASE("projection cover") {
    auto has = [](const std::vector<SquareSpec>& v, SquareSpec s) {
        return std::find(v.begin(), v.end(), s) != v.end();
    };
    CHECK(has(projection_cover(Rational(0), 0), SquareSpec{Family::KPlus, 0, 0}));
    CHECK(has(projection_cover(Rational(1, 2), 0), SquareSpec{Family::KMinus, 0, 0}));
    const auto c = projection_cover(Rational(35, 100), 0);
    CHECK_FALSE(c.empty());
    for (const SquareSpec& s : c) CHECK(s.family == Family::KMinus);
    for (int n = 0; n <= 6; ++n) CHECK(projection_covers_period(n).covered);
}

TEST_CASE("line intersection length") {
    CHECK(line_intersection_length(Rational(0), 0) >= Rational(4, 7));
    CHECK(line_intersection_length(Rational(0), 2) >= Rational(1, 7));
    // x0 = 0.23 at level 1: K+_{1,0} spans [-1/7, 1/7], K-_{1,1} spans [1/4 - 1/7, 1/4 + 1/7]
    CHECK(line_intersection_length(Rational(23, 100), 1) == Rational(2, 7));
    std::mt19937_64 rng(11);
    for (int s = 0; s < 1000; ++s) {
        const int n = static_cast<int>(rng() % 7);
        const double x0 = std::ldexp(static_cast<double>(rng() >> 11), -53);
        CHECK(line_intersection_length(x0, n) >= Rational(4, 7) / Rational(std::int64_t{1} << n));
    }
}

TEST_CASE("period cell") {
    for (Half half : {Half::Upper, Half::Lower}) {
        const PeriodCell cell = make_period_cell(half, 4);
        const auto counts = cell.per_level_counts();
        REQUIRE(counts.size() == 5);
        for (int n = 0; n <= 4; ++n) CHECK(counts[n] == (1 << n));
        CHECK(cell.squares_inside_strip());
    }
}

TEST_CASE("exact compare") {
    CHECK(compare(0.3, Rational(3, 10)) != 0);
    CHECK(compare(0.5, Rational(1, 2)) == 0);
    CHECK(compare(0.25, Rational(1, 3)) < 0);
}

}
