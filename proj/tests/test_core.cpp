#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "medialkit/core.hpp"

using namespace medialkit;

TEST_CASE("default tolerances match the documented values") {
    Tolerances t = default_tolerances();
    CHECK(t.eps_dist == 1e-9);
    CHECK(t.eps_cluster == 1e-5);
    CHECK(t.sep_tol == 1e-3);
    CHECK(t.t_max == 1e6);
    CHECK(t.seed == 42);
    CHECK(t.sep_tol > t.eps_cluster);

    Tolerances again = default_tolerances();
    CHECK(again.eps_dist == t.eps_dist);
    CHECK(again.seed == t.seed);
}

TEST_CASE("tolerance chain violations are rejected") {
    Tolerances t = default_tolerances();
    t.eps_cluster = t.eps_dist / 2.0;
    CHECK_THROWS_AS(t.validate(), ValidationError);

    Tolerances z = default_tolerances();
    z.sep_tol = -1.0;
    CHECK_THROWS_AS(z.validate(), ValidationError);

    Tolerances big = default_tolerances();
    big.sep_tol = big.t_max * 2.0;
    CHECK_THROWS_AS(big.validate(), ValidationError);
}

TEST_CASE("triangle inequality on random samples") {
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        Vec u{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
        Vec v{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
        CHECK(norm(u + v) <= norm(u) + norm(v) + 1e-12);
    }
}

TEST_CASE("vector arithmetic basics") {
    Vec a{1, 2, 3}, b{-4, 0.5, 2};
    CHECK(dot(a, b) == doctest::Approx(-4 + 1 + 6));
    Vec c = cross(Vec{1, 0, 0}, Vec{0, 1, 0});
    CHECK(c.z == doctest::Approx(1.0));
    CHECK(norm(normalized(Vec{3, 4, 0})) == doctest::Approx(1.0));
    CHECK_THROWS_AS(normalized(Vec{0, 0, 0}), ValidationError);
    CHECK(is_finite(a));
    CHECK_FALSE(is_finite(Vec{std::nan(""), 0, 0}));
}

TEST_CASE("any_orthogonal is orthogonal and unit") {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        Vec d = rng.unit_dir(3) * rng.uniform(0.1, 5.0);
        Vec o = any_orthogonal(d);
        CHECK(std::abs(dot(o, d)) < 1e-9 * norm(d));
        CHECK(norm(o) == doctest::Approx(1.0));
    }
}

TEST_CASE("direction lattices are unit and spread") {
    for (const auto& v : circle_directions(16)) CHECK(norm(v) == doctest::Approx(1.0));
    auto sph = fibonacci_sphere(128);
    CHECK(sph.size() == 128);
    for (const auto& v : sph) CHECK(norm(v) == doctest::Approx(1.0));
    // phase 0 makes the coordinate axes available in circle fans
    auto c = circle_directions(16);
    CHECK(dist(c[0], Vec{1, 0}) < 1e-12);
    CHECK(dist(c[4], Vec{0, 1}) < 1e-12);
    CHECK(dist(c[8], Vec{-1, 0}) < 1e-12);
}

TEST_CASE("rng streams are deterministic") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}
