#include <doctest.h>

#include "dedt/geometry.hpp"

using namespace dedt;

TEST_CASE("apply with the identity transformation returns the box unchanged") {
    const BoundingBox b{3.5, -2.0, 17.0, 9.0};
    const BoundingBox r = apply(b, Transformation{0, 0, 0});
    CHECK(r.x == doctest::Approx(b.x));
    CHECK(r.y == doctest::Approx(b.y));
    CHECK(r.w == doctest::Approx(b.w));
    CHECK(r.h == doctest::Approx(b.h));
}

TEST_CASE("apply translates without resizing") {
    const BoundingBox r = apply(BoundingBox{0, 0, 10, 10}, Transformation{5, 0, 0});
    CHECK(r.x == doctest::Approx(5.0));
    CHECK(r.y == doctest::Approx(0.0));
    CHECK(r.w == doctest::Approx(10.0));
    CHECK(r.h == doctest::Approx(10.0));
}

TEST_CASE("apply scales about the center") {
    const BoundingBox r = apply(BoundingBox{0, 0, 10, 10}, Transformation{0, 0, std::log(2.0)});
    CHECK(r.w == doctest::Approx(20.0));
    CHECK(r.h == doctest::Approx(20.0));
    CHECK(r.x == doctest::Approx(-5.0));
    CHECK(r.y == doctest::Approx(-5.0));
}

TEST_CASE("apply then apply of the negated transformation round-trips") {
    Rng rng(42);
    for (int i = 0; i < 200; ++i) {
        const BoundingBox b{rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(1, 60),
                            rng.uniform(1, 60)};
        const Transformation t{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-0.6, 0.6)};
        const BoundingBox r = apply(apply(b, t), negate(t));
        CHECK(r.x == doctest::Approx(b.x).epsilon(1e-9));
        CHECK(r.y == doctest::Approx(b.y).epsilon(1e-9));
        CHECK(r.w == doctest::Approx(b.w).epsilon(1e-9));
        CHECK(r.h == doctest::Approx(b.h).epsilon(1e-9));
    }
}

TEST_CASE("iou oracle values") {
    const BoundingBox a{0, 0, 10, 10};
    CHECK(iou(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(iou(a, BoundingBox{100, 100, 5, 5}) == doctest::Approx(0.0));
    // 10x10 boxes overlapping by half horizontally: 50 / 150.
    CHECK(iou(a, BoundingBox{5, 0, 10, 10}) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("iou is symmetric and bounded on random boxes") {
    Rng rng(7);
    for (int i = 0; i < 500; ++i) {
        const BoundingBox a{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(0.5, 30),
                            rng.uniform(0.5, 30)};
        const BoundingBox b{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(0.5, 30),
                            rng.uniform(0.5, 30)};
        const double v = iou(a, b);
        CHECK(v == doctest::Approx(iou(b, a)).epsilon(1e-12));
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("sample_candidates yields n boxes with the identity first") {
    const BoundingBox prev{10, 10, 20, 20};
    Rng rng(3);
    const auto c = sample_candidates(prev, 50, SearchDistribution{4.0, 0.05}, rng);
    REQUIRE(c.size() == 50);
    CHECK(c[0].first.dx == 0.0);
    CHECK(c[0].first.dy == 0.0);
    CHECK(c[0].first.ds == 0.0);
    CHECK(c[0].second.x == doctest::Approx(prev.x));
    for (const auto& [t, box] : c) {
        CHECK(box.valid());
        CHECK(t.ds >= std::log(0.5));
        CHECK(t.ds <= std::log(2.0));
    }
}

TEST_CASE("sample_candidates with zero variance repeats the previous box") {
    const BoundingBox prev{5, 6, 7, 8};
    Rng rng(1);
    for (const auto& [t, box] : sample_candidates(prev, 20, SearchDistribution{0.0, 0.0}, rng)) {
        CHECK(box.x == doctest::Approx(prev.x));
        CHECK(box.y == doctest::Approx(prev.y));
        CHECK(box.w == doctest::Approx(prev.w));
        CHECK(box.h == doctest::Approx(prev.h));
    }
}

TEST_CASE("sample_candidates is deterministic under the seed") {
    const BoundingBox prev{0, 0, 32, 32};
    Rng a(99), b(99);
    const auto ca = sample_candidates(prev, 100, SearchDistribution{8.0, 0.05}, a);
    const auto cb = sample_candidates(prev, 100, SearchDistribution{8.0, 0.05}, b);
    for (std::size_t i = 0; i < ca.size(); ++i) {
        CHECK(ca[i].first.dx == cb[i].first.dx);
        CHECK(ca[i].first.dy == cb[i].first.dy);
        CHECK(ca[i].first.ds == cb[i].first.ds);
    }
}

TEST_CASE("center_distance is the Euclidean distance between centers") {
    CHECK(center_distance(BoundingBox{0, 0, 10, 10}, BoundingBox{3, 4, 10, 10}) ==
          doctest::Approx(5.0));
}
