#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "superres/rng.hpp"
#include "superres/torus.hpp"

using namespace superres;
using Catch::Approx;

namespace {

SpikeTrain random_train(Rng& rng, int k) {
    std::vector<Spike> spikes;
    for (int i = 0; i < k; ++i) {
        spikes.push_back({TorusPoint(rng.uniform()),
                          Complex(rng.normal(), rng.normal())});
    }
    return SpikeTrain(std::move(spikes));
}

}  // namespace

TEST_CASE("wrap_distance basics") {
    CHECK(wrap_distance(TorusPoint(0.1), TorusPoint(0.9)) == Approx(0.2));
    CHECK(wrap_distance(TorusPoint(0.3), TorusPoint(0.3)) == 0.0);
    CHECK(wrap_distance(TorusPoint(0.0), TorusPoint(0.5)) == Approx(0.5));
    CHECK(wrap_distance(TorusPoint(0.9), TorusPoint(0.1)) == Approx(0.2));  // symmetric
}

TEST_CASE("wrap respects the identification of 0 and 1") {
    CHECK(wrap_unit(1.0) == 0.0);
    CHECK(wrap_unit(-0.25) == Approx(0.75));
    CHECK(wrap_unit(2.25) == Approx(0.25));
    CHECK(wrap_unit(0.3 + 1.0) == Approx(wrap_unit(0.3)));
    const double w = wrap_unit(-1e-18);
    CHECK(w >= 0.0);
    CHECK(w < 1.0);
}

TEST_CASE("min_separation") {
    SpikeTrain three({{TorusPoint(0.1), 1.0}, {TorusPoint(0.5), 1.0}, {TorusPoint(0.9), 1.0}});
    REQUIRE(min_separation(three).has_value());
    CHECK(*min_separation(three) == Approx(0.2));

    SpikeTrain pair({{TorusPoint(0.2), 1.0}, {TorusPoint(0.7), 1.0}});
    CHECK(*min_separation(pair) == Approx(0.5));

    SpikeTrain single({{TorusPoint(0.3), 1.0}});
    CHECK_FALSE(min_separation(single).has_value());  // empty infimum -> unbounded
    CHECK_FALSE(min_separation(SpikeTrain()).has_value());
}

TEST_CASE("min_separation is invariant under rotation and permutation") {
    Rng rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        SpikeTrain x = random_train(rng, 5);
        const double shift = rng.uniform();
        std::vector<Spike> shifted, reversed;
        for (const Spike& s : x.spikes()) shifted.push_back({TorusPoint(s.location.value + shift), s.amplitude});
        for (auto it = x.spikes().rbegin(); it != x.spikes().rend(); ++it) reversed.push_back(*it);
        CHECK(*min_separation(SpikeTrain(shifted)) == Approx(*min_separation(x)).margin(1e-12));
        CHECK(*min_separation(SpikeTrain(reversed)) == Approx(*min_separation(x)));
    }
}

TEST_CASE("tv_norm") {
    SpikeTrain x({{TorusPoint(0.1), Complex(1, 0)},
                  {TorusPoint(0.4), Complex(-1, 0)},
                  {TorusPoint(0.7), Complex(0, 1)}});
    CHECK(tv_norm(x) == Approx(3.0));

    SpikeTrain prob({{TorusPoint(0.2), Complex(0.25, 0)}, {TorusPoint(0.6), Complex(0.75, 0)}});
    CHECK(tv_norm(prob) == Approx(1.0));  // probability measure

    CHECK(tv_norm(SpikeTrain()) == 0.0);
}

TEST_CASE("tv_norm is a norm on a fixed support") {
    Rng rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        SpikeTrain x = random_train(rng, 4);
        const Complex c(rng.normal(), rng.normal());
        CHECK(tv_norm(scaled(x, c)) == Approx(std::abs(c) * tv_norm(x)).margin(1e-12));

        SpikeTrain y = scaled(x, Complex(rng.normal(), rng.normal()));
        CHECK(tv_norm(add(x, y)) <= tv_norm(x) + tv_norm(y) + 1e-12);
    }
}

TEST_CASE("subtract") {
    SpikeTrain x({{TorusPoint(0.3), Complex(1, 0)}});

    SECTION("exact cancellation") {
        CHECK(subtract(x, x).empty());
    }
    SECTION("disjoint supports") {
        SpikeTrain other({{TorusPoint(0.6), Complex(2, 0)}});
        SpikeTrain h = subtract(x, other);
        REQUIRE(h.size() == 2);
        CHECK(h.spikes()[0].location.value == Approx(0.3));
        CHECK(h.spikes()[0].amplitude == Complex(1, 0));
        CHECK(h.spikes()[1].location.value == Approx(0.6));
        CHECK(h.spikes()[1].amplitude == Complex(-2, 0));
    }
    SECTION("partial cancellation") {
        SpikeTrain xi({{TorusPoint(0.3), Complex(1, 1)}});
        SpikeTrain h = subtract(xi, x);
        REQUIRE(h.size() == 1);
        CHECK(h.spikes()[0].amplitude == Complex(0, 1));
    }
    SECTION("subtract(x, x) is empty for random trains") {
        Rng rng(3);
        for (int rep = 0; rep < 10; ++rep) {
            SpikeTrain z = random_train(rng, 6);
            CHECK(subtract(z, z).empty());
        }
    }
}

TEST_CASE("construction merges coincident locations and sorts") {
    SpikeTrain x({{TorusPoint(0.5), Complex(1, 0)},
                  {TorusPoint(0.1), Complex(2, 0)},
                  {TorusPoint(0.5 + 1e-14), Complex(3, 0)}});
    REQUIRE(x.size() == 2);
    CHECK(x.spikes()[0].location.value == Approx(0.1));
    CHECK(x.spikes()[1].amplitude == Complex(4, 0));

    // merge across the wrap seam
    SpikeTrain y({{TorusPoint(1e-14), Complex(1, 0)}, {TorusPoint(1.0 - 1e-14), Complex(1, 0)}});
    CHECK(y.size() == 1);
}
