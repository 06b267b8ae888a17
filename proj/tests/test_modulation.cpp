#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "toepsim/constellation.hpp"
#include "toepsim/errors.hpp"

using namespace toepsim;

namespace {

// Exhaustive nearest-point oracle with lowest-index tie breaking.
int slice_oracle(const Constellation& c, cplx z) {
    int best = 0;
    double best_d = std::norm(z - c.points[0]);
    for (int i = 1; i < c.mu; ++i) {
        const double d = std::norm(z - c.points[i]);
        if (d < best_d) {
            best = i;
            best_d = d;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("constellation energies match closed forms") {
    for (int mu : {4, 16, 64, 256}) {
        Constellation c = make_constellation(Scheme::Qam, mu);
        CHECK(c.energy == doctest::Approx(2.0 * (mu - 1) / 3.0).epsilon(1e-12));
        CHECK(c.d_min == doctest::Approx(2.0).epsilon(1e-12));
    }
    for (int mu : {2, 4, 8, 16}) {
        Constellation c = make_constellation(Scheme::Pam, mu);
        CHECK(c.energy ==
              doctest::Approx((static_cast<double>(mu) * mu - 1.0) / 6.0).epsilon(1e-12));
        CHECK(c.d_min == doctest::Approx(std::numbers::sqrt2).epsilon(1e-12));
    }
    for (int mu : {2, 4, 8, 16}) {
        Constellation c = make_constellation(Scheme::Psk, mu);
        CHECK(c.energy == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(c.d_min ==
              doctest::Approx(2.0 * std::sin(std::numbers::pi / mu)).epsilon(1e-12));
    }
}

TEST_CASE("binary PAM sits at plus and minus sqrt(2)/2") {
    Constellation c = make_constellation(Scheme::Pam, 2);
    CHECK(c.points[0].real() == doctest::Approx(-std::numbers::sqrt2 / 2).epsilon(1e-15));
    CHECK(c.points[1].real() == doctest::Approx(std::numbers::sqrt2 / 2).epsilon(1e-15));
    CHECK(c.energy == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("4-QAM is the unit-scaled cross at odd integers") {
    Constellation c = make_constellation(Scheme::Qam, 4);
    CHECK(c.points[0] == cplx(-1.0, -1.0));
    CHECK(c.points[1] == cplx(-1.0, 1.0));
    CHECK(c.points[2] == cplx(1.0, -1.0));
    CHECK(c.points[3] == cplx(1.0, 1.0));
    CHECK(c.energy == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("invalid orders are rejected") {
    CHECK_THROWS_AS(make_constellation(Scheme::Qam, 8), ArgumentError);
    CHECK_THROWS_AS(make_constellation(Scheme::Qam, 2), ArgumentError);
    CHECK_THROWS_AS(make_constellation(Scheme::Pam, 3), ArgumentError);
    CHECK_THROWS_AS(make_constellation(Scheme::Psk, 0), ArgumentError);
}

TEST_CASE("gray labels differ in one bit between nearest neighbours") {
    for (auto [scheme, mu] : std::vector<std::pair<Scheme, int>>{
             {Scheme::Qam, 4}, {Scheme::Qam, 16}, {Scheme::Qam, 64},
             {Scheme::Pam, 4}, {Scheme::Pam, 8},
             {Scheme::Psk, 4}, {Scheme::Psk, 8}, {Scheme::Psk, 16}}) {
        Constellation c = make_constellation(scheme, mu);
        for (int i = 0; i < mu; ++i) {
            for (int j = i + 1; j < mu; ++j) {
                if (std::abs(std::abs(c.points[i] - c.points[j]) - c.d_min) < 1e-9) {
                    CHECK(bit_errors_between(c, i, j) == 1);
                }
            }
        }
    }
}

TEST_CASE("value mapping is a bijection") {
    for (auto [scheme, mu] : std::vector<std::pair<Scheme, int>>{
             {Scheme::Qam, 16}, {Scheme::Pam, 8}, {Scheme::Psk, 8}}) {
        Constellation c = make_constellation(scheme, mu);
        for (int v = 0; v < mu; ++v) {
            CHECK(c.index_to_value[c.value_to_index[v]] == v);
        }
    }
}

TEST_CASE("slice recovers every clean constellation point") {
    for (auto [scheme, mu] : std::vector<std::pair<Scheme, int>>{
             {Scheme::Qam, 4}, {Scheme::Qam, 64}, {Scheme::Pam, 8}, {Scheme::Psk, 16}}) {
        Constellation c = make_constellation(scheme, mu);
        for (int i = 0; i < mu; ++i) CHECK(slice_index(c, c.points[i]) == i);
    }
}

TEST_CASE("slice matches the exhaustive oracle on noisy points") {
    std::mt19937 rng(99);
    std::normal_distribution<double> normal(0.0, 2.5);
    for (auto [scheme, mu] : std::vector<std::pair<Scheme, int>>{
             {Scheme::Qam, 4}, {Scheme::Qam, 16}, {Scheme::Qam, 64},
             {Scheme::Pam, 2}, {Scheme::Pam, 8},
             {Scheme::Psk, 2}, {Scheme::Psk, 8}}) {
        Constellation c = make_constellation(scheme, mu);
        for (int t = 0; t < 2000; ++t) {
            const cplx z(normal(rng), normal(rng));
            CHECK(slice_index(c, z) == slice_oracle(c, z));
        }
    }
}

TEST_CASE("slice ties resolve to the lowest point index") {
    Constellation qam = make_constellation(Scheme::Qam, 4);
    CHECK(slice_index(qam, cplx(0.0, 0.0)) == 0);
    CHECK(slice_index(qam, cplx(0.0, 1.0)) == 1);
    CHECK(slice_index(qam, cplx(1.0, 0.0)) == 2);

    Constellation pam = make_constellation(Scheme::Pam, 4);
    CHECK(slice_index(pam, cplx(0.0, 7.0)) == 1);

    Constellation psk = make_constellation(Scheme::Psk, 4);
    CHECK(slice_index(psk, cplx(0.0, 0.0)) == 0);
    CHECK(slice_index(psk, cplx(1.0, 1.0)) == 0);
    CHECK(slice_index(psk, cplx(1.0, -1.0)) == 0);
    CHECK(slice_index(psk, cplx(-1.0, 1.0)) == 1);
    CHECK(slice_index(psk, cplx(-1.0, -1.0)) == 2);
}

TEST_CASE("scheme tokens round trip") {
    for (Scheme s : {Scheme::Qam, Scheme::Pam, Scheme::Psk}) {
        CHECK(scheme_from_token(scheme_token(s)) == s);
    }
    CHECK_THROWS_AS(scheme_from_token("fsk"), ArgumentError);
}
