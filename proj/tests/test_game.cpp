#include <doctest.h>

#include <cmath>
#include <random>

#include "aagame/errors.hpp"
#include "aagame/game.hpp"
#include "aagame/rng.hpp"

using namespace aagame;

namespace {

Distribution random_distribution(Xoshiro256& rng, std::size_t n)
{
    std::vector<double> p(n);
    double total = 0.0;
    for (auto& x : p) {
        x = -std::log(1.0 - rng.uniform());
        total += x;
    }
    for (auto& x : p)
        x /= total;
    return Distribution(p);
}

}  // namespace

TEST_CASE("outcome space needs two outcomes")
{
    CHECK_THROWS_AS(OutcomeSpace(1), ConfigError);
    CHECK(OutcomeSpace(3).size() == 3);
}

TEST_CASE("distribution validation")
{
    CHECK_THROWS_AS(Distribution({0.5, 0.6}), InputError);
    CHECK_THROWS_AS(Distribution({1.2, -0.2}), InputError);
    CHECK_THROWS_AS(Distribution({NAN, 1.0}), InputError);
    CHECK_NOTHROW(Distribution({0.5, 0.5 + 5e-10}));
    const Distribution d({0.25, 0.25, 0.5});
    CHECK(d.size() == 3);
    CHECK(d[2] == 0.5);
}

TEST_CASE("point masses")
{
    const OutcomeSpace three(3);
    CHECK(point_mass(0, three) == Distribution({1, 0, 0}));
    CHECK(point_mass(2, three) == Distribution({0, 0, 1}));
    CHECK_THROWS_AS(point_mass(3, three), InputError);
}

TEST_CASE("brier loss values")
{
    // Worked example: outcome 1 of 3, prediction (1/2, 1/4, 1/4).
    CHECK(brier_loss(0, Distribution({0.5, 0.25, 0.25})) == 0.375);
    CHECK(brier_loss(0, Distribution({1, 0, 0})) == 0.0);
    CHECK(brier_loss(1, Distribution({1, 0, 0})) == 2.0);
    CHECK_THROWS_AS(brier_loss(3, Distribution({1, 0, 0})), InputError);
}

TEST_CASE("half loss counts strict errors")
{
    CHECK(half_loss(1, Distribution({1, 0, 0})) == 1.0);
    CHECK(half_loss(0, Distribution({1, 0, 0})) == 0.0);
    CHECK(half_loss(0, Distribution({0.5, 0.5, 0})) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("brier loss bounds and algebraic identity")
{
    Xoshiro256 rng(11);
    for (int i = 0; i < 2000; ++i) {
        const std::size_t n = 2 + rng.below(5);
        const auto g = random_distribution(rng, n);
        const std::size_t w = rng.below(n);
        const double loss = brier_loss(w, g);
        CHECK(loss >= 0.0);
        CHECK(loss <= 2.0);
        double squares = 0.0;
        for (double p : g.probs())
            squares += p * p;
        CHECK(std::abs(loss - (squares - 2.0 * g[w] + 1.0)) < 1e-12);
    }
    // Zero exactly at the point mass on the outcome, two at any other.
    for (std::size_t w = 0; w < 3; ++w)
        for (std::size_t o = 0; o < 3; ++o)
            CHECK(brier_loss(w, point_mass(o, OutcomeSpace(3))) == (o == w ? 0.0 : 2.0));
}

TEST_CASE("max rule ties")
{
    std::vector<double> out(3);
    max_rule(std::vector<double>{0.4, 0.4, 0.2}, out);
    CHECK(out == std::vector<double>{0.5, 0.5, 0.0});
    max_rule(std::vector<double>{1.0, 1.0 - 1e-13, 0.0}, out);
    CHECK(out[1] == 0.5);
    max_rule(std::vector<double>{1.0, 1.0 - 1e-9, 0.0}, out);
    CHECK(out == std::vector<double>{1.0, 0.0, 0.0});
    CHECK_THROWS_AS(max_rule(std::vector<double>{NAN, 1.0, 0.0}, out), NumericError);
}
