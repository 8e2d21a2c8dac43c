#include "catch_amalgamated.hpp"

#include <cmath>
#include <numbers>

#include "levcav/error.h"
#include "levcav/numerics.h"
#include "levcav/parallel.h"

using namespace levcav;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("brent finds the root of cos x - x", "[numerics]")
{
    const auto r = numerics::brent([](double x) { return std::cos(x) - x; }, 0.0, 1.0);
    CHECK_THAT(r.root, WithinAbs(0.73908513321516064, 1e-13));
    CHECK(r.iterations > 0);
}

TEST_CASE("brent rejects a bracket without a sign change", "[numerics]")
{
    CHECK_THROWS_AS(numerics::brent([](double x) { return x * x + 1.0; }, -1.0, 1.0), ConvergenceError);
}

TEST_CASE("brent handles a flat arctan tail", "[numerics]")
{
    auto f = [](double x) { return 0.01 * x - std::atan(x); };
    const auto br = numerics::expand_bracket(f, 1.0, 1e-6, 2.0, 1e9);
    REQUIRE(br);
    const double root = numerics::brent(f, br->first, br->second).root;
    CHECK(std::abs(f(root)) < 1e-12);
    CHECK(root > 100.0);
}

TEST_CASE("expand_bracket gives up past its limit", "[numerics]")
{
    CHECK_FALSE(numerics::expand_bracket([](double) { return 1.0; }, 0.0, 1.0, 2.0, 100.0));
}

TEST_CASE("Gauss-Legendre integrates polynomials exactly", "[numerics]")
{
    for (int n : {1, 2, 5, 16, 64}) {
        const auto& rule = numerics::gauss_legendre(n);
        REQUIRE(rule.size() == n);
        double wsum = 0.0;
        for (double w : rule.weights)
            wsum += w;
        CHECK_THAT(wsum, WithinAbs(2.0, 1e-13));
        const int deg = 2 * n - 2; // even, exact for degree <= 2n-1
        const double exact = 2.0 / (deg + 1);
        CHECK_THAT(rule.integrate([deg](double x) { return std::pow(x, deg); }, -1.0, 1.0),
                   WithinRel(exact, 1e-12));
    }
}

TEST_CASE("Gauss-Legendre converges for smooth integrands", "[numerics]")
{
    const auto& rule = numerics::gauss_legendre(32);
    CHECK_THAT(rule.integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi),
               WithinAbs(2.0, 1e-14));
}

TEST_CASE("linspace includes both ends", "[numerics]")
{
    const auto v = numerics::linspace(-1.0, 1.0, 5);
    REQUIRE(v.size() == 5);
    CHECK(v.front() == -1.0);
    CHECK(v[2] == 0.0);
    CHECK(v.back() == 1.0);
    CHECK(numerics::linspace(3.0, 4.0, 1) == std::vector<double>{3.0});
}

TEST_CASE("parallel_for fills every slot once and rethrows failures", "[parallel]")
{
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits)
        REQUIRE(h == 1);

    CHECK_THROWS_AS(parallel_for(100, 4,
                                 [](std::size_t i) {
                                     if (i == 37)
                                         throw ConvergenceError("boom");
                                 }),
                    ConvergenceError);
    CHECK(worker_count(3) == 3);
    CHECK(worker_count() >= 1);
}
