#include "catch_amalgamated.hpp"

#include <cmath>
#include <numbers>

#include "levcav/dynamics.h"
#include "levcav/error.h"
#include "levcav/numerics.h"
#include "levcav/potential.h"

using namespace levcav;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

DimensionlessParams with_g(double g, double da = 0.0)
{
    DimensionlessParams p;
    p.gEff = g;
    p.detuningAlpha = da;
    return p;
}

} // namespace

TEST_CASE("potential values", "[potential]")
{
    CHECK(potential(-1.7, with_g(0.4, 1.7)) == 0.0);
    CHECK_THAT(potential(1.0, with_g(0.5)), WithinAbs(-0.28539816339744831, 1e-15));
    for (double g = 0.05; g < 1.0; g += 0.05) {
        const Equilibria e = equilibria(with_g(g, 0.3));
        CHECK(potential(e.unstable, with_g(g, 0.3)) > potential(e.stable, with_g(g, 0.3)));
    }
}

TEST_CASE("equilibria", "[potential]")
{
    const Equilibria e = equilibria(with_g(0.5));
    CHECK_THAT(e.stable, WithinAbs(1.0, 1e-12));
    CHECK_THAT(e.unstable, WithinAbs(-1.0, 1e-12));

    const Equilibria merged = equilibria(with_g(1.0, 2.0));
    CHECK(merged.sigma == 0.0);
    CHECK(merged.stable == -2.0);
    CHECK(merged.unstable == -2.0);

    CHECK_THAT(equilibria(with_g(0.2)).sigma, WithinAbs(2.0, 1e-15));
    CHECK_THROWS_AS(equilibria(with_g(0.0)), DomainError);
    CHECK_THROWS_AS(equilibria(with_g(1.2)), DomainError);
}

TEST_CASE("potential derivative matches finite differences", "[potential]")
{
    const DimensionlessParams p = with_g(0.37, 0.4);
    const double h = 1e-5;
    for (double x = -10.0; x <= 10.0; x += 0.01) {
        const double fd = (potential(x + h, p) - potential(x - h, p)) / (2.0 * h);
        REQUIRE_THAT(potential_derivative(x, p), WithinAbs(fd, 1e-6));
    }
}

TEST_CASE("adiabatic force is minus the potential gradient", "[potential]")
{
    const DimensionlessParams p = with_g(0.63, -0.8);
    for (double x = -10.0; x <= 10.0; x += 0.37) {
        SingleLaserState s;
        s.x = x;
        CHECK(adiabatic_rhs(s, p).dp == -potential_derivative(x, p));
    }
}

TEST_CASE("harmonic-limit period", "[potential]")
{
    CHECK_THAT(harmonic_frequency(0.5), WithinRel(std::sqrt(0.5), 1e-15));
    const OscillationSolution s = oscillation_at_amplitude(with_g(0.5), 1e-4);
    CHECK_THAT(s.period, WithinRel(8.8857658763167325, 1e-4));
    CHECK_THAT(s.period, WithinRel(2.0 * std::numbers::pi / std::sqrt(0.5), 1e-4));
}

TEST_CASE("period grows with amplitude and diverges at the barrier", "[potential]")
{
    for (double g : {0.2, 0.5, 0.8}) {
        const DimensionlessParams p = with_g(g, 0.7);
        const double sigma = well_sigma(g);
        double last = 0.0;
        for (double frac = 0.01; frac < 0.999; frac += 0.02) {
            const OscillationSolution s = oscillation_at_amplitude(p, frac * sigma);
            REQUIRE(s.period > last);
            last = s.period;
        }
        const double nearEdge = oscillation_at_amplitude(p, (1.0 - 1e-10) * sigma).period;
        CHECK(nearEdge > 3.0 * oscillation_at_amplitude(p, 0.01 * sigma).period);
    }
}

TEST_CASE("turning points sit on the same energy level", "[potential]")
{
    for (double g : {0.1, 0.5, 0.9}) {
        const DimensionlessParams p = with_g(g, -1.3);
        const double sigma = well_sigma(g);
        for (double frac : {1e-4, 0.1, 0.5, 0.9, 0.99}) {
            const OscillationSolution s = oscillation_at_amplitude(p, frac * sigma);
            CHECK(std::abs(potential(s.rightTurning, p) - potential(s.leftTurning, p)) < 1e-10);
            const double chiM = s.leftTurning + p.detuningAlpha;
            const double chiP = s.rightTurning + p.detuningAlpha;
            CHECK(-sigma < chiM);
            CHECK(chiM < sigma);
            CHECK(sigma < chiP);
        }
    }
}

TEST_CASE("period quadrature is converged", "[potential]")
{
    for (double g : {0.2, 0.5, 0.8}) {
        const DimensionlessParams p = with_g(g);
        const double sigma = well_sigma(g);
        for (double frac : {0.01, 0.3, 0.7, 0.9, 0.99}) {
            QuadratureOptions q;
            const double a = oscillation_at_amplitude(p, frac * sigma, q).period;
            q.nodesPerPanel *= 2;
            const double b = oscillation_at_amplitude(p, frac * sigma, q).period;
            CHECK(std::abs(a - b) / b < 1e-8);
        }
    }
}

TEST_CASE("left turning point outside the well is a domain error", "[potential]")
{
    const DimensionlessParams p = with_g(0.5);
    CHECK_THROWS_AS(oscillation_period(p, -1.0), DomainError);
    CHECK_THROWS_AS(oscillation_period(p, 1.0), DomainError);
    CHECK_THROWS_AS(oscillation_at_amplitude(p, 1.0), DomainError);
    CHECK_THROWS_AS(oscillation_period(with_g(1.5), 0.0), DomainError);
}

TEST_CASE("frequency map", "[potential]")
{
    const std::vector<double> gs{0.2, 0.5, 0.8};
    const std::vector<double> as = numerics::linspace(1e-4, 3.0, 40);
    const auto cells = frequency_map(gs, as, 2);
    REQUIRE(cells.size() == gs.size() * as.size());
    for (std::size_t i = 0; i < gs.size(); ++i) {
        const double sigma = well_sigma(gs[i]);
        double last = INFINITY;
        for (std::size_t j = 0; j < as.size(); ++j) {
            const FrequencyCell& c = cells[i * as.size() + j];
            CHECK(c.g == gs[i]);
            CHECK(c.amplitude == as[j]);
            if (as[j] >= sigma) {
                CHECK_FALSE(c.frequency);
            } else {
                REQUIRE(c.frequency);
                CHECK(*c.frequency <= last);
                last = *c.frequency;
            }
        }
    }
    CHECK_THAT(*cells[as.size()].frequency, WithinRel(std::sqrt(0.5) / (2.0 * std::numbers::pi), 1e-4));
    CHECK_THAT(*cells[as.size()].frequency, WithinAbs(0.1125, 5e-5));
}

TEST_CASE("critical scan speed", "[potential]")
{
    CHECK(critical_scan_speed(1.0) == 0.0);
    CHECK_THAT(critical_scan_speed(0.5), WithinAbs(1.0684533932698203, 1e-15));
    double last = INFINITY;
    for (double g = 0.01; g <= 1.0; g += 0.01) {
        const double s = critical_scan_speed(g);
        REQUIRE(s < last);
        last = s;
    }
    CHECK_THROWS_AS(critical_scan_speed(0.0), DomainError);
}

TEST_CASE("detuning scans", "[potential]")
{
    const double sc = critical_scan_speed(0.5);
    CHECK(scan_classify(0.5, 0.5 * sc, ScanDirection::down) == ScanOutcome::pickedUp);
    CHECK(scan_classify(0.5, 2.0 * sc, ScanDirection::down) == ScanOutcome::transientOscillation);
    for (double f : {0.1, 0.5, 1.0, 2.0})
        CHECK(scan_classify(0.5, f * sc, ScanDirection::up) != ScanOutcome::pickedUp);
    CHECK_THROWS_AS(scan_classify(0.5, 0.0, ScanDirection::down), InvalidParameters);

    ScanOptions o;
    o.outputStride = 1.0;
    const ScanResult r = scan_simulate(0.5, 0.5 * sc, ScanDirection::down, o);
    CHECK(r.initialDetuning > 0.0);
    CHECK(r.scanSpeed < 0.0);
    CHECK(r.leftStand);
    REQUIRE(r.samples.size() > 2);
    for (const ScanSample& s : r.samples)
        REQUIRE(s.x >= 0.0);
}
