#include "catch_amalgamated.hpp"

#include <cmath>
#include <numbers>

#include "levcav/error.h"
#include "levcav/model.h"

using namespace levcav;
using Catch::Matchers::WithinRel;

namespace {

// 1 mg mirror, 10 cm cavity of finesse 2500 at 1050 nm, 2 W input coupled at
// half the linewidth.
PhysicalParams typical(double length = 0.1)
{
    PhysicalParams p;
    p.mass = 1e-6;
    p.cavityLength = length;
    p.wavelength = 1050e-9;
    p.finesse = 2500.0;
    p.powerAlpha = 2.0;
    p.inputCoupling = 0.5 * std::numbers::pi * kSpeedOfLight / (length * 2500.0);
    return p;
}

std::string field_of(const PhysicalParams& p)
{
    try {
        p.validate();
    } catch (const InvalidParameters& e) {
        return e.field();
    }
    return "";
}

} // namespace

TEST_CASE("natural scales at the typical parameters", "[model]")
{
    // Reference values from a 40-digit evaluation of the scale definitions.
    const NaturalScales s = natural_scales(typical());
    CHECK_THAT(s.length, WithinRel(1.05e-10, 1e-12));
    CHECK_THAT(s.frequency, WithinRel(317994.83250896194, 1e-12));
    CHECK_THAT(s.amplitude, WithinRel(2369032.3743511648, 1e-12));
    CHECK_THAT(s.opticalRate, WithinRel(1883651.5673088531, 1e-12));
}

TEST_CASE("epsilon is about 1/6 at 10 cm and 1/60 at 1 cm", "[model]")
{
    const double e10 = dimensionless(typical(0.1)).epsilon;
    const double e1 = dimensionless(typical(0.01)).epsilon;
    CHECK_THAT(e10, WithinRel(0.16881828785526228, 1e-12));
    CHECK(e10 >= 0.15);
    CHECK(e10 <= 0.19);
    CHECK(e1 >= 0.015);
    CHECK(e1 <= 0.019);
    CHECK_THAT(e10 / e1, WithinRel(10.0, 1e-12));
}

TEST_CASE("dimensionless parameters at the typical parameters", "[model]")
{
    PhysicalParams p = typical();
    p.photothermalStrength = 10e-12;
    p.photothermalRate = 10.0;
    p.powerBeta = 0.5;
    p.detuningBeta = -2.0 * natural_scales(p).opticalRate;
    const DimensionlessParams d = dimensionless(p);
    CHECK_THAT(d.gEff, WithinRel(0.9236155821274683, 1e-12));
    CHECK_THAT(d.ptStrength, WithinRel(151.57613627799556, 1e-12));
    CHECK_THAT(d.ptRate, WithinRel(3.1447051894210178e-5, 1e-12));
    CHECK(d.ptRate > 1e-5);
    CHECK(d.ptRate < 1e-4);
    CHECK_THAT(d.amplitudeRatio, WithinRel(0.5, 1e-15));
    CHECK_THAT(d.detuningDiff, WithinRel(-2.0, 1e-12));
    CHECK_FALSE(d.levitationWarning);
}

TEST_CASE("dimensionless is a pure function", "[model]")
{
    const PhysicalParams p = typical();
    CHECK(dimensionless(p) == dimensionless(p));
}

TEST_CASE("effective gravity is invariant under joint scaling of power and mass", "[model]")
{
    PhysicalParams a = typical();
    PhysicalParams b = a;
    b.powerAlpha *= 3.7;
    b.mass *= 3.7;
    CHECK_THAT(dimensionless(b).gEff, WithinRel(dimensionless(a).gEff, 1e-14));
}

TEST_CASE("optical spring constant equals m nu^2 / 2", "[model]")
{
    const PhysicalParams p = typical();
    const NaturalScales s = natural_scales(p);
    const double k = optical_spring_constant(p);
    CHECK_THAT(k, WithinRel(p.mass * s.frequency * s.frequency / 2.0, 1e-12));
    CHECK_THAT(k, WithinRel(50560.356751201379, 1e-12));

    PhysicalParams doubled = p;
    doubled.powerAlpha *= 2.0;
    CHECK_THAT(optical_spring_constant(doubled), WithinRel(2.0 * k, 1e-12));
}

TEST_CASE("validation names the offending field", "[model]")
{
    PhysicalParams p = typical();
    p.mass = 0.0;
    CHECK(field_of(p) == "mass");

    p = typical();
    p.cavityFrequency = 1.0; // disagrees with the wavelength
    CHECK(field_of(p) == "cavityFrequency");

    p = typical();
    p.cavityFrequency = 2.0 * std::numbers::pi * kSpeedOfLight / 1050e-9;
    CHECK(field_of(p).empty());

    p = typical();
    p.finesse.reset();
    CHECK(field_of(p) == "finesse");

    p = typical();
    p.linewidth = 1.0;
    CHECK(field_of(p) == "linewidth");

    p = typical();
    p.powerBeta = 3.0;
    CHECK(field_of(p) == "powerBeta");

    CHECK_THROWS_AS(natural_scales(PhysicalParams{}), InvalidParameters);
}

TEST_CASE("a mirror too heavy to levitate only raises a warning", "[model]")
{
    PhysicalParams p = typical();
    p.mass = 1e-5;
    const DimensionlessParams d = dimensionless(p);
    CHECK(d.gEff > 1.0);
    CHECK(d.levitationWarning);
}

TEST_CASE("dimensionless parameter validation", "[model]")
{
    DimensionlessParams d;
    CHECK_NOTHROW(d.validate());
    d.epsilon = 0.0;
    CHECK_THROWS_AS(d.validate(), InvalidParameters);
    d = {};
    d.amplitudeRatio = 1.5;
    CHECK_THROWS_AS(d.validate(), InvalidParameters);
    d = {};
    d.scanSpeed = 0.25;
    d.detuningAlpha = 2.0;
    CHECK(d.detuning_at(4.0) == 3.0);
}

TEST_CASE("redimensionalization", "[model]")
{
    const PhysicalParams p = typical();
    const NaturalScales s = natural_scales(p);

    ReducedState r;
    r.x = 1.0;
    r.tau = 1.0;
    const DimensionalState d = redimensionalize(r, s, p.mass);
    CHECK_THAT(d.x, WithinRel(1.05e-10, 1e-12));
    CHECK_THAT(d.t, WithinRel(1.0 / s.frequency, 1e-15));

    ReducedState q;
    q.tau = 123.25;
    q.x = -0.731;
    q.p = 4.5e-3;
    q.alpha = std::complex<double>(0.3, -0.8);
    q.z = 14.2;
    const ReducedState back = nondimensionalize(redimensionalize(q, s, p.mass), s, p.mass);
    CHECK_THAT(back.tau, WithinRel(q.tau, 1e-12));
    CHECK_THAT(back.x, WithinRel(q.x, 1e-12));
    CHECK_THAT(back.p, WithinRel(q.p, 1e-12));
    CHECK_THAT(back.alpha->real(), WithinRel(q.alpha->real(), 1e-12));
    CHECK_THAT(back.alpha->imag(), WithinRel(q.alpha->imag(), 1e-12));
    CHECK_THAT(*back.z, WithinRel(*q.z, 1e-12));
}
