#include "catch_amalgamated.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "levcav/csv.h"
#include "levcav/dynamics.h"
#include "levcav/error.h"
#include "levcav/twolaser.h"

using namespace levcav;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace fs = std::filesystem;

namespace {

DimensionlessParams two(double g, double b, double d, double eps = 0.2)
{
    DimensionlessParams p;
    p.gEff = g;
    p.amplitudeRatio = b;
    p.detuningDiff = d;
    p.epsilon = eps;
    return p;
}

DimensionlessParams flagship()
{
    return two(0.37, 0.47, -2.63);
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("levcav_twolaser_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

SweepGrid small_grid()
{
    SweepGrid g;
    g.g = {0.2, 0.6, 3};
    g.b = {0.2, 0.6, 2};
    g.d = {-4.0, -1.0, 4};
    return g;
}

} // namespace

TEST_CASE("two-laser right-hand side", "[twolaser]")
{
    // Second laser switched off: same force as one laser with χ = x + Δ.
    const DimensionlessParams p = two(0.5, 0.0, 3.0, 0.1);
    TwoLaserState s;
    s.chi = 0.7;
    s.p = 0.2;
    s.alpha = {0.3, 0.4};
    s.beta = {0.9, -0.1};
    DimensionlessParams single;
    single.gEff = 0.5;
    single.epsilon = 0.1;
    single.detuningAlpha = 0.3;
    SingleLaserState q;
    q.x = 0.4;
    q.p = 0.2;
    q.alpha = s.alpha;
    const TwoLaserDerivative d = two_laser_rhs(s, p);
    const SingleLaserDerivative e = full_rhs(q, single);
    CHECK(d.dp == e.dp);
    CHECK(d.dchi == e.dx);
    CHECK_THAT(std::abs(d.dalpha - e.dalpha), WithinAbs(0.0, 1e-15));

    TwoLaserState eq;
    eq.alpha = 1.0;
    eq.beta = 1.0 / std::complex<double>(1.0, 1.0);
    const TwoLaserDerivative z = two_laser_rhs(eq, two(1.5, 1.0, -1.0));
    CHECK_THAT(z.dp, WithinAbs(0.0, 1e-15));
    CHECK_THAT(std::abs(z.dalpha), WithinAbs(0.0, 1e-15));
    CHECK_THAT(std::abs(z.dbeta), WithinAbs(0.0, 1e-15));

    CHECK_THROWS_AS(two_laser_rhs(eq, two(0.5, 1.2, 0.0)), InvalidParameters);
    CHECK_THROWS_AS(two_laser_rhs(eq, two(0.5, 0.5, 0.0, 0.0)), InvalidParameters);
}

TEST_CASE("steady fields balance gravity at every critical point", "[twolaser]")
{
    const DimensionlessParams p = flagship();
    for (const CriticalPoint& c : two_laser_critical_points(p)) {
        const TwoLaserState s = two_laser_seed(c.chi, 0.0, p);
        const double force = std::norm(s.alpha) + p.amplitudeRatio * p.amplitudeRatio * std::norm(s.beta);
        CHECK_THAT(force, WithinAbs(p.gEff, 1e-12));
    }
}

TEST_CASE("two-laser potential", "[twolaser]")
{
    CHECK(two_laser_potential(0.0, two(0.8, 0.6, 0.0)) == 0.0);
    // Direct evaluation at the flagship regime.
    CHECK_THAT(two_laser_potential(1.0, flagship()), WithinAbs(-0.18996713423218301, 1e-14));

    DimensionlessParams single;
    single.gEff = 0.4;
    for (double chi = -5.0; chi <= 5.0; chi += 0.5)
        CHECK(two_laser_potential(chi, two(0.4, 0.0, 1.0)) == potential(chi, single));

    const DimensionlessParams p = flagship();
    const double h = 1e-5;
    for (double chi = -12.0; chi <= 12.0; chi += 0.01) {
        const double fd = (two_laser_potential(chi + h, p) - two_laser_potential(chi - h, p)) / (2.0 * h);
        REQUIRE_THAT(two_laser_potential_derivative(chi, p), WithinAbs(fd, 1e-6));
        const double fd2 = (two_laser_potential_derivative(chi + h, p) - two_laser_potential_derivative(chi - h, p))
                           / (2.0 * h);
        REQUIRE_THAT(two_laser_potential_second(chi, p), WithinAbs(fd2, 1e-6));
    }
}

TEST_CASE("two-laser heating", "[twolaser]")
{
    const DimensionlessParams p = flagship();
    TwoLaserState s;
    s.chi = 0.3;
    CHECK(two_laser_heating(s, p) == 0.0);
    s.p = 0.5;
    CHECK_THAT(two_laser_heating(s, p), WithinRel(4.0 * 0.25 * 0.2 * two_laser_heating_coefficient(0.3, p), 1e-15));

    DimensionlessParams single;
    single.gEff = 0.5;
    single.epsilon = 0.2;
    SingleLaserState q;
    q.x = 0.3;
    q.p = 0.5;
    CHECK_THAT(two_laser_heating(s, two(0.5, 0.0, 4.0)), WithinRel(heating_rate(q, single), 1e-15));
}

TEST_CASE("flagship regime has one damped well", "[twolaser]")
{
    const auto cps = two_laser_critical_points(flagship());
    REQUIRE(cps.size() == 2);
    CHECK_FALSE(cps[0].minimum);
    CHECK(cps[1].minimum);
    CHECK_THAT(cps[1].chi, WithinAbs(1.7574, 1e-3));
    CHECK(two_laser_heating_coefficient(cps[1].chi, flagship()) < 0.0);
    for (const CriticalPoint& c : cps)
        CHECK_THAT(two_laser_potential_derivative(c.chi, flagship()), WithinAbs(0.0, 1e-12));

    const TrapInterval iv = barrier_interval(flagship(), cps[1].chi);
    CHECK(iv.lo == cps[0].chi);
    CHECK(iv.hi > 10.0);
}

TEST_CASE("flagship trap geometry", "[twolaser]")
{
    const auto r = find_trap_region(flagship());
    REQUIRE(r);
    CHECK_THAT(r->width, WithinRel(1.3, 0.15));
    CHECK_THAT(r->depth, WithinRel(0.03, 0.3));
    CHECK(r->area == r->width * r->depth);
    CHECK(r->dampingAtMin < 0.0);
    CHECK(r->otherDampedMinima == 0);
}

TEST_CASE("trap edges bound trapped seeds", "[twolaser]")
{
    const DimensionlessParams p = flagship();
    const auto r = find_trap_region(p);
    REQUIRE(r);
    const double half = 0.5 * r->width;
    for (double side : {1.0, -1.0})
        CHECK(classify_trapped(p, r->chiMin, two_laser_seed(r->chiMin + side * 0.9 * half, 0.0, p)).trapped);
    // The binding edge is the one that escapes first.
    const bool right = classify_trapped(p, r->chiMin, two_laser_seed(r->chiMin + 1.5 * half, 0.0, p)).trapped;
    const bool left = classify_trapped(p, r->chiMin, two_laser_seed(r->chiMin - 1.5 * half, 0.0, p)).trapped;
    CHECK_FALSE((right && left));

    const TrapVerdict v = classify_trapped(p, r->chiMin, two_laser_seed(r->chiMin + 0.5 * half, 0.0, p));
    CHECK(v.lastPeriodEnergy < v.firstPeriodEnergy);
    CHECK_THROWS_AS(classify_trapped(p, -1.3425, two_laser_seed(0.0, 0.0, p)), DomainError);
}

TEST_CASE("no trap for a single laser or same-side anti-damping", "[twolaser]")
{
    for (double g : {0.1, 0.3, 0.5, 0.7, 0.9})
        for (double eps : {0.2, 0.01}) {
            CHECK_FALSE(find_trap_region(two(g, 0.0, 0.0, eps)));
            CHECK_FALSE(find_trap_region(two(g, 1.0, 10.0, eps)));
        }
}

TEST_CASE("equal lasers are symmetric under swapping the detuning", "[twolaser]")
{
    // With B = 1 the shift χ → χ + Δ maps the system at Δ onto the system at −Δ.
    for (double d : {-3.0, -1.5, 2.0}) {
        const DimensionlessParams a = two(0.6, 1.0, d);
        const DimensionlessParams b = two(0.6, 1.0, -d);
        for (double chi = -4.0; chi <= 4.0; chi += 0.25) {
            CHECK_THAT(two_laser_potential(chi + d, b), WithinAbs(two_laser_potential(chi, a) + 0.6 * d, 1e-12));
            CHECK_THAT(two_laser_heating_coefficient(chi + d, b),
                       WithinAbs(two_laser_heating_coefficient(chi, a), 1e-15));
        }
        const auto ca = two_laser_critical_points(a);
        const auto cb = two_laser_critical_points(b);
        REQUIRE(ca.size() == cb.size());
        for (std::size_t i = 0; i < ca.size(); ++i) {
            CHECK_THAT(cb[i].chi, WithinAbs(ca[i].chi + d, 1e-9));
            if (!ca[i].minimum)
                continue;
            const TrapVerdict va = classify_trapped(a, ca[i].chi, two_laser_seed(ca[i].chi + 0.3, 0.0, a));
            const TrapVerdict vb = classify_trapped(b, cb[i].chi, two_laser_seed(cb[i].chi + 0.3, 0.0, b));
            CHECK(va.trapped == vb.trapped);
            CHECK(va.leftInterval == vb.leftInterval);
        }
        const auto ra = find_trap_region(a);
        const auto rb = find_trap_region(b);
        REQUIRE(ra.has_value() == rb.has_value());
        if (ra)
            CHECK_THAT(ra->width, WithinAbs(rb->width, 1e-2));
    }
}

TEST_CASE("two-laser trajectories sample on the grid", "[twolaser]")
{
    const DimensionlessParams p = flagship();
    IntegratorOptions o;
    o.horizon = 10.0;
    o.outputStride = 0.5;
    std::vector<Sample> out;
    const RunSummary s = integrate_two_laser(two_laser_seed(1.7, 0.0, p), p, o, [&out](const Sample& x) {
        out.push_back(x);
        return true;
    });
    CHECK(s.termination == Termination::horizon);
    REQUIRE(out.size() == 21);
    CHECK(out[0].beta);
    CHECK(out[0].alpha);
    CHECK_FALSE(out[0].z);
}

TEST_CASE("sweep axes and grid bookkeeping", "[twolaser]")
{
    const SweepAxis a{0.0, 2.0, 5};
    CHECK(a.values() == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
    CHECK(SweepGrid{}.size() == 20000);

    const SweepRecord heavy = sweep_point(1.5, 0.5, -3.0, 0.2, {});
    CHECK_FALSE(heavy.trap);
    CHECK(heavy.g == 1.5);
    CHECK_FALSE(sweep_point(0.0, 0.5, -3.0, 0.2, {}).trap);
    CHECK(sweep_point(0.37, 0.47, -2.63, 0.2, {}).trap);
}

TEST_CASE("sweep is ordered and independent of worker count", "[twolaser]")
{
    const SweepGrid grid = small_grid();
    SweepOptions one;
    one.workers = 1;
    SweepOptions many;
    many.workers = 4;
    const auto a = sweep(grid, 0.2, one);
    const auto b = sweep(grid, 0.2, many);
    REQUIRE(a.size() == grid.size());
    std::ostringstream sa, sb;
    csv::write(sa, csv::sweep_table(a));
    csv::write(sb, csv::sweep_table(b));
    CHECK(sa.str() == sb.str());

    std::size_t i = 0;
    for (double g : grid.g.values())
        for (double bb : grid.b.values())
            for (double d : grid.d.values()) {
                CHECK(a[i].g == g);
                CHECK(a[i].b == bb);
                CHECK(a[i].dba == d);
                ++i;
            }
}

TEST_CASE("sweep resumes from checkpoints", "[twolaser]")
{
    const SweepGrid grid = small_grid();
    const fs::path dir = scratch("resume");
    SweepOptions o;
    o.workers = 2;
    o.checkpointDir = dir.string();
    const auto first = sweep(grid, 0.2, o);
    std::size_t slices = 0;
    for (const auto& e : fs::directory_iterator(dir))
        slices += e.path().extension() == ".csv";
    CHECK(slices == 3);

    // Doctor one slice: a resumed sweep must take it as stored.
    const fs::path slice = dir / "slice_0001.csv";
    csv::Table t = csv::read_file(slice.string());
    t.rows[0][4] = "1";
    t.rows[0][5] = "0.5";
    t.rows[0][6] = "7";
    t.rows[0][7] = "1";
    t.rows[0][8] = "7";
    csv::write_file_atomic(slice.string(), t);
    const auto resumed = sweep(grid, 0.2, o);
    REQUIRE(resumed[8].trap);
    CHECK(resumed[8].trap->width == 7.0);

    // A corrupted slice is recomputed.
    {
        std::ofstream bad(slice);
        bad << "g,B\n1,2,3\n";
    }
    const auto healed = sweep(grid, 0.2, o);
    CHECK(healed[8].trap.has_value() == first[8].trap.has_value());

    // A slice from another grid is recomputed too.
    SweepGrid other = grid;
    other.d = {-5.0, -1.0, 4};
    const auto moved = sweep(other, 0.2, o);
    CHECK(moved[0].dba == -5.0);
    fs::remove_all(dir);
}

TEST_CASE("sweep reports checkpoint failures", "[twolaser]")
{
    const fs::path dir = scratch("blocked");
    const fs::path file = dir / "not_a_dir";
    std::ofstream(file) << "x";
    SweepOptions o;
    o.workers = 1;
    o.checkpointDir = file.string();
    try {
        sweep(small_grid(), 0.2, o);
        FAIL("expected an I/O error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("completed") != std::string::npos);
    }
    fs::remove_all(dir);
}
