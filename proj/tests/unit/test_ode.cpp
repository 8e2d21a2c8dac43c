#include "catch_amalgamated.hpp"

#include <cmath>
#include <vector>

#include "levcav/ode.h"

using namespace levcav;
using Catch::Matchers::WithinAbs;

namespace {

auto oscillator = [](double, const ode::Vec<2>& y, ode::Vec<2>& dy) { dy = {y[1], -y[0]}; };
auto keep_going = [](const auto&) { return true; };

} // namespace

TEST_CASE("harmonic oscillator end state matches the exact solution", "[ode]")
{
    ode::Options o;
    o.relTol = 1e-11;
    o.absTol = 1e-13;
    const auto r = ode::integrate<2>(oscillator, 0.0, ode::Vec<2>{1.0, 0.0}, 10.0, o, keep_going);
    REQUIRE(r.status == ode::Status::completed);
    CHECK(r.t == 10.0);
    CHECK_THAT(r.y[0], WithinAbs(std::cos(10.0), 1e-9));
    CHECK_THAT(r.y[1], WithinAbs(-std::sin(10.0), 1e-9));
}

TEST_CASE("dense output stays accurate between steps", "[ode]")
{
    ode::Options o;
    o.relTol = 1e-10;
    o.absTol = 1e-12;
    ode::GridCursor cursor(0.0, 0.01);
    double worst = 0.0;
    std::size_t count = 0;
    ode::integrate<2>(oscillator, 0.0, ode::Vec<2>{1.0, 0.0}, 20.0, o, [&](const ode::Segment<2>& seg) {
        return cursor.feed(seg, [&](double t, const ode::Vec<2>& y) {
            worst = std::max(worst, std::abs(y[0] - std::cos(t)));
            ++count;
            return true;
        });
    });
    CHECK(count == 2000);
    CHECK(worst < 1e-8);
}

TEST_CASE("integration runs backwards in time", "[ode]")
{
    auto decay = [](double, const ode::Vec<1>& y, ode::Vec<1>& dy) { dy[0] = -y[0]; };
    const auto r = ode::integrate<1>(decay, 1.0, ode::Vec<1>{std::exp(-1.0)}, 0.0, ode::Options{}, keep_going);
    REQUIRE(r.status == ode::Status::completed);
    CHECK_THAT(r.y[0], WithinAbs(1.0, 1e-8));
}

TEST_CASE("observer can stop the run", "[ode]")
{
    int calls = 0;
    const auto r = ode::integrate<2>(oscillator, 0.0, ode::Vec<2>{1.0, 0.0}, 100.0, ode::Options{},
                                     [&](const ode::Segment<2>& seg) { return ++calls < 3 && seg.t1 < 100.0; });
    CHECK(r.status == ode::Status::stopped);
    CHECK(calls == 3);
    CHECK(r.t < 100.0);
}

TEST_CASE("finite-time blow-up is reported instead of completing", "[ode]")
{
    auto blowup = [](double, const ode::Vec<1>& y, ode::Vec<1>& dy) { dy[0] = y[0] * y[0]; };
    const auto r = ode::integrate<1>(blowup, 0.0, ode::Vec<1>{1.0}, 2.0, ode::Options{}, keep_going);
    CHECK(r.status != ode::Status::completed);
    CHECK(r.t < 1.0);
}

TEST_CASE("projection is applied after accepted steps", "[ode]")
{
    // Falling body on a floor at zero.
    auto fall = [](double, const ode::Vec<2>& y, ode::Vec<2>& dy) { dy = {y[1], -1.0}; };
    auto floor = [](double, ode::Vec<2>& y) {
        if (y[0] < 0.0) {
            y = {0.0, 0.0};
            return true;
        }
        return false;
    };
    ode::Options o;
    o.maxStep = 0.1;
    double lowest = 1.0;
    const auto r = ode::integrate<2>(fall, 0.0, ode::Vec<2>{1.0, 0.0}, 5.0, o,
                                     [&](const ode::Segment<2>& s) {
                                         lowest = std::min(lowest, s.y1[0]);
                                         return true;
                                     },
                                     floor);
    REQUIRE(r.status == ode::Status::completed);
    CHECK(lowest >= 0.0);
    CHECK(r.y[0] == 0.0);
}

TEST_CASE("step counts are deterministic", "[ode]")
{
    const auto a = ode::integrate<2>(oscillator, 0.0, ode::Vec<2>{1.0, 0.0}, 50.0, ode::Options{}, keep_going);
    const auto b = ode::integrate<2>(oscillator, 0.0, ode::Vec<2>{1.0, 0.0}, 50.0, ode::Options{}, keep_going);
    CHECK(a.accepted == b.accepted);
    CHECK(a.y == b.y);
}
