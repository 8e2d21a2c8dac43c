#include "levcav/potential.h"

#include <cmath>
#include <numbers>
#include <string>

#include "levcav/error.h"
#include "levcav/numerics.h"
#include "levcav/ode.h"
#include "levcav/parallel.h"

namespace levcav {

double potential(double x, const DimensionlessParams& p)
{
    const double chi = x + p.detuningAlpha;
    return p.gEff * chi - std::atan(chi);
}

double potential_derivative(double x, const DimensionlessParams& p)
{
    const double chi = x + p.detuningAlpha;
    return p.gEff - 1.0 / (1.0 + chi * chi);
}

double well_sigma(double g)
{
    if (!(g > 0.0) || !(g <= 1.0))
        throw DomainError("no levitation: g must lie in (0, 1], got " + std::to_string(g));
    return std::sqrt(1.0 / g - 1.0);
}

Equilibria equilibria(const DimensionlessParams& p)
{
    Equilibria e;
    e.sigma = well_sigma(p.gEff);
    e.stable = -p.detuningAlpha + e.sigma;
    e.unstable = -p.detuningAlpha - e.sigma;
    return e;
}

double harmonic_frequency(double g)
{
    return std::sqrt(2.0 * g * g * well_sigma(g));
}

OscillationSolution oscillation_period(const DimensionlessParams& p, double xM,
                                       const QuadratureOptions& q)
{
    const double sigma = well_sigma(p.gEff);
    const double chiM = xM + p.detuningAlpha;
    if (!(chiM > -sigma && chiM < sigma))
        throw DomainError("left turning point must lie inside the well (-sigma, sigma), got chi = "
                          + std::to_string(chiM));
    if (q.panels < 1 || q.nodesPerPanel < 1)
        throw InvalidParameters("quadrature", "panels and nodes must be positive");

    const double g = p.gEff;
    auto V = [g](double chi) { return g * chi - std::atan(chi); };
    const double vM = V(chiM);
    auto f = [&](double chi) { return V(chi) - vM; };

    // The right turning point lies beyond the minimum; V grows without bound
    // there so the bracket always closes.
    const double start = sigma + std::min(1e-6, 0.5 * (sigma - chiM));
    const auto bracket = numerics::expand_bracket(f, start, std::min(1e-6, 0.5 * (sigma - chiM)),
                                                  2.0, sigma + 1e12);
    if (!bracket)
        throw ConvergenceError("no right turning point found for chi_M = " + std::to_string(chiM));
    const double chiP = numerics::brent(f, bracket->first, bracket->second, 1e-12, 1e-15).root;

    const double half = 0.5 * (chiP - chiM);
    const double slopeM = std::abs(g - 1.0 / (1.0 + chiM * chiM));
    const double slopeP = std::abs(g - 1.0 / (1.0 + chiP * chiP));

    // χ = mid + half sin θ turns the inverse-square-root endpoint behaviour
    // into a bounded integrand.
    // The gap V(χM) − V(χ) is formed from d = χ − χM and the arctan
    // difference identity so it keeps full relative accuracy near χM.
    auto integrand = [&](double theta) {
        const double c = std::sin(0.5 * theta + 0.25 * std::numbers::pi);
        const double d = 2.0 * half * c * c;
        const double chi = chiM + d;
        double gap = std::atan2(d, 1.0 + chi * chiM) - g * d;
        if (!(gap > 0.0)) {
            const double s = std::sin(theta);
            gap = s < 0.0 ? slopeM * half * (1.0 + s) : slopeP * half * (1.0 - s);
        }
        return half * std::cos(theta) / std::sqrt(gap);
    };

    const auto& rule = numerics::gauss_legendre(q.nodesPerPanel);
    const double pi = std::numbers::pi;
    double integral = 0.0;
    for (int k = 0; k < q.panels; ++k) {
        const double u0 = static_cast<double>(k) / q.panels;
        const double u1 = static_cast<double>(k + 1) / q.panels;
        integral += rule.integrate(integrand, -0.5 * pi + pi * u0 * u0, -0.5 * pi + pi * u1 * u1);
    }

    OscillationSolution sol;
    sol.leftTurning = chiM - p.detuningAlpha;
    sol.rightTurning = chiP - p.detuningAlpha;
    sol.period = std::numbers::sqrt2 * integral;
    sol.frequency = 1.0 / sol.period;
    return sol;
}

OscillationSolution oscillation_at_amplitude(const DimensionlessParams& p, double amplitude,
                                             const QuadratureOptions& q)
{
    const double sigma = well_sigma(p.gEff);
    if (!(amplitude > 0.0 && amplitude < sigma))
        throw DomainError("amplitude must lie in (0, sigma)");
    return oscillation_period(p, sigma - 2.0 * amplitude - p.detuningAlpha, q);
}

std::vector<FrequencyCell> frequency_map(const std::vector<double>& gGrid,
                                         const std::vector<double>& ampGrid, unsigned workers)
{
    std::vector<FrequencyCell> cells(gGrid.size() * ampGrid.size());
    parallel_for(cells.size(), worker_count(workers), [&](std::size_t idx) {
        const double g = gGrid[idx / ampGrid.size()];
        const double a = ampGrid[idx % ampGrid.size()];
        FrequencyCell& c = cells[idx];
        c.g = g;
        c.amplitude = a;
        if (!(g > 0.0 && g < 1.0) || !(a > 0.0))
            return;
        if (a >= std::sqrt(1.0 / g - 1.0))
            return;
        DimensionlessParams p;
        p.gEff = g;
        try {
            c.frequency = oscillation_at_amplitude(p, a).frequency;
        } catch (const ConvergenceError&) {
            // leave empty
        } catch (const DomainError&) {
        }
    });
    return cells;
}

double critical_scan_speed(double g)
{
    const double sigma = well_sigma(g);
    return 2.0 * std::sqrt(std::max(0.0, std::atan(sigma) - sigma * g));
}

const char* to_string(ScanOutcome o)
{
    switch (o) {
    case ScanOutcome::pickedUp:
        return "picked_up";
    case ScanOutcome::transientOscillation:
        return "transient_oscillation";
    case ScanOutcome::resting:
        return "resting";
    }
    return "unknown";
}

ScanResult scan_simulate(double g, double speed, ScanDirection dir, const ScanOptions& o)
{
    if (!(speed > 0.0) || !std::isfinite(speed))
        throw InvalidParameters("scanSpeed", "a scan needs a non-zero finite speed");
    const double sigma = well_sigma(g);

    ScanResult res;
    const double reach = sigma + o.startOffset;
    res.initialDetuning = dir == ScanDirection::down ? reach : -reach;
    res.scanSpeed = dir == ScanDirection::down ? -speed : speed;
    res.horizon = (reach + sigma + 20.0) / speed;

    const double d0 = res.initialDetuning;
    const double s = res.scanSpeed;
    auto rhs = [g, d0, s](double t, const ode::Vec<2>& y, ode::Vec<2>& dy) {
        const double chi = y[0] + d0 + s * t;
        const double force = -g + 1.0 / (1.0 + chi * chi);
        if (y[0] <= 0.0 && y[1] <= 0.0 && force <= 0.0) {
            dy = {0.0, 0.0}; // held by the stand
            return;
        }
        dy = {y[1], force};
    };
    auto project = [](double, ode::Vec<2>& y) {
        if (y[0] < 0.0) {
            y = {0.0, 0.0};
            return true;
        }
        return false;
    };

    ode::Options opts;
    opts.relTol = o.relTol;
    opts.absTol = o.absTol;
    opts.maxStep = 0.5;

    ode::GridCursor cursor(0.0, o.outputStride > 0.0 ? o.outputStride : 1.0);
    if (o.outputStride > 0.0)
        res.samples.push_back({0.0, 0.0, 0.0, d0});

    auto observe = [&](const ode::Segment<2>& seg) {
        if (seg.y1[0] > 0.0)
            res.leftStand = true;
        if (o.outputStride > 0.0) {
            cursor.feed(seg, [&](double t, const ode::Vec<2>& y) {
                res.samples.push_back({t, y[0], y[1], d0 + s * t});
                return true;
            });
        }
        return true;
    };

    const auto r = ode::integrate<2>(rhs, 0.0, ode::Vec<2>{0.0, 0.0}, res.horizon, opts, observe, project);
    if (r.status != ode::Status::completed)
        throw ConvergenceError("scan integration failed before the horizon");

    const double chiEnd = r.y[0] + d0 + s * r.t;
    if (r.y[0] > 0.0 && chiEnd > -sigma)
        res.outcome = ScanOutcome::pickedUp;
    else if (res.leftStand)
        res.outcome = ScanOutcome::transientOscillation;
    else
        res.outcome = ScanOutcome::resting;
    return res;
}

ScanOutcome scan_classify(double g, double speed, ScanDirection dir, const ScanOptions& o)
{
    ScanOptions quiet = o;
    quiet.outputStride = 0.0;
    return scan_simulate(g, speed, dir, quiet).outcome;
}

double simulated_pickup_threshold(double g, double lo, double hi, double relTol, const ScanOptions& o)
{
    if (scan_classify(g, lo, ScanDirection::down, o) != ScanOutcome::pickedUp)
        throw ConvergenceError("pickup threshold: lower speed does not pick the mirror up");
    if (scan_classify(g, hi, ScanDirection::down, o) == ScanOutcome::pickedUp)
        throw ConvergenceError("pickup threshold: upper speed still picks the mirror up");
    while (hi - lo > relTol * lo) {
        const double mid = 0.5 * (lo + hi);
        if (scan_classify(g, mid, ScanDirection::down, o) == ScanOutcome::pickedUp)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace levcav
