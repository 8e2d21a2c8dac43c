#include "levcav/twolaser.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <stdexcept>

#include "levcav/csv.h"
#include "levcav/detail/run.h"
#include "levcav/error.h"
#include "levcav/numerics.h"
#include "levcav/parallel.h"

namespace levcav {

namespace {

void require_two_laser(const DimensionlessParams& p)
{
    if (!(p.epsilon > 0.0))
        throw InvalidParameters("epsilon", "must be strictly positive");
    if (!(p.amplitudeRatio >= 0.0 && p.amplitudeRatio <= 1.0))
        throw InvalidParameters("amplitudeRatio", "must lie in [0, 1]");
}

double lorentz_cube(double u)
{
    const double q = 1.0 + u * u;
    return u / (q * q * q);
}

template <class Escaped>
RunSummary run_two_laser(const TwoLaserState& init, const DimensionlessParams& p,
                         const IntegratorOptions& o, Escaped&& escaped, const SampleSink& sink)
{
    require_two_laser(p);
    const double g = p.gEff;
    const double b2 = p.amplitudeRatio * p.amplitudeRatio;
    const double d = p.detuningDiff;
    const double invEps = 1.0 / p.epsilon;

    auto rhs = [=](double, const ode::Vec<6>& y, ode::Vec<6>& dy) {
        const double chi = y[0];
        const double chib = chi + d;
        dy[0] = y[1];
        dy[1] = -g + y[2] * y[2] + y[3] * y[3] + b2 * (y[4] * y[4] + y[5] * y[5]);
        dy[2] = (-chi * y[3] - y[2] + 1.0) * invEps;
        dy[3] = (chi * y[2] - y[3]) * invEps;
        dy[4] = (-chib * y[5] - y[4] + 1.0) * invEps;
        dy[5] = (chib * y[4] - y[5]) * invEps;
    };
    auto make = [&p, b2, d](double t, const ode::Vec<6>& y) {
        Sample s;
        s.tau = t;
        s.x = y[0];
        s.p = y[1];
        s.alpha = std::complex<double>(y[2], y[3]);
        s.beta = std::complex<double>(y[4], y[5]);
        s.energy = 0.5 * y[1] * y[1] + two_laser_potential(y[0], p);
        const double adiabaticForce = adiabatic_intensity(y[0]) + b2 * adiabatic_intensity(y[0] + d);
        const double force = y[2] * y[2] + y[3] * y[3] + b2 * (y[4] * y[4] + y[5] * y[5]);
        s.heatingRate = y[1] * (force - adiabaticForce);
        return s;
    };
    auto esc = [&escaped](double t, const ode::Vec<6>& y) { return escaped(t, y[0], y[1]); };
    const ode::Vec<6> y0{init.chi, init.p, init.alpha.real(), init.alpha.imag(),
                         init.beta.real(), init.beta.imag()};
    return detail::run_model<6>(rhs, init.tau, y0, o, make, esc, sink);
}

double search_bound(const DimensionlessParams& p)
{
    return std::abs(p.detuningDiff) + 10.0;
}

} // namespace

TwoLaserDerivative two_laser_rhs(const TwoLaserState& s, const DimensionlessParams& p)
{
    require_two_laser(p);
    const double b2 = p.amplitudeRatio * p.amplitudeRatio;
    const std::complex<double> i(0.0, 1.0);
    TwoLaserDerivative d;
    d.dchi = s.p;
    d.dp = -p.gEff + std::norm(s.alpha) + b2 * std::norm(s.beta);
    d.dalpha = (i * s.chi * s.alpha - s.alpha + 1.0) / p.epsilon;
    d.dbeta = (i * (s.chi + p.detuningDiff) * s.beta - s.beta + 1.0) / p.epsilon;
    return d;
}

double two_laser_potential(double chi, const DimensionlessParams& p)
{
    const double b2 = p.amplitudeRatio * p.amplitudeRatio;
    return p.gEff * chi - std::atan(chi) - b2 * std::atan(chi + p.detuningDiff);
}

double two_laser_potential_derivative(double chi, const DimensionlessParams& p)
{
    const double b2 = p.amplitudeRatio * p.amplitudeRatio;
    return p.gEff - adiabatic_intensity(chi) - b2 * adiabatic_intensity(chi + p.detuningDiff);
}

double two_laser_potential_second(double chi, const DimensionlessParams& p)
{
    const double b2 = p.amplitudeRatio * p.amplitudeRatio;
    const double u = chi + p.detuningDiff;
    const double qa = 1.0 + chi * chi;
    const double qb = 1.0 + u * u;
    return 2.0 * chi / (qa * qa) + b2 * 2.0 * u / (qb * qb);
}

double two_laser_heating_coefficient(double chi, const DimensionlessParams& p)
{
    const double b2 = p.amplitudeRatio * p.amplitudeRatio;
    return lorentz_cube(chi) + b2 * lorentz_cube(chi + p.detuningDiff);
}

double two_laser_heating(const TwoLaserState& s, const DimensionlessParams& p)
{
    return 4.0 * s.p * s.p * p.epsilon * two_laser_heating_coefficient(s.chi, p);
}

double two_laser_energy(const TwoLaserState& s, const DimensionlessParams& p)
{
    return 0.5 * s.p * s.p + two_laser_potential(s.chi, p);
}

TwoLaserState two_laser_seed(double chi0, double p, const DimensionlessParams& params)
{
    TwoLaserState s;
    s.chi = chi0;
    s.p = p;
    s.alpha = adiabatic_field(chi0);
    s.beta = adiabatic_field(chi0 + params.detuningDiff);
    return s;
}

std::vector<CriticalPoint> two_laser_critical_points(const DimensionlessParams& p)
{
    const double bound = search_bound(p);
    const double step = 0.01;
    const int n = static_cast<int>(std::ceil(2.0 * bound / step));
    auto dV = [&p](double chi) { return two_laser_potential_derivative(chi, p); };

    std::vector<CriticalPoint> out;
    double a = -bound;
    double fa = dV(a);
    for (int k = 1; k <= n; ++k) {
        const double b = -bound + 2.0 * bound * static_cast<double>(k) / n;
        const double fb = dV(b);
        if ((fa < 0.0) != (fb < 0.0)) {
            const double root = numerics::brent(dV, a, b, 1e-14, 1e-15).root;
            CriticalPoint c;
            c.chi = root;
            c.curvature = two_laser_potential_second(root, p);
            // V' going from negative to positive marks a minimum.
            c.minimum = fa < 0.0;
            if (out.empty() || std::abs(out.back().chi - root) > 1e-9)
                out.push_back(c);
        }
        a = b;
        fa = fb;
    }
    return out;
}

TrapInterval barrier_interval(const DimensionlessParams& p, double chiMin)
{
    const double bound = search_bound(p);
    TrapInterval iv{-bound, bound};
    for (const CriticalPoint& c : two_laser_critical_points(p)) {
        if (c.minimum)
            continue;
        if (c.chi < chiMin)
            iv.lo = std::max(iv.lo, c.chi);
        else if (c.chi > chiMin)
            iv.hi = std::min(iv.hi, c.chi);
    }
    return iv;
}

TrapVerdict classify_trapped(const DimensionlessParams& p, double chiMin, const TwoLaserState& init,
                             const TrapSearchOptions& o)
{
    const double curvature = two_laser_potential_second(chiMin, p);
    if (!(curvature > 0.0))
        throw DomainError("classify_trapped: chi_min is not a potential minimum");
    const double period = 2.0 * std::numbers::pi / std::sqrt(curvature);
    const TrapInterval iv = barrier_interval(p, chiMin);

    IntegratorOptions io;
    io.relTol = o.relTol;
    io.absTol = o.absTol;
    io.horizon = o.horizonPeriods * period;
    io.outputStride = period / o.samplesPerPeriod;
    io.maxStep = period / 8.0;

    TrapVerdict v;
    double firstSum = 0.0, lastSum = 0.0;
    int firstN = 0, lastN = 0;
    const double t0 = init.tau;
    const double lastStart = t0 + io.horizon - period;
    auto sink = [&](const Sample& s) {
        if (s.tau - t0 < period) {
            firstSum += s.energy;
            ++firstN;
        }
        if (s.tau > lastStart + 1e-9 * period) {
            lastSum += s.energy;
            ++lastN;
        }
        return true;
    };
    auto escaped = [&iv](double, double chi, double) { return !(chi > iv.lo && chi < iv.hi); };

    if (!(init.chi > iv.lo && init.chi < iv.hi)) {
        v.leftInterval = true;
        return v;
    }
    const RunSummary sum = run_two_laser(init, p, io, escaped, sink);
    v.endTau = sum.endTau;
    if (sum.termination == Termination::integratorFailure)
        throw ConvergenceError("two-laser classification: " + sum.message);
    v.leftInterval = sum.termination == Termination::escape;
    v.firstPeriodEnergy = firstN > 0 ? firstSum / firstN : 0.0;
    v.lastPeriodEnergy = lastN > 0 ? lastSum / lastN : 0.0;
    v.trapped = !v.leftInterval && lastN > 0 && v.lastPeriodEnergy < v.firstPeriodEnergy;
    return v;
}

namespace {

bool symmetric_trapped(const DimensionlessParams& p, double chiMin, double r, const TrapSearchOptions& o)
{
    return classify_trapped(p, chiMin, two_laser_seed(chiMin + r, 0.0, p), o).trapped
        && classify_trapped(p, chiMin, two_laser_seed(chiMin - r, 0.0, p), o).trapped;
}

// Largest symmetric perturbation that stays trapped, or 0 if even the
// smallest probe escapes.
double trap_half_width(const DimensionlessParams& p, double chiMin, const TrapSearchOptions& o)
{
    double lo = o.initialHalfWidth;
    if (!symmetric_trapped(p, chiMin, lo, o))
        return 0.0;
    const TrapInterval iv = barrier_interval(p, chiMin);
    const double rMax = iv.hi - iv.lo;
    double hi = lo * o.growth;
    while (hi < rMax && symmetric_trapped(p, chiMin, hi, o)) {
        lo = hi;
        hi *= o.growth;
    }
    hi = std::min(hi, rMax);
    while (2.0 * (hi - lo) > o.widthTolerance) {
        const double mid = 0.5 * (lo + hi);
        if (symmetric_trapped(p, chiMin, mid, o))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

} // namespace

std::optional<TrapRegion> find_trap_region(const DimensionlessParams& p, const TrapSearchOptions& o)
{
    require_two_laser(p);
    std::vector<TrapRegion> regions;
    int damped = 0;
    for (const CriticalPoint& c : two_laser_critical_points(p)) {
        if (!c.minimum || !(c.curvature > 0.0))
            continue;
        const double coeff = two_laser_heating_coefficient(c.chi, p);
        if (!(coeff < 0.0))
            continue;
        ++damped;
        const double half = trap_half_width(p, c.chi, o);
        if (!(half > 0.0))
            continue;
        TrapRegion r;
        r.chiMin = c.chi;
        r.width = 2.0 * half;
        const double vMin = two_laser_potential(c.chi, p);
        r.depth = std::max(two_laser_potential(c.chi + half, p), two_laser_potential(c.chi - half, p)) - vMin;
        r.area = r.width * r.depth;
        r.dampingAtMin = coeff;
        regions.push_back(r);
    }
    if (regions.empty())
        return std::nullopt;
    TrapRegion best = *std::max_element(regions.begin(), regions.end(),
                                        [](const TrapRegion& a, const TrapRegion& b) { return a.area < b.area; });
    best.otherDampedMinima = damped - 1;
    return best;
}

RunSummary integrate_two_laser(const TwoLaserState& init, const DimensionlessParams& p,
                               const IntegratorOptions& o, const SampleSink& sink)
{
    const double threshold = o.escapeThreshold;
    auto escaped = [threshold](double, double chi, double) { return std::abs(chi) > threshold; };
    return run_two_laser(init, p, o, escaped, sink);
}

std::vector<double> SweepAxis::values() const
{
    if (n < 1)
        throw InvalidParameters("grid", "every sweep axis needs at least one point");
    return numerics::linspace(lo, hi, n);
}

std::size_t SweepGrid::size() const
{
    return static_cast<std::size_t>(g.n) * b.n * d.n;
}

SweepRecord sweep_point(double g, double b, double d, double epsilon, const TrapSearchOptions& o)
{
    SweepRecord rec;
    rec.g = g;
    rec.b = b;
    rec.dba = d;
    rec.epsilon = epsilon;
    if (!(g > 0.0 && g < 1.0 + b * b))
        return rec;
    DimensionlessParams p;
    p.gEff = g;
    p.epsilon = epsilon;
    p.amplitudeRatio = b;
    p.detuningDiff = d;
    rec.trap = find_trap_region(p, o);
    return rec;
}

namespace {

std::string slice_path(const std::string& dir, int i)
{
    char name[32];
    std::snprintf(name, sizeof name, "slice_%04d.csv", i);
    return (std::filesystem::path(dir) / name).string();
}

// A checkpointed slice is reused only if it matches the grid exactly.
std::optional<std::vector<SweepRecord>> load_slice(const std::string& path, const std::vector<double>& bs,
                                                   const std::vector<double>& ds, double g, double epsilon)
{
    std::error_code ec;
    if (!std::filesystem::exists(path, ec))
        return std::nullopt;
    try {
        auto recs = csv::parse_sweep(csv::read_file(path));
        if (recs.size() != bs.size() * ds.size())
            return std::nullopt;
        for (std::size_t k = 0; k < recs.size(); ++k) {
            const SweepRecord& r = recs[k];
            if (r.g != g || r.b != bs[k / ds.size()] || r.dba != ds[k % ds.size()] || r.epsilon != epsilon)
                return std::nullopt;
        }
        return recs;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

} // namespace

std::vector<SweepRecord> sweep(const SweepGrid& grid, double epsilon, const SweepOptions& o)
{
    if (grid.g.n < 1 || grid.b.n < 1 || grid.d.n < 1)
        throw InvalidParameters("grid", "every sweep axis needs at least one point");
    if (!(epsilon > 0.0))
        throw InvalidParameters("epsilon", "must be strictly positive");
    const auto gs = grid.g.values();
    const auto bs = grid.b.values();
    const auto ds = grid.d.values();
    const std::size_t sliceSize = bs.size() * ds.size();
    const std::size_t total = gs.size() * sliceSize;
    const unsigned workers = worker_count(o.workers);

    std::vector<SweepRecord> out(total);
    auto compute = [&](std::size_t offset, std::size_t count) {
        parallel_for(count, workers, [&](std::size_t k) {
            const std::size_t idx = offset + k;
            const double g = gs[idx / sliceSize];
            const double b = bs[(idx % sliceSize) / ds.size()];
            const double d = ds[idx % ds.size()];
            out[idx] = sweep_point(g, b, d, epsilon, o.search);
        });
    };

    if (o.checkpointDir.empty()) {
        compute(0, total);
        if (o.progress)
            o.progress(total, total);
        return out;
    }

    std::error_code ec;
    std::filesystem::create_directories(o.checkpointDir, ec);
    if (ec)
        throw std::runtime_error("cannot create checkpoint directory " + o.checkpointDir + ": " + ec.message()
                                 + " (completed 0/" + std::to_string(total) + ")");

    std::size_t done = 0;
    for (std::size_t i = 0; i < gs.size(); ++i) {
        const std::string path = slice_path(o.checkpointDir, static_cast<int>(i));
        if (auto cached = load_slice(path, bs, ds, gs[i], epsilon)) {
            std::copy(cached->begin(), cached->end(), out.begin() + static_cast<std::ptrdiff_t>(i * sliceSize));
        } else {
            compute(i * sliceSize, sliceSize);
            const std::vector<SweepRecord> slice(out.begin() + static_cast<std::ptrdiff_t>(i * sliceSize),
                                                 out.begin() + static_cast<std::ptrdiff_t>((i + 1) * sliceSize));
            try {
                csv::write_file_atomic(path, csv::sweep_table(slice));
            } catch (const std::exception& e) {
                throw std::runtime_error(std::string("checkpoint write failed: ") + e.what() + " (completed "
                                         + std::to_string(done) + "/" + std::to_string(total) + ")");
            }
        }
        done += sliceSize;
        if (o.progress)
            o.progress(done, total);
    }
    return out;
}

} // namespace levcav
