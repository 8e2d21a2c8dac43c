#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "levcav/dynamics.h"
#include "levcav/model.h"

namespace levcav {

struct TwoLaserState {
    double tau = 0.0;
    double chi = 0.0; // χ̃ = x̃ + Δ̃α
    double p = 0.0;
    std::complex<double> alpha{};
    std::complex<double> beta{};
};

struct TwoLaserDerivative {
    double dchi = 0.0;
    double dp = 0.0;
    std::complex<double> dalpha{};
    std::complex<double> dbeta{};
};

/// Throws InvalidParameters for ε̃ <= 0 or B̃ outside [0, 1].
TwoLaserDerivative two_laser_rhs(const TwoLaserState& s, const DimensionlessParams& p);

/// Ṽ = g̃χ̃ − arctan χ̃ − B̃² arctan(χ̃ + Δ̃βα) and its first two derivatives.
double two_laser_potential(double chi, const DimensionlessParams& p);
double two_laser_potential_derivative(double chi, const DimensionlessParams& p);
double two_laser_potential_second(double chi, const DimensionlessParams& p);

/// Bracketed factor χ̃/(1+χ̃²)³ + B̃²(χ̃+Δ̃βα)/(1+(χ̃+Δ̃βα)²)³ of the heating rate.
double two_laser_heating_coefficient(double chi, const DimensionlessParams& p);
/// 4p̃²ε̃ times the coefficient above.
double two_laser_heating(const TwoLaserState& s, const DimensionlessParams& p);
double two_laser_energy(const TwoLaserState& s, const DimensionlessParams& p);

/// Mirror at χ̃0 with momentum p̃ and both fields at their steady states.
TwoLaserState two_laser_seed(double chi0, double p, const DimensionlessParams& params);

struct CriticalPoint {
    double chi = 0.0;
    double curvature = 0.0; // Ṽ″
    bool minimum = false;
};

/// All critical points of the combined potential on [−X, X], X = |Δ̃βα| + 10,
/// in increasing χ̃.
std::vector<CriticalPoint> two_laser_critical_points(const DimensionlessParams& p);

struct TrapSearchOptions {
    double horizonPeriods = 40.0;  // classification horizon in small-oscillation periods
    double widthTolerance = 1e-2;  // bisection tolerance on the width
    double initialHalfWidth = 0.02;
    double growth = 1.5;
    double relTol = 1e-8;
    double absTol = 1e-10;
    int samplesPerPeriod = 64;     // energy averaging resolution
};

/// Interval the mirror must not leave: the nearest barrier tops around a
/// minimum, or the search bound where the potential has no barrier.
struct TrapInterval {
    double lo = 0.0;
    double hi = 0.0;
};

TrapInterval barrier_interval(const DimensionlessParams& p, double chiMin);

struct TrapVerdict {
    bool trapped = false;
    bool leftInterval = false;
    double firstPeriodEnergy = 0.0; // mean Ẽ over the first period
    double lastPeriodEnergy = 0.0;  // mean Ẽ over the last period
    double endTau = 0.0;
};

/// Runs the full two-laser system from `init` for the classification horizon
/// around the minimum `chiMin`.
TrapVerdict classify_trapped(const DimensionlessParams& p, double chiMin, const TwoLaserState& init,
                             const TrapSearchOptions& o = {});

struct TrapRegion {
    double chiMin = 0.0;
    double width = 0.0;
    double depth = 0.0;
    double area = 0.0;
    double dampingAtMin = 0.0; // heating coefficient at the minimum, negative when damped
    int otherDampedMinima = 0;
};

/// Greatest-area trapping-and-damping region, or nullopt if none exists.
std::optional<TrapRegion> find_trap_region(const DimensionlessParams& p,
                                           const TrapSearchOptions& o = {});

/// Trajectory of the two-laser system; the sample's x holds χ̃.
RunSummary integrate_two_laser(const TwoLaserState& init, const DimensionlessParams& p,
                               const IntegratorOptions& o, const SampleSink& sink);

struct SweepAxis {
    double lo = 0.0;
    double hi = 1.0;
    int n = 2;
    std::vector<double> values() const;
};

struct SweepGrid {
    SweepAxis g{0.0, 2.0, 20};
    SweepAxis b{0.0, 1.0, 20};
    SweepAxis d{-10.0, 10.0, 50};
    std::size_t size() const;
};

struct SweepRecord {
    double g = 0.0;
    double b = 0.0;
    double dba = 0.0;
    double epsilon = 0.0;
    std::optional<TrapRegion> trap;
};

struct SweepOptions {
    unsigned workers = 0;        // 0 picks LEVCAV_THREADS or the hardware count
    std::string checkpointDir;   // empty disables checkpointing
    TrapSearchOptions search;
    std::function<void(std::size_t done, std::size_t total)> progress;
};

/// Exhaustive grid evaluation, ordered by (g̃, B̃, Δ̃βα). Each g̃-slice is
/// checkpointed as one file; existing slice files are reused on resume.
/// Points with g̃ outside (0, 1 + B̃²) are recorded as not found.
std::vector<SweepRecord> sweep(const SweepGrid& grid, double epsilon, const SweepOptions& o = {});

/// Evaluates one grid point.
SweepRecord sweep_point(double g, double b, double d, double epsilon, const TrapSearchOptions& o);

} // namespace levcav
