#pragma once

#include <optional>
#include <vector>

#include "levcav/model.h"

namespace levcav {

/// Ṽ(x̃) = g̃χ̃ − arctan χ̃ with χ̃ = x̃ + Δ̃α.
double potential(double x, const DimensionlessParams& p);
double potential_derivative(double x, const DimensionlessParams& p);

/// Well half-width σ̃ = sqrt(1/g̃ − 1). Throws DomainError unless 0 < g̃ <= 1.
double well_sigma(double g);

struct Equilibria {
    double sigma = 0.0;
    double stable = 0.0;   // x̃ˢ₊, the well minimum
    double unstable = 0.0; // x̃ˢ₋, the barrier top
};

Equilibria equilibria(const DimensionlessParams& p);

/// Small-oscillation angular frequency at the minimum, ω̃² = 2g̃²σ̃.
double harmonic_frequency(double g);

struct QuadratureOptions {
    int panels = 16;         // graded panels in θ, denser towards x̃_M
    int nodesPerPanel = 32;  // Gauss-Legendre nodes per panel
};

struct OscillationSolution {
    double leftTurning = 0.0;  // x̃_M
    double rightTurning = 0.0; // x̃_P
    double period = 0.0;       // T̃
    double frequency = 0.0;    // 1/T̃
};

/// Period of the adiabatic oscillation whose left turning point is `xM`
/// (absolute coordinate; xM + Δ̃α must lie in (−σ̃, σ̃)).
OscillationSolution oscillation_period(const DimensionlessParams& p, double xM,
                                       const QuadratureOptions& q = {});

/// Amplitude convention used by the frequency map: a ∈ (0, σ̃) places the
/// left turning point at χ̃_M = σ̃ − 2a, so a → σ̃ reaches the barrier top.
OscillationSolution oscillation_at_amplitude(const DimensionlessParams& p, double amplitude,
                                             const QuadratureOptions& q = {});

struct FrequencyCell {
    double g = 0.0;
    double amplitude = 0.0;
    std::optional<double> frequency; // empty outside the well
};

/// f̃ on the product grid (row-major over g). Cells with a >= σ̃(g̃), g̃
/// outside (0, 1), or a failed root search are left empty.
std::vector<FrequencyCell> frequency_map(const std::vector<double>& gGrid,
                                         const std::vector<double>& ampGrid,
                                         unsigned workers = 0);

/// s̃_c = 2 sqrt(arctan σ̃ − σ̃g̃).
double critical_scan_speed(double g);

enum class ScanDirection { up, down }; // up: red to blue (s̃ > 0), down: blue to red
enum class ScanOutcome { pickedUp, transientOscillation, resting };

const char* to_string(ScanOutcome o);

struct ScanOptions {
    double startOffset = 5.0; // |Δ̃α0| = σ̃ + startOffset
    double relTol = 1e-10;
    double absTol = 1e-12;
    double outputStride = 0.0; // 0 disables sample recording
};

struct ScanSample {
    double tau = 0.0;
    double x = 0.0;
    double p = 0.0;
    double detuning = 0.0;
};

struct ScanResult {
    ScanOutcome outcome = ScanOutcome::resting;
    double initialDetuning = 0.0;
    double scanSpeed = 0.0;
    double horizon = 0.0;
    bool leftStand = false;
    std::vector<ScanSample> samples;
};

/// Adiabatic simulation of a linear detuning sweep with the mirror starting at
/// rest on a stand at x̃ = 0. The stand holds the mirror while the net force
/// is non-positive. `speed` is |s̃|; the sign follows the direction.
ScanResult scan_simulate(double g, double speed, ScanDirection dir, const ScanOptions& o = {});

ScanOutcome scan_classify(double g, double speed, ScanDirection dir, const ScanOptions& o = {});

/// Bisection on |s̃| for the largest downward sweep speed that still picks the
/// mirror up. Bracket is [lo, hi] with pickup at lo and none at hi.
double simulated_pickup_threshold(double g, double lo, double hi, double relTol = 1e-3,
                                  const ScanOptions& o = {});

} // namespace levcav
