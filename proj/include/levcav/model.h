#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace levcav {

// CODATA 2018 exact / recommended values.
inline constexpr double kHbar = 1.054571817e-34;     // J s
inline constexpr double kSpeedOfLight = 299792458.0; // m/s

/// Dimensional description of the levitated-mirror cavity (SI units).
///
/// Exactly one of wavelength / cavityFrequency and one of finesse / linewidth
/// is required. Supplying both of a pair is accepted only when the two agree
/// to a relative tolerance of 1e-6.
struct PhysicalParams {
    double mass = 0.0;                   // kg
    double gravity = 9.80665;            // m s^-2
    double cavityLength = 0.0;           // m
    std::optional<double> wavelength;    // m
    std::optional<double> cavityFrequency; // rad s^-1
    std::optional<double> finesse;
    std::optional<double> linewidth;     // rad s^-1 (full width)
    double inputCoupling = 0.0;          // rad s^-1
    double powerAlpha = 0.0;             // W
    double detuningAlpha = 0.0;          // rad s^-1
    std::optional<double> powerBeta;     // W
    std::optional<double> detuningBeta;  // rad s^-1
    std::optional<double> photothermalStrength; // m W^-1
    std::optional<double> photothermalRate;     // s^-1
    double hbar = kHbar;
    double c = kSpeedOfLight;

    /// Throws InvalidParameters naming the first offending field.
    void validate() const;

    double omega0() const;      // cavity frequency
    double delta_omega() const; // full linewidth
    double coupling() const { return omega0() / cavityLength; } // G
};

struct NaturalScales {
    double length = 0.0;      // ℓ, m
    double frequency = 0.0;   // ν, rad s^-1
    double amplitude = 0.0;   // A, sqrt(photon number)
    double opticalRate = 0.0; // δω/2, rad s^-1
};

/// The reduced parameter set. Fields not used by a given model are ignored.
struct DimensionlessParams {
    double gEff = 0.5;          // g̃
    double epsilon = 0.01;      // ε̃
    double detuningAlpha = 0.0; // Δ̃α (initial value when scanning)
    double scanSpeed = 0.0;     // s̃
    double amplitudeRatio = 0.0; // B̃
    double detuningDiff = 0.0;  // Δ̃βα
    double ptStrength = 0.0;    // ζ̃
    double ptRate = 0.0;        // γ̃

    // Set by dimensionless() when the parameters cannot levitate the mirror.
    bool levitationWarning = false;

    /// Detuning at dimensionless time tau, Δ̃α + s̃ τ̃.
    double detuning_at(double tau) const { return detuningAlpha + scanSpeed * tau; }

    /// Throws InvalidParameters for ε̃ <= 0, non-finite fields, B̃ outside [0,1].
    void validate() const;

    bool operator==(const DimensionlessParams&) const = default;
};

NaturalScales natural_scales(const PhysicalParams& p);
DimensionlessParams dimensionless(const PhysicalParams& p);

/// Optical spring constant at one half-linewidth displacement, N/m.
double optical_spring_constant(const PhysicalParams& p);

/// A state expressed in SI units.
struct DimensionalState {
    double t = 0.0;  // s
    double x = 0.0;  // m
    double p = 0.0;  // kg m s^-1
    std::optional<std::complex<double>> alpha;
    std::optional<double> z; // m
};

/// A state in natural units; the inverse image of DimensionalState.
struct ReducedState {
    double tau = 0.0;
    double x = 0.0;
    double p = 0.0;
    std::optional<std::complex<double>> alpha;
    std::optional<double> z;
};

DimensionalState redimensionalize(const ReducedState& s, const NaturalScales& scales, double mass);
ReducedState nondimensionalize(const DimensionalState& s, const NaturalScales& scales, double mass);

} // namespace levcav
