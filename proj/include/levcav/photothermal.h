#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "levcav/dynamics.h"
#include "levcav/model.h"

namespace levcav {

struct PhotothermalState {
    double tau = 0.0;
    double x = 0.0;
    double p = 0.0;
    double z = 0.0;
    std::complex<double> alpha{};
};

struct PhotothermalDerivative {
    double dx = 0.0;
    double dp = 0.0;
    double dz = 0.0;
    std::complex<double> dalpha{};
};

/// Full system with the optical path change z̃ shifting the detuning.
/// Throws InvalidParameters for ε̃ <= 0 or γ̃ < 0.
PhotothermalDerivative photothermal_rhs(const PhotothermalState& s, const DimensionlessParams& p);

/// Field slaved to the Lorentzian in Δ̃α + x̃ + z̃; the returned dalpha is zero.
PhotothermalDerivative adiabatic_photothermal_rhs(const PhotothermalState& s, const DimensionlessParams& p);

struct PhotothermalSteadyState {
    double sigma = 0.0;
    double z = 0.0;         // z̃ˢ = −ζ̃g̃
    double detuning = 0.0;  // Δ̃αˢ = Δ̃α − ζ̃g̃
    double stable = 0.0;    // x̃ˢ₊
    double unstable = 0.0;  // x̃ˢ₋
    std::complex<double> alphaStable{};
    std::complex<double> alphaUnstable{};
};

PhotothermalSteadyState photothermal_steady_states(const DimensionlessParams& p);

/// Mechanical energy p̃²/2 + g̃(Δ̃α + x̃) − arctan(Δ̃α + x̃ + z̃).
double photothermal_energy(const PhotothermalState& s, const DimensionlessParams& p);

using Matrix5 = std::array<std::array<double, 5>, 5>;

/// Analytic Jacobian of the real 5-vector (x̃, p̃, z̃, Re α̃, Im α̃) at `s`.
Matrix5 photothermal_jacobian(const PhotothermalState& s, const DimensionlessParams& p);

enum class Stability { stable, unstable, marginal };
const char* to_string(Stability s);

inline constexpr double kMarginalBand = 1e-8;

struct StabilityRecord {
    double g = 0.0;
    double epsilon = 0.0;
    double zeta = 0.0;
    double gamma = 0.0;
    double detuning = 0.0;
    double maxEigRealPart = 0.0;
    Stability classification = Stability::marginal;
    std::string error; // non-empty when the cell failed
};

/// Largest real part of the Jacobian spectrum at the well minimum x̃ˢ₊.
/// Throws ConvergenceError (message includes the Jacobian) if the
/// eigensolver fails.
StabilityRecord jacobian_max_eig(const DimensionlessParams& p);

/// One record per (ε̃, g̃, ζ̃) cell in that nesting order. Cell failures are
/// recorded in the row's error field.
std::vector<StabilityRecord> stability_map(const std::vector<double>& zetaGrid,
                                           const std::vector<double>& gGrid,
                                           const std::vector<double>& epsilons, double gamma,
                                           double detuning = 0.0, unsigned workers = 0);

struct PerturbationConstants {
    double omega = 0.0;  // ω̃
    double lambda = 0.0; // λ̃ = γ̃(1 − ω̃²ζ̃)
    double E = 0.0;      // ζ̃ω̃²/(4(ω̃² + λ̃²))
    double K = 0.0;      // ρ̃ω̃²γ̃ζ̃/(ω̃² + λ̃²), amplitude of δz̃
    double rho = 0.0;
    double gamma = 0.0;
    double zeta = 0.0;
    bool degenerate = false; // ω̃²ζ̃ = 1, so λ̃ = 0
    bool largeGamma = false; // γ̃ > 0.01, outside the small-γ̃ regime

    double C_plus(double tau) const { return omega * (1.0 + 2.0 * lambda * tau); }
    double C_minus(double tau) const { return omega * (1.0 - 2.0 * lambda * tau); }
    double D_plus(double tau) const { return lambda + 2.0 * omega * omega * tau; }
    double D_minus(double tau) const { return lambda - 2.0 * omega * omega * tau; }
};

struct Perturbation {
    double dx = 0.0;
    double dp = 0.0;
    double dz = 0.0;
};

/// Closed-form small-oscillation solution about x̃ˢ₊ to zeroth and first
/// order in γ̃.
class LinearizedPerturbation {
public:
    LinearizedPerturbation(const DimensionlessParams& p, double rho);

    const PerturbationConstants& constants() const { return c_; }
    Perturbation zeroth(double tau) const;
    Perturbation first(double tau) const;

    /// Right-hand side of the linearized three-variable system.
    Perturbation rhs(const Perturbation& s) const;
    /// Residual of first() substituted into the linear system.
    Perturbation residual(double tau) const;

    /// Oscillation energy δp̃²/2 + ω̃²(δx̃ + δz̃)²/2.
    double energy(const Perturbation& s) const;

private:
    PerturbationConstants c_;
};

/// Period-averaged rate of energy change 2(1−g̃)g̃³ρ̃²ζ̃γ̃.
double photothermal_heating_per_period(double g, double rho, double zeta, double gamma);

/// Integrates the linearized system for `periods` oscillation periods from
/// the first-order state at τ̃ = 0 and returns the mean rate ΔẼ/τ̃.
double simulated_linear_heating_rate(const DimensionlessParams& p, double rho, double periods = 1.0);

/// Mirror at x̃ˢ₊ + ρ̃ at rest, z̃ = z̃ˢ, field at its adiabatic value.
PhotothermalState photothermal_perturbed(const DimensionlessParams& p, double rho);

RunSummary integrate_photothermal(const PhotothermalState& init, const DimensionlessParams& p,
                                  const IntegratorOptions& o, const SampleSink& sink);

} // namespace levcav
