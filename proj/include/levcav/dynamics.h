#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "levcav/model.h"

namespace levcav {

enum class Fidelity { full, adiabatic, firstOrder };
enum class Termination { horizon, escape, integratorFailure };

const char* to_string(Fidelity f);
const char* to_string(Termination t);
Fidelity parse_fidelity(const std::string& s); // "full" | "adiabatic" | "first-order"

/// Lorentzian steady-state intensity 1/(1+χ̃²) and field 1/(1−iχ̃).
double adiabatic_intensity(double chi);
std::complex<double> adiabatic_field(double chi);

struct SingleLaserState {
    double tau = 0.0;
    double x = 0.0;
    double p = 0.0;
    std::complex<double> alpha{}; // ignored by the reduced fidelities
};

struct SingleLaserDerivative {
    double dx = 0.0;
    double dp = 0.0;
    std::complex<double> dalpha{};
};

/// Full field-plus-mirror equations. Throws InvalidParameters for ε̃ <= 0.
SingleLaserDerivative full_rhs(const SingleLaserState& s, const DimensionlessParams& p);
/// Field slaved to the Lorentzian.
SingleLaserDerivative adiabatic_rhs(const SingleLaserState& s, const DimensionlessParams& p);
/// Adiabatic force plus the first-order ε̃ correction.
SingleLaserDerivative first_order_rhs(const SingleLaserState& s, const DimensionlessParams& p);

/// Ẽ = p̃²/2 + Ṽ(x̃), with the detuning taken at s.tau.
double energy(const SingleLaserState& s, const DimensionlessParams& p);

/// First-order heating rate ε̃·4p̃(p̃+s̃)χ̃/(1+χ̃²)³.
double heating_rate(const SingleLaserState& s, const DimensionlessParams& p);

struct IntegratorOptions {
    double relTol = 1e-9;
    double absTol = 1e-11;
    double maxStep = std::numeric_limits<double>::infinity();
    double outputStride = 0.1;
    double horizon = 1000.0;
    double escapeThreshold = 50.0; // |x̃| beyond this always counts as escape
    bool stopOnEscape = true;

    /// Throws InvalidParameters for tolerances outside (0, 1e-2] etc.
    void validate() const;
};

/// One row of a recorded trajectory. Optional channels are filled only by the
/// models that carry them.
struct Sample {
    double tau = 0.0;
    double x = 0.0; // x̃, or χ̃ for the two-laser model
    double p = 0.0;
    std::optional<std::complex<double>> alpha;
    std::optional<std::complex<double>> beta;
    std::optional<double> z;
    double energy = 0.0;
    double heatingRate = 0.0; // non-conservative power p̃·(F_model − F_adiabatic)
};

struct Trajectory {
    std::string model = "single"; // single | two-laser | photothermal
    Fidelity fidelity = Fidelity::full;
    DimensionlessParams params;
    std::vector<Sample> samples;
    Termination termination = Termination::horizon;
    double endTau = 0.0;
    std::string message;
};

/// Receives samples in order; return false to stop early.
using SampleSink = std::function<bool(const Sample&)>;

struct RunSummary {
    Termination termination = Termination::horizon;
    double endTau = 0.0;
    std::size_t samples = 0;
    std::size_t acceptedSteps = 0;
    std::size_t rejectedSteps = 0;
    Sample last;
    std::string message;
};

/// True when the single-laser escape criterion fires: χ̃ < −σ̃ − 0.5 while
/// falling, or |x̃| beyond the threshold.
bool single_laser_escaped(double tau, double x, double p, const DimensionlessParams& params,
                          double threshold);

/// Integrates in the chosen fidelity and streams grid samples to `sink`.
RunSummary integrate_stream(Fidelity f, const SingleLaserState& init, const DimensionlessParams& p,
                            const IntegratorOptions& o, const SampleSink& sink);

/// Same as integrate_stream but collects the samples.
Trajectory integrate(Fidelity f, const SingleLaserState& init, const DimensionlessParams& p,
                     const IntegratorOptions& o);

/// Mirror at x̃ˢ₊ + ρ̃ at rest, field at its adiabatic value.
SingleLaserState perturbed_equilibrium(const DimensionlessParams& p, double rho);

/// SI view of a trajectory: rows of DimensionalState.
std::vector<DimensionalState> redimensionalize(const Trajectory& t, const NaturalScales& scales,
                                               double mass);

} // namespace levcav
