#include "levcav/dynamics.h"

#include <cmath>

#include "levcav/detail/run.h"
#include "levcav/error.h"
#include "levcav/potential.h"

namespace levcav {

const char* to_string(Fidelity f)
{
    switch (f) {
    case Fidelity::full:
        return "full";
    case Fidelity::adiabatic:
        return "adiabatic";
    case Fidelity::firstOrder:
        return "first-order";
    }
    return "unknown";
}

const char* to_string(Termination t)
{
    switch (t) {
    case Termination::horizon:
        return "horizon";
    case Termination::escape:
        return "escape";
    case Termination::integratorFailure:
        return "integrator-failure";
    }
    return "unknown";
}

Fidelity parse_fidelity(const std::string& s)
{
    if (s == "full")
        return Fidelity::full;
    if (s == "adiabatic")
        return Fidelity::adiabatic;
    if (s == "first-order" || s == "first_order" || s == "firstOrder")
        return Fidelity::firstOrder;
    throw InvalidParameters("fidelity", "expected full, adiabatic or first-order, got '" + s + "'");
}

double adiabatic_intensity(double chi)
{
    return 1.0 / (1.0 + chi * chi);
}

std::complex<double> adiabatic_field(double chi)
{
    return 1.0 / std::complex<double>(1.0, -chi);
}

namespace {

// ε̃·4(p̃+s̃)χ̃/(1+χ̃²)³
double first_order_force(double chi, double p, const DimensionlessParams& prm)
{
    const double q = 1.0 + chi * chi;
    return prm.epsilon * 4.0 * (p + prm.scanSpeed) * chi / (q * q * q);
}

} // namespace

SingleLaserDerivative full_rhs(const SingleLaserState& s, const DimensionlessParams& p)
{
    if (!(p.epsilon > 0.0))
        throw InvalidParameters("epsilon", "full dynamics need epsilon > 0; use the adiabatic fidelity");
    const double chi = p.detuning_at(s.tau) + s.x;
    SingleLaserDerivative d;
    d.dx = s.p;
    d.dp = -p.gEff + std::norm(s.alpha);
    d.dalpha = (std::complex<double>(0.0, chi) * s.alpha - s.alpha + 1.0) / p.epsilon;
    return d;
}

SingleLaserDerivative adiabatic_rhs(const SingleLaserState& s, const DimensionlessParams& p)
{
    const double chi = p.detuning_at(s.tau) + s.x;
    SingleLaserDerivative d;
    d.dx = s.p;
    d.dp = -p.gEff + adiabatic_intensity(chi);
    return d;
}

SingleLaserDerivative first_order_rhs(const SingleLaserState& s, const DimensionlessParams& p)
{
    const double chi = p.detuning_at(s.tau) + s.x;
    SingleLaserDerivative d = adiabatic_rhs(s, p);
    d.dp += first_order_force(chi, s.p, p);
    return d;
}

double energy(const SingleLaserState& s, const DimensionlessParams& p)
{
    const double chi = p.detuning_at(s.tau) + s.x;
    return 0.5 * s.p * s.p + p.gEff * chi - std::atan(chi);
}

double heating_rate(const SingleLaserState& s, const DimensionlessParams& p)
{
    const double chi = p.detuning_at(s.tau) + s.x;
    return s.p * first_order_force(chi, s.p, p);
}

void IntegratorOptions::validate() const
{
    if (!(relTol > 0.0 && relTol <= 1e-2))
        throw InvalidParameters("relTol", "must lie in (0, 1e-2]");
    if (!(absTol > 0.0 && absTol <= 1e-2))
        throw InvalidParameters("absTol", "must lie in (0, 1e-2]");
    if (!(maxStep > 0.0))
        throw InvalidParameters("maxStep", "must be positive");
    if (!(outputStride > 0.0) || !std::isfinite(outputStride))
        throw InvalidParameters("outputStride", "must be finite and positive");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw InvalidParameters("horizon", "must be finite and positive");
    if (!(escapeThreshold > 0.0))
        throw InvalidParameters("escapeThreshold", "must be positive");
}

bool single_laser_escaped(double tau, double x, double p, const DimensionlessParams& params,
                          double threshold)
{
    if (std::abs(x) > threshold)
        return true;
    if (!(params.gEff > 0.0 && params.gEff <= 1.0))
        return false;
    const double sigma = std::sqrt(1.0 / params.gEff - 1.0);
    const double chi = x + params.detuning_at(tau);
    return chi < -sigma - 0.5 && p < 0.0;
}

RunSummary integrate_stream(Fidelity f, const SingleLaserState& init, const DimensionlessParams& p,
                            const IntegratorOptions& o, const SampleSink& sink)
{
    p.validate();
    const double threshold = o.escapeThreshold;
    auto escaped2 = [&](double t, const auto& y) { return single_laser_escaped(t, y[0], y[1], p, threshold); };

    if (f == Fidelity::full) {
        if (!(p.epsilon > 0.0))
            throw InvalidParameters("epsilon", "full dynamics need epsilon > 0");
        const double invEps = 1.0 / p.epsilon;
        auto rhs = [&p, invEps](double t, const ode::Vec<4>& y, ode::Vec<4>& dy) {
            const double chi = p.detuning_at(t) + y[0];
            dy[0] = y[1];
            dy[1] = -p.gEff + y[2] * y[2] + y[3] * y[3];
            dy[2] = (-chi * y[3] - y[2] + 1.0) * invEps;
            dy[3] = (chi * y[2] - y[3]) * invEps;
        };
        auto make = [&p](double t, const ode::Vec<4>& y) {
            Sample s;
            s.tau = t;
            s.x = y[0];
            s.p = y[1];
            s.alpha = std::complex<double>(y[2], y[3]);
            const double chi = p.detuning_at(t) + y[0];
            s.energy = 0.5 * y[1] * y[1] + p.gEff * chi - std::atan(chi);
            s.heatingRate = y[1] * (y[2] * y[2] + y[3] * y[3] - adiabatic_intensity(chi));
            return s;
        };
        const ode::Vec<4> y0{init.x, init.p, init.alpha.real(), init.alpha.imag()};
        return detail::run_model<4>(rhs, init.tau, y0, o, make, escaped2, sink);
    }

    const bool firstOrder = f == Fidelity::firstOrder;
    auto rhs = [&p, firstOrder](double t, const ode::Vec<2>& y, ode::Vec<2>& dy) {
        const double chi = p.detuning_at(t) + y[0];
        dy[0] = y[1];
        dy[1] = -p.gEff + adiabatic_intensity(chi);
        if (firstOrder)
            dy[1] += first_order_force(chi, y[1], p);
    };
    auto make = [&p, firstOrder](double t, const ode::Vec<2>& y) {
        Sample s;
        s.tau = t;
        s.x = y[0];
        s.p = y[1];
        const double chi = p.detuning_at(t) + y[0];
        s.energy = 0.5 * y[1] * y[1] + p.gEff * chi - std::atan(chi);
        s.heatingRate = firstOrder ? y[1] * first_order_force(chi, y[1], p) : 0.0;
        return s;
    };
    const ode::Vec<2> y0{init.x, init.p};
    return detail::run_model<2>(rhs, init.tau, y0, o, make, escaped2, sink);
}

Trajectory integrate(Fidelity f, const SingleLaserState& init, const DimensionlessParams& p,
                     const IntegratorOptions& o)
{
    Trajectory t;
    t.fidelity = f;
    t.params = p;
    const RunSummary sum = integrate_stream(f, init, p, o, [&t](const Sample& s) {
        t.samples.push_back(s);
        return true;
    });
    t.termination = sum.termination;
    t.endTau = sum.endTau;
    t.message = sum.message;
    return t;
}

SingleLaserState perturbed_equilibrium(const DimensionlessParams& p, double rho)
{
    const Equilibria e = equilibria(p);
    SingleLaserState s;
    s.x = e.stable + rho;
    s.p = 0.0;
    s.alpha = adiabatic_field(s.x + p.detuningAlpha);
    return s;
}

std::vector<DimensionalState> redimensionalize(const Trajectory& t, const NaturalScales& scales,
                                               double mass)
{
    std::vector<DimensionalState> out;
    out.reserve(t.samples.size());
    for (const Sample& s : t.samples) {
        ReducedState r;
        r.tau = s.tau;
        r.x = s.x;
        r.p = s.p;
        r.alpha = s.alpha;
        r.z = s.z;
        out.push_back(redimensionalize(r, scales, mass));
    }
    return out;
}

} // namespace levcav
