#include "levcav/photothermal.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "levcav/detail/run.h"
#include "levcav/error.h"
#include "levcav/parallel.h"
#include "levcav/potential.h"

namespace levcav {

namespace {

void require_photothermal(const DimensionlessParams& p)
{
    if (!(p.epsilon > 0.0))
        throw InvalidParameters("epsilon", "must be strictly positive");
    if (!(p.ptRate >= 0.0))
        throw InvalidParameters("ptRate", "must be non-negative");
}

} // namespace

PhotothermalDerivative photothermal_rhs(const PhotothermalState& s, const DimensionlessParams& p)
{
    require_photothermal(p);
    const double chi = p.detuningAlpha + s.x + s.z;
    const double intensity = std::norm(s.alpha);
    PhotothermalDerivative d;
    d.dx = s.p;
    d.dp = -p.gEff + intensity;
    d.dz = -p.ptRate * (s.z + p.ptStrength * intensity);
    d.dalpha = (std::complex<double>(0.0, chi) * s.alpha - s.alpha + 1.0) / p.epsilon;
    return d;
}

PhotothermalDerivative adiabatic_photothermal_rhs(const PhotothermalState& s, const DimensionlessParams& p)
{
    const double intensity = adiabatic_intensity(p.detuningAlpha + s.x + s.z);
    PhotothermalDerivative d;
    d.dx = s.p;
    d.dp = -p.gEff + intensity;
    d.dz = -p.ptRate * (s.z + p.ptStrength * intensity);
    return d;
}

PhotothermalSteadyState photothermal_steady_states(const DimensionlessParams& p)
{
    PhotothermalSteadyState ss;
    ss.sigma = well_sigma(p.gEff);
    ss.z = -p.ptStrength * p.gEff;
    ss.detuning = p.detuningAlpha - p.ptStrength * p.gEff;
    ss.stable = -ss.detuning + ss.sigma;
    ss.unstable = -ss.detuning - ss.sigma;
    ss.alphaStable = adiabatic_field(ss.sigma);
    ss.alphaUnstable = adiabatic_field(-ss.sigma);
    return ss;
}

double photothermal_energy(const PhotothermalState& s, const DimensionlessParams& p)
{
    const double u = p.detuningAlpha + s.x;
    return 0.5 * s.p * s.p + p.gEff * u - std::atan(u + s.z);
}

Matrix5 photothermal_jacobian(const PhotothermalState& s, const DimensionlessParams& p)
{
    require_photothermal(p);
    const double chi = p.detuningAlpha + s.x + s.z;
    const double a = s.alpha.real();
    const double b = s.alpha.imag();
    const double ie = 1.0 / p.epsilon;
    const double gz = p.ptRate * p.ptStrength;
    Matrix5 J{};
    J[0] = {0.0, 1.0, 0.0, 0.0, 0.0};
    J[1] = {0.0, 0.0, 0.0, 2.0 * a, 2.0 * b};
    J[2] = {0.0, 0.0, -p.ptRate, -2.0 * gz * a, -2.0 * gz * b};
    J[3] = {-b * ie, 0.0, -b * ie, -ie, -chi * ie};
    J[4] = {a * ie, 0.0, a * ie, chi * ie, -ie};
    return J;
}

const char* to_string(Stability s)
{
    switch (s) {
    case Stability::stable:
        return "stable";
    case Stability::unstable:
        return "unstable";
    case Stability::marginal:
        return "marginal";
    }
    return "unknown";
}

StabilityRecord jacobian_max_eig(const DimensionlessParams& p)
{
    const PhotothermalSteadyState ss = photothermal_steady_states(p);
    PhotothermalState s;
    s.x = ss.stable;
    s.z = ss.z;
    s.alpha = ss.alphaStable;
    const Matrix5 J = photothermal_jacobian(s, p);

    Eigen::Matrix<double, 5, 5> M;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            M(i, j) = J[i][j];
    Eigen::EigenSolver<Eigen::Matrix<double, 5, 5>> solver(M, false);
    if (solver.info() != Eigen::Success) {
        std::ostringstream os;
        os << "eigensolver did not converge for Jacobian\n" << M;
        throw ConvergenceError(os.str());
    }

    StabilityRecord r;
    r.g = p.gEff;
    r.epsilon = p.epsilon;
    r.zeta = p.ptStrength;
    r.gamma = p.ptRate;
    r.detuning = p.detuningAlpha;
    r.maxEigRealPart = solver.eigenvalues().real().maxCoeff();
    if (std::abs(r.maxEigRealPart) < kMarginalBand)
        r.classification = Stability::marginal;
    else
        r.classification = r.maxEigRealPart < 0.0 ? Stability::stable : Stability::unstable;
    return r;
}

std::vector<StabilityRecord> stability_map(const std::vector<double>& zetaGrid,
                                           const std::vector<double>& gGrid,
                                           const std::vector<double>& epsilons, double gamma,
                                           double detuning, unsigned workers)
{
    const std::size_t nz = zetaGrid.size();
    const std::size_t ng = gGrid.size();
    std::vector<StabilityRecord> out(epsilons.size() * ng * nz);
    parallel_for(out.size(), worker_count(workers), [&](std::size_t idx) {
        DimensionlessParams p;
        p.epsilon = epsilons[idx / (ng * nz)];
        p.gEff = gGrid[(idx / nz) % ng];
        p.ptStrength = zetaGrid[idx % nz];
        p.ptRate = gamma;
        p.detuningAlpha = detuning;
        try {
            out[idx] = jacobian_max_eig(p);
        } catch (const std::exception& e) {
            StabilityRecord& r = out[idx];
            r.g = p.gEff;
            r.epsilon = p.epsilon;
            r.zeta = p.ptStrength;
            r.gamma = gamma;
            r.detuning = detuning;
            r.maxEigRealPart = std::numeric_limits<double>::quiet_NaN();
            r.error = e.what();
        }
    });
    return out;
}

LinearizedPerturbation::LinearizedPerturbation(const DimensionlessParams& p, double rho)
{
    c_.omega = harmonic_frequency(p.gEff);
    c_.gamma = p.ptRate;
    c_.zeta = p.ptStrength;
    c_.rho = rho;
    const double w2 = 2.0 * p.gEff * p.gEff * std::sqrt(1.0 / p.gEff - 1.0);
    c_.lambda = c_.gamma * (1.0 - w2 * c_.zeta);
    // Equality up to rounding in ω̃²: the closed forms stay finite either way.
    c_.degenerate = std::abs(1.0 - w2 * c_.zeta) <= 1e-12;
    if (c_.degenerate)
        c_.lambda = 0.0;
    c_.largeGamma = c_.gamma > 0.01;
    const double denom = w2 + c_.lambda * c_.lambda;
    c_.E = c_.zeta * w2 / (4.0 * denom);
    c_.K = rho * w2 * c_.gamma * c_.zeta / denom;
}

Perturbation LinearizedPerturbation::zeroth(double tau) const
{
    const double w = c_.omega;
    return {c_.rho * std::sin(w * tau), c_.rho * w * std::cos(w * tau), 0.0};
}

Perturbation LinearizedPerturbation::first(double tau) const
{
    const double w = c_.omega;
    const double sn = std::sin(w * tau);
    const double cs = std::cos(w * tau);
    const double rgE = c_.rho * c_.gamma * c_.E;
    Perturbation s;
    s.dx = c_.rho * sn + rgE * (c_.C_plus(tau) * cs - c_.D_minus(tau) * sn);
    s.dp = c_.rho * w * cs + rgE * w * (c_.D_plus(tau) * cs + c_.C_minus(tau) * sn);
    s.dz = c_.K * (c_.lambda * sn - w * cs);
    return s;
}

Perturbation LinearizedPerturbation::rhs(const Perturbation& s) const
{
    const double w2 = c_.omega * c_.omega;
    return {s.dp, -w2 * (s.dx + s.dz), c_.gamma * c_.zeta * w2 * s.dx - c_.lambda * s.dz};
}

Perturbation LinearizedPerturbation::residual(double tau) const
{
    // Derivative of first() by a centred difference would add truncation
    // error; differentiate the closed form instead.
    const double w = c_.omega;
    const double sn = std::sin(w * tau);
    const double cs = std::cos(w * tau);
    const double rgE = c_.rho * c_.gamma * c_.E;
    const double l = c_.lambda;
    const double w2 = w * w;

    Perturbation d;
    d.dx = c_.rho * w * cs
         + rgE * (2.0 * w * l * cs - c_.C_plus(tau) * w * sn + 2.0 * w2 * sn - c_.D_minus(tau) * w * cs);
    d.dp = -c_.rho * w2 * sn
         + rgE * w * (2.0 * w2 * cs - c_.D_plus(tau) * w * sn - 2.0 * w * l * sn + c_.C_minus(tau) * w * cs);
    d.dz = c_.K * (l * w * cs + w2 * sn);

    const Perturbation f = rhs(first(tau));
    return {d.dx - f.dx, d.dp - f.dp, d.dz - f.dz};
}

double LinearizedPerturbation::energy(const Perturbation& s) const
{
    const double w2 = c_.omega * c_.omega;
    const double u = s.dx + s.dz;
    return 0.5 * s.dp * s.dp + 0.5 * w2 * u * u;
}

double photothermal_heating_per_period(double g, double rho, double zeta, double gamma)
{
    return 2.0 * (1.0 - g) * g * g * g * rho * rho * zeta * gamma;
}

double simulated_linear_heating_rate(const DimensionlessParams& p, double rho, double periods)
{
    const LinearizedPerturbation lin(p, rho);
    const double T = periods * 2.0 * std::numbers::pi / lin.constants().omega;
    const Perturbation s0 = lin.first(0.0);

    auto rhs = [&lin](double, const ode::Vec<3>& y, ode::Vec<3>& dy) {
        const Perturbation d = lin.rhs({y[0], y[1], y[2]});
        dy = {d.dx, d.dp, d.dz};
    };
    ode::Options o;
    o.relTol = 1e-13;
    o.absTol = 1e-16;
    const auto r = ode::integrate<3>(rhs, 0.0, ode::Vec<3>{s0.dx, s0.dp, s0.dz}, T, o,
                                     [](const ode::Segment<3>&) { return true; });
    if (r.status != ode::Status::completed)
        throw ConvergenceError("linearized photothermal integration failed");
    const double e0 = lin.energy(s0);
    const double e1 = lin.energy({r.y[0], r.y[1], r.y[2]});
    return (e1 - e0) / T;
}

PhotothermalState photothermal_perturbed(const DimensionlessParams& p, double rho)
{
    const PhotothermalSteadyState ss = photothermal_steady_states(p);
    PhotothermalState s;
    s.x = ss.stable + rho;
    s.z = ss.z;
    s.alpha = adiabatic_field(p.detuningAlpha + s.x + s.z);
    return s;
}

RunSummary integrate_photothermal(const PhotothermalState& init, const DimensionlessParams& p,
                                  const IntegratorOptions& o, const SampleSink& sink)
{
    require_photothermal(p);
    const double g = p.gEff;
    const double da = p.detuningAlpha;
    const double zeta = p.ptStrength;
    const double gamma = p.ptRate;
    const double invEps = 1.0 / p.epsilon;

    auto rhs = [=](double, const ode::Vec<5>& y, ode::Vec<5>& dy) {
        const double chi = da + y[0] + y[2];
        const double intensity = y[3] * y[3] + y[4] * y[4];
        dy[0] = y[1];
        dy[1] = -g + intensity;
        dy[2] = -gamma * (y[2] + zeta * intensity);
        dy[3] = (-chi * y[4] - y[3] + 1.0) * invEps;
        dy[4] = (chi * y[3] - y[4]) * invEps;
    };
    auto make = [&p](double t, const ode::Vec<5>& y) {
        Sample s;
        s.tau = t;
        s.x = y[0];
        s.p = y[1];
        s.z = y[2];
        s.alpha = std::complex<double>(y[3], y[4]);
        PhotothermalState st{t, y[0], y[1], y[2], *s.alpha};
        s.energy = photothermal_energy(st, p);
        const double chi = p.detuningAlpha + y[0] + y[2];
        s.heatingRate = y[1] * (y[3] * y[3] + y[4] * y[4] - adiabatic_intensity(chi));
        return s;
    };
    const double threshold = o.escapeThreshold;
    const bool levitating = g > 0.0 && g <= 1.0;
    const double sigma = levitating ? std::sqrt(1.0 / g - 1.0) : 0.0;
    const double centre = init.x; // escape measured relative to the start as well
    auto escaped = [=](double, const ode::Vec<5>& y) {
        if (std::abs(y[0] - centre) > threshold)
            return true;
        return levitating && da + y[0] + y[2] < -sigma - 0.5 && y[1] < 0.0;
    };
    const ode::Vec<5> y0{init.x, init.p, init.z, init.alpha.real(), init.alpha.imag()};
    return detail::run_model<5>(rhs, init.tau, y0, o, make, escaped, sink);
}

} // namespace levcav
