#include "levcav/model.h"

#include <cmath>
#include <numbers>

#include "levcav/error.h"

namespace levcav {

namespace {

constexpr double kPairTolerance = 1e-6;

void require_positive(double v, const char* field)
{
    if (!(v > 0.0) || !std::isfinite(v))
        throw InvalidParameters(field, "must be finite and strictly positive");
}

void require_finite(double v, const char* field)
{
    if (!std::isfinite(v))
        throw InvalidParameters(field, "must be finite");
}

bool agree(double a, double b)
{
    return std::abs(a - b) <= kPairTolerance * std::max(std::abs(a), std::abs(b));
}

} // namespace

void PhysicalParams::validate() const
{
    require_positive(mass, "mass");
    require_positive(gravity, "gravity");
    require_positive(cavityLength, "cavityLength");
    require_positive(inputCoupling, "inputCoupling");
    require_positive(powerAlpha, "powerAlpha");
    require_positive(hbar, "hbar");
    require_positive(c, "c");
    require_finite(detuningAlpha, "detuningAlpha");

    if (!wavelength && !cavityFrequency)
        throw InvalidParameters("wavelength", "one of wavelength or cavityFrequency is required");
    if (wavelength)
        require_positive(*wavelength, "wavelength");
    if (cavityFrequency)
        require_positive(*cavityFrequency, "cavityFrequency");
    if (wavelength && cavityFrequency
        && !agree(2.0 * std::numbers::pi * c / *wavelength, *cavityFrequency))
        throw InvalidParameters("cavityFrequency", "inconsistent with wavelength");

    if (!finesse && !linewidth)
        throw InvalidParameters("finesse", "one of finesse or linewidth is required");
    if (finesse)
        require_positive(*finesse, "finesse");
    if (linewidth)
        require_positive(*linewidth, "linewidth");
    if (finesse && linewidth
        && !agree(std::numbers::pi * c / (cavityLength * *finesse), *linewidth))
        throw InvalidParameters("linewidth", "inconsistent with finesse");

    if (powerBeta) {
        if (!(*powerBeta >= 0.0))
            throw InvalidParameters("powerBeta", "must be non-negative");
        if (*powerBeta > powerAlpha)
            throw InvalidParameters("powerBeta", "must not exceed powerAlpha");
    }
    if (detuningBeta)
        require_finite(*detuningBeta, "detuningBeta");
    if (photothermalStrength)
        require_finite(*photothermalStrength, "photothermalStrength");
    if (photothermalRate && !(*photothermalRate >= 0.0))
        throw InvalidParameters("photothermalRate", "must be non-negative");
}

double PhysicalParams::omega0() const
{
    if (cavityFrequency)
        return *cavityFrequency;
    return 2.0 * std::numbers::pi * c / *wavelength;
}

double PhysicalParams::delta_omega() const
{
    if (linewidth)
        return *linewidth;
    return std::numbers::pi * c / (cavityLength * *finesse);
}

void DimensionlessParams::validate() const
{
    const double fields[] = {gEff, epsilon, detuningAlpha, scanSpeed,
                             amplitudeRatio, detuningDiff, ptStrength, ptRate};
    for (double f : fields)
        if (!std::isfinite(f))
            throw InvalidParameters("dimensionless", "all fields must be finite");
    if (!(epsilon > 0.0))
        throw InvalidParameters("epsilon", "must be strictly positive");
    if (amplitudeRatio < 0.0 || amplitudeRatio > 1.0)
        throw InvalidParameters("amplitudeRatio", "must lie in [0, 1]");
    if (ptRate < 0.0)
        throw InvalidParameters("ptRate", "must be non-negative");
}

NaturalScales natural_scales(const PhysicalParams& p)
{
    p.validate();
    NaturalScales s;
    s.opticalRate = 0.5 * p.delta_omega();
    const double coupling = p.coupling();
    s.length = s.opticalRate / coupling;
    s.amplitude = std::sqrt(p.inputCoupling * p.powerAlpha / (p.hbar * p.omega0())) / s.opticalRate;
    s.frequency = std::sqrt(p.hbar * coupling * s.amplitude * s.amplitude / (p.mass * s.length));

    if (!(s.length > 0.0) || !std::isfinite(s.length))
        throw InvalidParameters("cavityLength", "derived length scale is not positive");
    if (!(s.amplitude > 0.0) || !std::isfinite(s.amplitude))
        throw InvalidParameters("powerAlpha", "derived amplitude scale is not positive");
    if (!(s.frequency > 0.0) || !std::isfinite(s.frequency))
        throw InvalidParameters("mass", "derived frequency scale is not positive");
    return s;
}

DimensionlessParams dimensionless(const PhysicalParams& p)
{
    const NaturalScales s = natural_scales(p);
    const double half = s.opticalRate;

    DimensionlessParams d;
    d.gEff = p.mass * p.gravity * p.cavityLength * half * half / (p.inputCoupling * p.powerAlpha);
    d.epsilon = s.frequency / half;
    d.detuningAlpha = p.detuningAlpha / half;
    d.scanSpeed = 0.0;
    if (p.powerBeta) {
        d.amplitudeRatio = std::sqrt(*p.powerBeta / p.powerAlpha);
        d.detuningDiff = p.detuningBeta.value_or(0.0) / half - d.detuningAlpha;
    }
    if (p.photothermalStrength) {
        const double intracavityPower =
            p.hbar * p.omega0() * s.amplitude * s.amplitude / (2.0 * p.cavityLength / p.c);
        d.ptStrength = intracavityPower * *p.photothermalStrength / s.length;
    }
    if (p.photothermalRate)
        d.ptRate = *p.photothermalRate / s.frequency;

    const double bound = 1.0 + d.amplitudeRatio * d.amplitudeRatio;
    d.levitationWarning = !(d.gEff > 0.0 && d.gEff < bound);
    return d;
}

double optical_spring_constant(const PhysicalParams& p)
{
    const NaturalScales s = natural_scales(p);
    const double coupling = p.coupling();
    return p.hbar * coupling * coupling * s.amplitude * s.amplitude / p.delta_omega();
}

DimensionalState redimensionalize(const ReducedState& s, const NaturalScales& scales, double mass)
{
    DimensionalState d;
    d.t = s.tau / scales.frequency;
    d.x = s.x * scales.length;
    d.p = s.p * mass * scales.length * scales.frequency;
    if (s.alpha)
        d.alpha = *s.alpha * scales.amplitude;
    if (s.z)
        d.z = *s.z * scales.length;
    return d;
}

ReducedState nondimensionalize(const DimensionalState& s, const NaturalScales& scales, double mass)
{
    ReducedState r;
    r.tau = s.t * scales.frequency;
    r.x = s.x / scales.length;
    r.p = s.p / (mass * scales.length * scales.frequency);
    if (s.alpha)
        r.alpha = *s.alpha / scales.amplitude;
    if (s.z)
        r.z = *s.z / scales.length;
    return r;
}

} // namespace levcav
