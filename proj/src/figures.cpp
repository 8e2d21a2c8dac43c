#include "levcav/figures.h"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "levcav/dynamics.h"
#include "levcav/error.h"
#include "levcav/numerics.h"
#include "levcav/photothermal.h"
#include "levcav/potential.h"
#include "levcav/twolaser.h"

namespace levcav {

namespace {

DimensionlessParams single(double g, double eps, double da)
{
    DimensionlessParams p;
    p.gEff = g;
    p.epsilon = eps;
    p.detuningAlpha = da;
    return p;
}

DimensionlessParams two_laser(double g, double b, double d, double eps)
{
    DimensionlessParams p = single(g, eps, 0.0);
    p.amplitudeRatio = b;
    p.detuningDiff = d;
    return p;
}

DimensionlessParams photothermal(double g, double eps, double zeta, double gamma)
{
    DimensionlessParams p = single(g, eps, 0.0);
    p.ptStrength = zeta;
    p.ptRate = gamma;
    return p;
}

std::vector<FigureSpec> build_registry()
{
    return {
        {"fig2a", "potential slices for g = 0.1 ... 0.9 with equilibria", single(0.5, 0.01, 0.0), 0, 0, 0},
        {"fig2b", "potential surface over g and x", single(0.5, 0.01, 0.0), 0, 0, 0},
        {"fig2c", "oscillation frequency over g and amplitude", single(0.5, 0.01, 0.0), 0, 0, 0},
        {"fig3a", "full vs first-order trajectory, eps = 1/100", single(0.5, 0.01, 0.0), 0.01, 4000.0, 0.5},
        {"fig3b", "full heating rate vs first-order formula, eps = 1/100", single(0.5, 0.01, 0.0), 0.01, 4000.0, 0.1},
        {"fig3c", "full vs first-order trajectory, eps = 1/10", single(0.5, 0.1, 0.0), 0.01, 1000.0, 0.1},
        {"fig4a", "full trajectory in the potential, eps = 1/5", single(0.5, 0.2, 0.0), 0.1, 400.0, 0.05},
        {"fig4b", "phase-space collapse onto the adiabatic manifold, eps = 1/5", single(0.5, 0.2, 0.0), 0.1, 400.0, 0.05},
        {"fig5a", "two-laser potential, heating coefficient and trap region", two_laser(0.37, 0.47, -2.63, 0.2), 0, 0, 0},
        {"fig5b", "sweep manifold coloured by width", two_laser(0.37, 0.47, -2.63, 0.2), 0, 0, 0},
        {"fig5c", "sweep manifold coloured by area", two_laser(0.37, 0.47, -2.63, 0.2), 0, 0, 0},
        {"fig6", "maximum Jacobian eigenvalue over zeta and g for several eps", photothermal(0.5, 0.01, 0.0, 1e-4), 0, 0, 0},
        {"fig7a", "photothermal trajectory in (x, p, z)", photothermal(0.5, 0.01, -30.0, 3e-4), 0.1, 20000.0, 1.0},
        {"fig7b", "photothermal x and z with candidate centre lines", photothermal(0.5, 0.01, -30.0, 3e-4), 0.1, 20000.0, 1.0},
    };
}

csv::Table potential_slices(const std::vector<double>& gs, const std::vector<double>& xs)
{
    csv::Table t;
    t.header = {"g", "x", "potential", "x_stable", "x_unstable"};
    for (double g : gs) {
        DimensionlessParams p = single(g, 0.01, 0.0);
        const Equilibria e = equilibria(p);
        for (double x : xs)
            t.rows.push_back({csv::number(g), csv::number(x), csv::number(potential(x, p)),
                              csv::number(e.stable), csv::number(e.unstable)});
    }
    return t;
}

csv::Table compare_fidelities(const FigureSpec& f)
{
    IntegratorOptions o;
    o.horizon = f.horizon;
    o.outputStride = f.stride;
    const SingleLaserState init = perturbed_equilibrium(f.params, f.perturbation);

    csv::Table t;
    t.header = {"fidelity", "tau", "x", "p", "energy", "heating_rate", "termination"};
    for (Fidelity fid : {Fidelity::full, Fidelity::firstOrder}) {
        const Trajectory tr = integrate(fid, init, f.params, o);
        for (std::size_t i = 0; i < tr.samples.size(); ++i) {
            const Sample& s = tr.samples[i];
            t.rows.push_back({to_string(fid), csv::number(s.tau), csv::number(s.x), csv::number(s.p),
                              csv::number(s.energy), csv::number(s.heatingRate),
                              i + 1 == tr.samples.size() ? to_string(tr.termination) : ""});
        }
    }
    return t;
}

csv::Table heating_comparison(const FigureSpec& f)
{
    IntegratorOptions o;
    o.horizon = f.horizon;
    o.outputStride = f.stride;
    const Trajectory tr = integrate(Fidelity::full, perturbed_equilibrium(f.params, f.perturbation), f.params, o);
    csv::Table t;
    t.header = {"tau", "heating_full", "heating_first_order"};
    for (const Sample& s : tr.samples) {
        const SingleLaserState st{s.tau, s.x, s.p, {}};
        t.rows.push_back({csv::number(s.tau), csv::number(s.heatingRate), csv::number(heating_rate(st, f.params))});
    }
    return t;
}

csv::Table manifold_trajectory(const FigureSpec& f)
{
    IntegratorOptions o;
    o.horizon = f.horizon;
    o.outputStride = f.stride;
    SingleLaserState init = perturbed_equilibrium(f.params, f.perturbation);
    init.alpha = 0.0; // start off the manifold to show the collapse
    const Trajectory tr = integrate(Fidelity::full, init, f.params, o);
    csv::Table t;
    t.header = {"tau", "x", "p", "alpha2", "manifold", "potential", "energy"};
    for (const Sample& s : tr.samples) {
        t.rows.push_back({csv::number(s.tau), csv::number(s.x), csv::number(s.p), csv::number(std::norm(*s.alpha)),
                          csv::number(adiabatic_intensity(s.x + f.params.detuningAlpha)),
                          csv::number(potential(s.x, f.params)), csv::number(s.energy)});
    }
    return t;
}

csv::Table two_laser_profile(const FigureSpec& f)
{
    const auto region = find_trap_region(f.params);
    csv::Table t;
    t.header = {"chi", "potential", "heating_coefficient", "in_trap"};
    for (double chi : numerics::linspace(-8.0, 8.0, 1601)) {
        bool inside = false;
        if (region)
            inside = std::abs(chi - region->chiMin) <= 0.5 * region->width;
        t.rows.push_back({csv::number(chi), csv::number(two_laser_potential(chi, f.params)),
                          csv::number(two_laser_heating_coefficient(chi, f.params)), inside ? "1" : "0"});
    }
    return t;
}

csv::Table sweep_manifold(const FigureInputs& in, const char* column)
{
    if (in.sweepPath.empty() || !std::filesystem::exists(in.sweepPath))
        throw MissingArtifact("this figure needs a completed sweep: run `levcav sweep --out sweep.csv` and pass "
                              "`--sweep sweep.csv`");
    const auto records = csv::parse_sweep(csv::read_file(in.sweepPath));
    csv::Table t;
    t.header = {"g", "B", "dba", column};
    const bool width = std::string(column) == "width";
    for (const SweepRecord& r : records) {
        if (!r.trap)
            continue;
        t.rows.push_back({csv::number(r.g), csv::number(r.b), csv::number(r.dba),
                          csv::number(width ? r.trap->width : r.trap->area)});
    }
    return t;
}

csv::Table photothermal_trajectory(const FigureSpec& f, bool lines)
{
    IntegratorOptions o;
    o.horizon = f.horizon;
    o.outputStride = f.stride;
    o.relTol = 1e-10;
    o.absTol = 1e-12;
    const PhotothermalState init = photothermal_perturbed(f.params, f.perturbation);
    const double sigma = well_sigma(f.params.gEff);
    const double da = f.params.detuningAlpha;
    const double zeta = f.params.ptStrength;

    csv::Table t;
    t.header = lines ? std::vector<std::string>{"tau", "x", "z", "line_zeta_z", "line_minus_z"}
                     : std::vector<std::string>{"tau", "x", "p", "z", "energy"};
    integrate_photothermal(init, f.params, o, [&](const Sample& s) {
        if (lines)
            t.rows.push_back({csv::number(s.tau), csv::number(s.x), csv::number(*s.z),
                              csv::number(-da + zeta * *s.z + sigma), csv::number(-da - *s.z + sigma)});
        else
            t.rows.push_back({csv::number(s.tau), csv::number(s.x), csv::number(s.p), csv::number(*s.z),
                              csv::number(s.energy)});
        return true;
    });
    return t;
}

} // namespace

const std::vector<FigureSpec>& figure_registry()
{
    static const std::vector<FigureSpec> registry = build_registry();
    return registry;
}

const FigureSpec& figure_spec(const std::string& id)
{
    for (const FigureSpec& f : figure_registry())
        if (f.id == id)
            return f;
    throw InvalidParameters("figure", "unknown figure id '" + id + "'");
}

csv::Table emit_figure(const std::string& id, const FigureInputs& in)
{
    const FigureSpec& f = figure_spec(id);
    if (id == "fig2a")
        return potential_slices(numerics::linspace(0.1, 0.9, 9), numerics::linspace(-6.0, 6.0, 601));
    if (id == "fig2b")
        return potential_slices(numerics::linspace(0.02, 0.98, 49), numerics::linspace(-6.0, 6.0, 241));
    if (id == "fig2c") {
        std::vector<double> amps;
        for (int k = 1; k <= 100; ++k)
            amps.push_back(0.03 * k);
        return csv::frequency_table(frequency_map(numerics::linspace(0.02, 0.98, 100), amps, in.workers));
    }
    if (id == "fig3a" || id == "fig3c")
        return compare_fidelities(f);
    if (id == "fig3b")
        return heating_comparison(f);
    if (id == "fig4a" || id == "fig4b")
        return manifold_trajectory(f);
    if (id == "fig5a")
        return two_laser_profile(f);
    if (id == "fig5b")
        return sweep_manifold(in, "width");
    if (id == "fig5c")
        return sweep_manifold(in, "area");
    if (id == "fig6") {
        // ±10^k for k = -1 ... 5 in quarter decades, plus zero: the eigenvalues
        // only reach order one for |ζ̃| near 1e5.
        std::vector<double> zetas{0.0};
        for (int k = -4; k <= 20; ++k) {
            zetas.push_back(std::pow(10.0, 0.25 * k));
            zetas.push_back(-std::pow(10.0, 0.25 * k));
        }
        std::sort(zetas.begin(), zetas.end());
        return csv::stability_table(stability_map(zetas,
                                                  numerics::linspace(0.05, 0.95, 19), {0.1, 0.01, 0.001},
                                                  f.params.ptRate, 0.0, in.workers));
    }
    if (id == "fig7a")
        return photothermal_trajectory(f, false);
    return photothermal_trajectory(f, true); // fig7b
}

} // namespace levcav
