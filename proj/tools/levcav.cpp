// levcav: command-line front end for the levitated-cavity toolkit.
//
// Every subcommand prints a JSON run summary on stdout. Data artifacts go to
// --out as CSV (default) or JSON. Exit codes: 0 ok, 2 config/usage error,
// 3 numeric failure or missing artifact.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "levcav/csv.h"
#include "levcav/dynamics.h"
#include "levcav/error.h"
#include "levcav/figures.h"
#include "levcav/model.h"
#include "levcav/numerics.h"
#include "levcav/parallel.h"
#include "levcav/photothermal.h"
#include "levcav/potential.h"
#include "levcav/twolaser.h"

using json = nlohmann::ordered_json;
using namespace levcav;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Parameter (de)serialization

json optional_number(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

json physical_json(const PhysicalParams& p)
{
    json j;
    j["mass"] = p.mass;
    j["gravity"] = p.gravity;
    j["cavityLength"] = p.cavityLength;
    j["wavelength"] = optional_number(p.wavelength);
    j["cavityFrequency"] = optional_number(p.cavityFrequency);
    j["finesse"] = optional_number(p.finesse);
    j["linewidth"] = optional_number(p.linewidth);
    j["inputCoupling"] = p.inputCoupling;
    j["powerAlpha"] = p.powerAlpha;
    j["detuningAlpha"] = p.detuningAlpha;
    j["powerBeta"] = optional_number(p.powerBeta);
    j["detuningBeta"] = optional_number(p.detuningBeta);
    j["photothermalStrength"] = optional_number(p.photothermalStrength);
    j["photothermalRate"] = optional_number(p.photothermalRate);
    return j;
}

double number_field(const json& j, const std::string& key)
{
    if (!j.is_number())
        throw InvalidParameters(key, "must be a number");
    return j.get<double>();
}

PhysicalParams physical_from_json(const json& j)
{
    if (!j.is_object())
        throw ConfigError("physical parameters must be a JSON object");
    PhysicalParams p;
    for (const auto& [key, v] : j.items()) {
        auto opt = [&](std::optional<double>& dst) {
            if (!v.is_null())
                dst = number_field(v, key);
        };
        if (key == "mass")
            p.mass = number_field(v, key);
        else if (key == "gravity")
            p.gravity = number_field(v, key);
        else if (key == "cavityLength")
            p.cavityLength = number_field(v, key);
        else if (key == "wavelength")
            opt(p.wavelength);
        else if (key == "cavityFrequency")
            opt(p.cavityFrequency);
        else if (key == "finesse")
            opt(p.finesse);
        else if (key == "linewidth")
            opt(p.linewidth);
        else if (key == "inputCoupling")
            p.inputCoupling = number_field(v, key);
        else if (key == "powerAlpha")
            p.powerAlpha = number_field(v, key);
        else if (key == "detuningAlpha")
            p.detuningAlpha = number_field(v, key);
        else if (key == "powerBeta")
            opt(p.powerBeta);
        else if (key == "detuningBeta")
            opt(p.detuningBeta);
        else if (key == "photothermalStrength")
            opt(p.photothermalStrength);
        else if (key == "photothermalRate")
            opt(p.photothermalRate);
        else
            throw InvalidParameters(key, "unknown physical parameter");
    }
    p.validate();
    return p;
}

json dimensionless_json(const DimensionlessParams& p)
{
    json j;
    j["g"] = p.gEff;
    j["eps"] = p.epsilon;
    j["da"] = p.detuningAlpha;
    j["s"] = p.scanSpeed;
    j["B"] = p.amplitudeRatio;
    j["dba"] = p.detuningDiff;
    j["zeta"] = p.ptStrength;
    j["gamma"] = p.ptRate;
    return j;
}

void set_dimensionless(DimensionlessParams& p, const std::string& key, double v)
{
    if (key == "g")
        p.gEff = v;
    else if (key == "eps")
        p.epsilon = v;
    else if (key == "da")
        p.detuningAlpha = v;
    else if (key == "s")
        p.scanSpeed = v;
    else if (key == "B")
        p.amplitudeRatio = v;
    else if (key == "dba")
        p.detuningDiff = v;
    else if (key == "zeta")
        p.ptStrength = v;
    else if (key == "gamma")
        p.ptRate = v;
    else
        throw InvalidParameters(key, "unknown dimensionless parameter (g, eps, da, s, B, dba, zeta, gamma)");
}

double parse_double(const std::string& s, const std::string& what)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size())
        throw InvalidParameters(what, "not a number: '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep))
        out.push_back(item);
    return out;
}

// "g=0.5,eps=0.01,da=0" on top of `base`.
void apply_dimensionless_spec(DimensionlessParams& p, const std::string& spec)
{
    for (const std::string& item : split(spec, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw InvalidParameters("dimensionless", "expected key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        set_dimensionless(p, key, parse_double(item.substr(eq + 1), key));
    }
}

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    int n = 0;
    std::vector<double> values() const { return numerics::linspace(lo, hi, static_cast<std::size_t>(n)); }
};

Range parse_range(const std::string& s, const std::string& what)
{
    const auto parts = split(s, ',');
    if (parts.size() != 3)
        throw InvalidParameters(what, "expected lo,hi,N");
    Range r{parse_double(parts[0], what), parse_double(parts[1], what),
            static_cast<int>(parse_double(parts[2], what))};
    if (r.n < 1)
        throw InvalidParameters(what, "N must be at least 1");
    return r;
}

json range_json(const Range& r)
{
    return json::array({r.lo, r.hi, r.n});
}

Range range_from_json(const json& j, const std::string& what)
{
    if (!j.is_array() || j.size() != 3)
        throw InvalidParameters(what, "expected [lo, hi, N]");
    Range r{number_field(j[0], what), number_field(j[1], what), static_cast<int>(number_field(j[2], what))};
    if (r.n < 1)
        throw InvalidParameters(what, "N must be at least 1");
    return r;
}

std::vector<double> parse_list(const std::string& s, const std::string& what)
{
    std::vector<double> out;
    for (const std::string& item : split(s, ','))
        out.push_back(parse_double(item, what));
    if (out.empty())
        throw InvalidParameters(what, "empty list");
    return out;
}

json integrator_json(const IntegratorOptions& o)
{
    json j;
    j["relTol"] = o.relTol;
    j["absTol"] = o.absTol;
    j["maxStep"] = std::isfinite(o.maxStep) ? json(o.maxStep) : json(nullptr);
    j["outputStride"] = o.outputStride;
    j["horizon"] = o.horizon;
    j["escapeThreshold"] = o.escapeThreshold;
    return j;
}

IntegratorOptions integrator_from_json(const json& j)
{
    IntegratorOptions o;
    if (!j.is_object())
        throw ConfigError("integrator must be a JSON object");
    for (const auto& [key, v] : j.items()) {
        if (key == "relTol")
            o.relTol = number_field(v, key);
        else if (key == "absTol")
            o.absTol = number_field(v, key);
        else if (key == "maxStep")
            o.maxStep = v.is_null() ? INFINITY : number_field(v, key);
        else if (key == "outputStride")
            o.outputStride = number_field(v, key);
        else if (key == "horizon")
            o.horizon = number_field(v, key);
        else if (key == "escapeThreshold")
            o.escapeThreshold = number_field(v, key);
        else
            throw InvalidParameters(key, "unknown integrator option");
    }
    return o;
}

// ---------------------------------------------------------------------------
// Run configuration: one parameter source plus subcommand settings.

struct RunConfig {
    std::optional<PhysicalParams> physical;
    DimensionlessParams params;
    json settings = json::object(); // everything except the parameter source
};

json read_json_file(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw ConfigError("cannot open config file " + path);
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
}

// A config is either a flat PhysicalParams object or a run config with a
// "physical" or "dimensionless" block plus subcommand settings, as echoed in
// the run summary.
RunConfig load_config(const std::string& path, const std::string& dimensionlessSpec)
{
    RunConfig rc;
    json src = json::object();
    if (!path.empty())
        src = read_json_file(path);
    if (!src.is_object())
        throw ConfigError("config must be a JSON object");

    const bool wrapped = src.contains("physical") || src.contains("dimensionless");
    if (wrapped) {
        if (src.contains("physical") && src.contains("dimensionless"))
            throw ConfigError("config must give exactly one of 'physical' and 'dimensionless'");
        for (const auto& [key, v] : src.items()) {
            if (key == "physical")
                rc.physical = physical_from_json(v);
            else if (key == "dimensionless") {
                if (!v.is_object())
                    throw ConfigError("'dimensionless' must be a JSON object");
                for (const auto& [k, x] : v.items())
                    set_dimensionless(rc.params, k, number_field(x, k));
            } else {
                rc.settings[key] = v;
            }
        }
    } else if (!src.empty()) {
        rc.physical = physical_from_json(src);
    }

    if (rc.physical)
        rc.params = dimensionless(*rc.physical);
    if (!dimensionlessSpec.empty()) {
        if (rc.physical)
            throw ConfigError("--dimensionless cannot be combined with a physical config");
        apply_dimensionless_spec(rc.params, dimensionlessSpec);
    }
    rc.params.validate();
    return rc;
}

json source_json(const RunConfig& rc)
{
    json j;
    if (rc.physical)
        j["physical"] = physical_json(*rc.physical);
    else
        j["dimensionless"] = dimensionless_json(rc.params);
    return j;
}

template <class T>
T setting(const RunConfig& rc, const std::string& key, T fallback)
{
    if (!rc.settings.contains(key))
        return fallback;
    try {
        return rc.settings.at(key).get<T>();
    } catch (const json::exception&) {
        throw InvalidParameters(key, "wrong type in config");
    }
}

// ---------------------------------------------------------------------------
// Output

std::string timestamp()
{
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

json table_json(const csv::Table& t)
{
    json rows = json::array();
    for (const auto& r : t.rows) {
        json row = json::array();
        for (const std::string& cell : r) {
            char* end = nullptr;
            const double v = cell.empty() ? 0.0 : std::strtod(cell.c_str(), &end);
            if (cell.empty())
                row.push_back(nullptr);
            else if (end == cell.c_str() + cell.size() && std::isfinite(v))
                row.push_back(v);
            else
                row.push_back(cell);
        }
        rows.push_back(std::move(row));
    }
    json j;
    j["columns"] = t.header;
    j["rows"] = std::move(rows);
    return j;
}

void write_artifact(const std::string& path, const std::string& format, const csv::Table& t)
{
    if (path.empty())
        return;
    if (format == "csv") {
        csv::write_file_atomic(path, t);
        return;
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            throw std::runtime_error("cannot open " + tmp + " for writing");
        os << table_json(t).dump(1) << '\n';
        if (!os)
            throw std::runtime_error("write to " + tmp + " failed");
    }
    std::filesystem::rename(tmp, path);
}

struct Output {
    std::string out;
    std::string format = "csv";
};

void add_output(CLI::App* cmd, Output& o)
{
    cmd->add_option("--out", o.out, "Artifact path (omit to only print the summary)");
    cmd->add_option("--format", o.format, "Artifact format")->check(CLI::IsMember({"csv", "json"}));
}

json output_json(const Output& o)
{
    json j;
    j["path"] = o.out.empty() ? json(nullptr) : json(o.out);
    j["format"] = o.format;
    return j;
}

// ---------------------------------------------------------------------------
// Subcommands

struct Common {
    std::string config;
    std::string dimensionless;
    unsigned workers = 0;
};

void add_source(CLI::App* cmd, Common& c)
{
    cmd->add_option("--config", c.config, "JSON config (physical parameters or a run config)");
    cmd->add_option("--dimensionless", c.dimensionless, "Direct parameters, e.g. g=0.5,eps=0.01,da=0");
}

json cmd_scales(const std::string& path)
{
    const json src = read_json_file(path);
    const PhysicalParams p = physical_from_json(src.contains("physical") ? src.at("physical") : src);
    const NaturalScales s = natural_scales(p);
    const DimensionlessParams d = dimensionless(p);
    json r;
    r["config"] = json{{"physical", physical_json(p)}};
    r["scales"] = {{"length", s.length},
                   {"frequency", s.frequency},
                   {"amplitude", s.amplitude},
                   {"opticalRate", s.opticalRate}};
    r["dimensionless"] = dimensionless_json(d);
    r["epsilon"] = d.epsilon;
    r["opticalSpringConstant"] = optical_spring_constant(p);
    r["levitationWarning"] = d.levitationWarning;
    return r;
}

struct SimulateArgs {
    std::string model;
    std::string fidelity;
    std::optional<double> perturb;
    std::optional<double> chi0;
    std::optional<double> horizon;
    std::optional<double> stride;
    std::optional<double> relTol;
    std::optional<double> absTol;
};

// Two-laser runs start near the first damped minimum, or the first minimum.
double two_laser_reference(const DimensionlessParams& p)
{
    std::optional<double> first;
    for (const CriticalPoint& c : two_laser_critical_points(p)) {
        if (!c.minimum)
            continue;
        if (two_laser_heating_coefficient(c.chi, p) < 0.0)
            return c.chi;
        if (!first)
            first = c.chi;
    }
    if (!first)
        throw DomainError("two-laser potential has no minimum for these parameters");
    return *first;
}

json cmd_simulate(const Common& c, const SimulateArgs& a, const Output& out)
{
    RunConfig rc = load_config(c.config, c.dimensionless);
    IntegratorOptions o = rc.settings.contains("integrator") ? integrator_from_json(rc.settings["integrator"])
                                                              : IntegratorOptions{};
    if (a.horizon)
        o.horizon = *a.horizon;
    if (a.stride)
        o.outputStride = *a.stride;
    if (a.relTol)
        o.relTol = *a.relTol;
    if (a.absTol)
        o.absTol = *a.absTol;
    o.validate();

    const std::string model = !a.model.empty() ? a.model : setting<std::string>(rc, "model", "single");
    const std::string fidName = !a.fidelity.empty() ? a.fidelity : setting<std::string>(rc, "fidelity", "full");
    const Fidelity fidelity = parse_fidelity(fidName);
    const double rho = a.perturb ? *a.perturb : setting<double>(rc, "perturb", 0.01);

    Trajectory tr;
    tr.model = model;
    tr.fidelity = fidelity;
    tr.params = rc.params;
    auto sink = [&tr](const Sample& s) {
        tr.samples.push_back(s);
        return true;
    };
    RunSummary sum;
    json initial;
    if (model == "single") {
        const SingleLaserState init = perturbed_equilibrium(rc.params, rho);
        sum = integrate_stream(fidelity, init, rc.params, o, sink);
        initial = {{"x", init.x}, {"p", init.p}};
    } else if (model == "two-laser" || model == "photothermal") {
        if (fidelity != Fidelity::full)
            throw InvalidParameters("fidelity", "the " + model + " model is integrated in full fidelity only");
        if (model == "two-laser") {
            const double chi0 = a.chi0 ? *a.chi0 : two_laser_reference(rc.params) + rho;
            const TwoLaserState init = two_laser_seed(chi0, 0.0, rc.params);
            sum = integrate_two_laser(init, rc.params, o, sink);
            initial = {{"chi", init.chi}, {"p", init.p}};
        } else {
            const PhotothermalState init = photothermal_perturbed(rc.params, rho);
            sum = integrate_photothermal(init, rc.params, o, sink);
            initial = {{"x", init.x}, {"p", init.p}, {"z", init.z}};
        }
    } else {
        throw InvalidParameters("model", "expected single, two-laser or photothermal");
    }
    tr.termination = sum.termination;
    tr.endTau = sum.endTau;
    tr.message = sum.message;
    write_artifact(out.out, out.format, csv::trajectory_table(tr));
    if (sum.termination == Termination::integratorFailure)
        throw ConvergenceError("integration failed: " + sum.message);

    json cfg = source_json(rc);
    cfg["model"] = model;
    cfg["fidelity"] = to_string(fidelity);
    cfg["perturb"] = rho;
    cfg["integrator"] = integrator_json(o);
    json r;
    r["config"] = cfg;
    r["initial"] = initial;
    r["termination"] = to_string(sum.termination);
    r["endTau"] = sum.endTau;
    r["samples"] = sum.samples;
    r["acceptedSteps"] = sum.acceptedSteps;
    r["rejectedSteps"] = sum.rejectedSteps;
    r["final"] = {{"tau", sum.last.tau}, {"x", sum.last.x}, {"p", sum.last.p}, {"energy", sum.last.energy}};
    r["output"] = output_json(out);
    return r;
}

json cmd_freq_map(const Common& c, const std::string& gRange, const std::string& aRange, const Output& out)
{
    RunConfig rc = load_config(c.config, c.dimensionless);
    const Range g = !gRange.empty() ? parse_range(gRange, "g-range")
                    : rc.settings.contains("gRange") ? range_from_json(rc.settings["gRange"], "gRange")
                                                      : Range{0.02, 0.98, 100};
    const Range amp = !aRange.empty() ? parse_range(aRange, "amp-range")
                      : rc.settings.contains("ampRange") ? range_from_json(rc.settings["ampRange"], "ampRange")
                                                          : Range{0.03, 3.0, 100};
    const auto cells = frequency_map(g.values(), amp.values(), c.workers);
    write_artifact(out.out, out.format, csv::frequency_table(cells));
    std::size_t feasible = 0;
    for (const FrequencyCell& cell : cells)
        feasible += cell.frequency.has_value();

    json cfg = source_json(rc);
    cfg["gRange"] = range_json(g);
    cfg["ampRange"] = range_json(amp);
    json r;
    r["config"] = cfg;
    r["cells"] = cells.size();
    r["feasibleCells"] = feasible;
    r["output"] = output_json(out);
    return r;
}

json cmd_scan(const Common& c, std::optional<double> speedFlag, const std::string& dirFlag,
              std::optional<double> stride, const Output& out)
{
    RunConfig rc = load_config(c.config, c.dimensionless);
    const double speed = speedFlag ? *speedFlag : setting<double>(rc, "scanSpeed", std::abs(rc.params.scanSpeed));
    const std::string dirName = !dirFlag.empty() ? dirFlag : setting<std::string>(rc, "direction", "down");
    if (dirName != "up" && dirName != "down")
        throw InvalidParameters("direction", "expected up or down");
    const ScanDirection dir = dirName == "up" ? ScanDirection::up : ScanDirection::down;
    ScanOptions so;
    so.outputStride = stride ? *stride : setting<double>(rc, "outputStride", 0.1);

    const ScanResult res = scan_simulate(rc.params.gEff, speed, dir, so);
    csv::Table t;
    t.header = {"tau", "x", "p", "detuning"};
    for (const ScanSample& s : res.samples)
        t.rows.push_back({csv::number(s.tau), csv::number(s.x), csv::number(s.p), csv::number(s.detuning)});
    write_artifact(out.out, out.format, t);

    json cfg = source_json(rc);
    cfg["scanSpeed"] = speed;
    cfg["direction"] = dirName;
    cfg["outputStride"] = so.outputStride;
    json r;
    r["config"] = cfg;
    r["outcome"] = to_string(res.outcome);
    r["criticalScanSpeed"] = critical_scan_speed(rc.params.gEff);
    r["initialDetuning"] = res.initialDetuning;
    r["horizon"] = res.horizon;
    r["leftStand"] = res.leftStand;
    r["samples"] = res.samples.size();
    r["output"] = output_json(out);
    return r;
}

json cmd_sweep(const Common& c, const std::string& gridFlag, std::optional<double> epsFlag,
               const std::string& checkpoint, const Output& out)
{
    RunConfig rc = load_config(c.config, c.dimensionless);
    SweepGrid grid;
    if (rc.settings.contains("grid")) {
        const json& g = rc.settings["grid"];
        if (!g.is_object())
            throw ConfigError("grid must be an object with g, B and dba ranges");
        for (const auto& [key, v] : g.items()) {
            const Range r = range_from_json(v, "grid." + key);
            const SweepAxis axis{r.lo, r.hi, r.n};
            if (key == "g")
                grid.g = axis;
            else if (key == "B")
                grid.b = axis;
            else if (key == "dba")
                grid.d = axis;
            else
                throw InvalidParameters("grid." + key, "unknown axis (g, B, dba)");
        }
    }
    if (!gridFlag.empty()) {
        const auto parts = split(gridFlag, ',');
        if (parts.size() != 3)
            throw InvalidParameters("grid", "expected gN,bN,dN");
        grid.g.n = static_cast<int>(parse_double(parts[0], "grid"));
        grid.b.n = static_cast<int>(parse_double(parts[1], "grid"));
        grid.d.n = static_cast<int>(parse_double(parts[2], "grid"));
    }
    if (grid.g.n < 2 || grid.b.n < 2 || grid.d.n < 2)
        throw InvalidParameters("grid", "every axis needs at least 2 points");
    const double eps = epsFlag ? *epsFlag : setting<double>(rc, "epsilon", 0.2);

    SweepOptions so;
    so.workers = c.workers;
    so.checkpointDir = checkpoint;
    const auto recs = sweep(grid, eps, so);
    write_artifact(out.out, out.format, csv::sweep_table(recs));

    std::size_t found = 0;
    for (const SweepRecord& r : recs)
        found += r.trap.has_value();
    json cfg = source_json(rc);
    cfg["grid"] = {{"g", json::array({grid.g.lo, grid.g.hi, grid.g.n})},
                   {"B", json::array({grid.b.lo, grid.b.hi, grid.b.n})},
                   {"dba", json::array({grid.d.lo, grid.d.hi, grid.d.n})}};
    cfg["epsilon"] = eps;
    json r;
    r["config"] = cfg;
    r["points"] = recs.size();
    r["found"] = found;
    r["workers"] = worker_count(c.workers);
    r["checkpoint"] = checkpoint.empty() ? json(nullptr) : json(checkpoint);
    r["output"] = output_json(out);
    return r;
}

json cmd_stability(const Common& c, const std::string& zFlag, const std::string& gFlag, const std::string& eFlag,
                   std::optional<double> gammaFlag, const Output& out)
{
    RunConfig rc = load_config(c.config, c.dimensionless);
    const Range z = !zFlag.empty() ? parse_range(zFlag, "zeta-range")
                    : rc.settings.contains("zetaRange") ? range_from_json(rc.settings["zetaRange"], "zetaRange")
                                                         : Range{-40.0, 40.0, 81};
    const Range g = !gFlag.empty() ? parse_range(gFlag, "g-range")
                    : rc.settings.contains("gRange") ? range_from_json(rc.settings["gRange"], "gRange")
                                                      : Range{0.05, 0.95, 19};
    const std::vector<double> eps = !eFlag.empty() ? parse_list(eFlag, "epsilons")
                                                   : setting<std::vector<double>>(rc, "epsilons", {rc.params.epsilon});
    const double gamma = gammaFlag ? *gammaFlag : (rc.params.ptRate > 0.0 ? rc.params.ptRate : 1e-4);

    const auto recs = stability_map(z.values(), g.values(), eps, gamma, rc.params.detuningAlpha, c.workers);
    write_artifact(out.out, out.format, csv::stability_table(recs));
    std::size_t stable = 0, unstable = 0, failed = 0;
    for (const StabilityRecord& r : recs) {
        if (!r.error.empty())
            ++failed;
        else if (r.classification == Stability::stable)
            ++stable;
        else if (r.classification == Stability::unstable)
            ++unstable;
    }

    json cfg = source_json(rc);
    cfg["zetaRange"] = range_json(z);
    cfg["gRange"] = range_json(g);
    cfg["epsilons"] = eps;
    cfg["gamma"] = gamma;
    json r;
    r["config"] = cfg;
    r["cells"] = recs.size();
    r["stable"] = stable;
    r["unstable"] = unstable;
    r["failed"] = failed;
    r["output"] = output_json(out);
    return r;
}

json cmd_emit_figure(const std::string& id, const std::string& sweepPath, unsigned workers, const Output& out)
{
    const FigureSpec& spec = figure_spec(id);
    FigureInputs in;
    in.sweepPath = sweepPath;
    in.workers = workers;
    const csv::Table t = emit_figure(id, in);
    write_artifact(out.out, out.format, t);
    json r;
    r["figure"] = id;
    r["description"] = spec.description;
    r["params"] = dimensionless_json(spec.params);
    r["rows"] = t.rows.size();
    r["columns"] = t.header;
    r["output"] = output_json(out);
    return r;
}

int fail(const std::string& kind, const std::string& msg, int code)
{
    json j;
    j["status"] = "error";
    j["error"] = kind;
    j["message"] = msg;
    std::cout << j.dump(2) << std::endl;
    std::cerr << "levcav: " << msg << '\n';
    return code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Levitated-mirror Fabry-Perot cavity toolkit"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    Common common;
    Output out;

    std::string scalesPath;
    auto* scales = app.add_subcommand("scales", "Natural scales and dimensionless parameters of a physical config");
    scales->add_option("config", scalesPath, "Physical parameter JSON")->required();

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Integrate a trajectory");
    add_source(simulate, common);
    simulate->add_option("--model", sim.model, "single | two-laser | photothermal")
        ->check(CLI::IsMember({"single", "two-laser", "photothermal"}));
    simulate->add_option("--fidelity", sim.fidelity, "full | adiabatic | first-order")
        ->check(CLI::IsMember({"full", "adiabatic", "first-order"}));
    simulate->add_option("--perturb", sim.perturb, "Initial displacement from the well minimum");
    simulate->add_option("--chi0", sim.chi0, "Explicit initial chi for the two-laser model");
    simulate->add_option("--horizon", sim.horizon, "Dimensionless time span");
    simulate->add_option("--stride", sim.stride, "Output sample spacing");
    simulate->add_option("--rel-tol", sim.relTol, "Relative tolerance");
    simulate->add_option("--abs-tol", sim.absTol, "Absolute tolerance");
    add_output(simulate, out);

    std::string gRange, aRange;
    auto* freq = app.add_subcommand("freq-map", "Oscillation frequency over g and amplitude");
    add_source(freq, common);
    freq->add_option("--g-range", gRange, "lo,hi,N");
    freq->add_option("--amp-range", aRange, "lo,hi,N");
    freq->add_option("--workers", common.workers, "Worker threads (default LEVCAV_THREADS or all cores)");
    add_output(freq, out);

    std::optional<double> scanSpeed, scanStride;
    std::string direction;
    auto* scan = app.add_subcommand("scan", "Detuning scan with the mirror starting on a stand");
    add_source(scan, common);
    scan->add_option("--scan-speed", scanSpeed, "|s| of the detuning sweep");
    scan->add_option("--direction", direction, "up | down")->check(CLI::IsMember({"up", "down"}));
    scan->add_option("--stride", scanStride, "Output sample spacing");
    add_output(scan, out);

    std::string grid, checkpoint;
    std::optional<double> sweepEps;
    auto* sw = app.add_subcommand("sweep", "Two-laser trap search over a (g, B, dba) grid");
    add_source(sw, common);
    sw->add_option("--grid", grid, "gN,bN,dN");
    sw->add_option("--epsilon", sweepEps, "Adiabaticity parameter");
    sw->add_option("--checkpoint", checkpoint, "Directory for per-slice checkpoints");
    sw->add_option("--workers", common.workers, "Worker threads (default LEVCAV_THREADS or all cores)");
    add_output(sw, out);

    std::string zetaRange, stabG, epsilons;
    std::optional<double> gamma;
    auto* stab = app.add_subcommand("stability-map", "Photothermal Jacobian stability over (zeta, g, eps)");
    add_source(stab, common);
    stab->add_option("--zeta-range", zetaRange, "lo,hi,N");
    stab->add_option("--g-range", stabG, "lo,hi,N");
    stab->add_option("--epsilons", epsilons, "e1,e2,...");
    stab->add_option("--gamma", gamma, "Photothermal relaxation rate");
    stab->add_option("--workers", common.workers, "Worker threads (default LEVCAV_THREADS or all cores)");
    add_output(stab, out);

    std::string figId, sweepPath;
    auto* fig = app.add_subcommand("emit-figure", "Dataset behind one figure");
    fig->add_option("id", figId, "Figure id (fig2a ... fig7b)")->required();
    fig->add_option("--sweep", sweepPath, "Completed sweep CSV (fig5b, fig5c)");
    fig->add_option("--workers", common.workers, "Worker threads (default LEVCAV_THREADS or all cores)");
    add_output(fig, out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    const auto start = std::chrono::steady_clock::now();
    const std::string started = timestamp();
    try {
        json result;
        if (*scales)
            result = cmd_scales(scalesPath);
        else if (*simulate)
            result = cmd_simulate(common, sim, out);
        else if (*freq)
            result = cmd_freq_map(common, gRange, aRange, out);
        else if (*scan)
            result = cmd_scan(common, scanSpeed, direction, scanStride, out);
        else if (*sw)
            result = cmd_sweep(common, grid, sweepEps, checkpoint, out);
        else if (*stab)
            result = cmd_stability(common, zetaRange, stabG, epsilons, gamma, out);
        else
            result = cmd_emit_figure(figId, sweepPath, common.workers, out);

        json summary;
        summary["status"] = "ok";
        summary["command"] = app.get_subcommands().front()->get_name();
        for (auto& [k, v] : result.items())
            summary[k] = v;
        summary["startedAt"] = started;
        summary["elapsedSeconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << summary.dump(2) << std::endl;
        return 0;
    } catch (const InvalidParameters& e) {
        return fail("invalid-parameters", e.what(), kExitConfig);
    } catch (const ConfigError& e) {
        return fail("config", e.what(), kExitConfig);
    } catch (const DomainError& e) {
        return fail("domain", e.what(), kExitConfig);
    } catch (const MissingArtifact& e) {
        return fail("missing-artifact", e.what(), kExitNumeric);
    } catch (const ConvergenceError& e) {
        return fail("numeric", e.what(), kExitNumeric);
    } catch (const std::exception& e) {
        return fail("failure", e.what(), kExitNumeric);
    }
}
