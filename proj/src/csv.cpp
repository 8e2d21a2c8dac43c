#include "levcav/csv.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace levcav::csv {

std::string number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string number(const std::optional<double>& v)
{
    return v ? number(*v) : std::string();
}

void write(std::ostream& os, const Table& t)
{
    auto line = [&os](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                os << ',';
            os << cells[i];
        }
        os << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows)
        line(r);
}

namespace {

std::vector<std::string> split(const std::string& s)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(s);
    while (std::getline(is, cell, ','))
        out.push_back(cell);
    if (!s.empty() && s.back() == ',')
        out.emplace_back();
    return out;
}

double to_double(const std::string& s)
{
    if (s == "nan")
        return std::nan("");
    if (s == "inf")
        return INFINITY;
    if (s == "-inf")
        return -INFINITY;
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::runtime_error("malformed number '" + s + "'");
    return v;
}

} // namespace

Table read(std::istream& is)
{
    Table t;
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error("empty CSV");
    t.header = split(line);
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        auto row = split(line);
        if (row.size() != t.header.size())
            throw std::runtime_error("CSV row has " + std::to_string(row.size()) + " cells, header has "
                                     + std::to_string(t.header.size()));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table trajectory_table(const Trajectory& tr)
{
    const bool hasBeta = !tr.samples.empty() && tr.samples.front().beta.has_value();
    const bool hasZ = !tr.samples.empty() && tr.samples.front().z.has_value();

    Table t;
    t.header = {"tau", "x", "p", "re_alpha", "im_alpha", "alpha2"};
    if (hasBeta)
        t.header.insert(t.header.end(), {"re_beta", "im_beta", "beta2"});
    if (hasZ)
        t.header.push_back("z");
    t.header.insert(t.header.end(), {"energy", "heating_rate", "termination"});

    t.rows.reserve(tr.samples.size());
    for (std::size_t i = 0; i < tr.samples.size(); ++i) {
        const Sample& s = tr.samples[i];
        std::vector<std::string> r{number(s.tau), number(s.x), number(s.p)};
        auto complexCells = [&r](const std::optional<std::complex<double>>& c) {
            if (c) {
                r.push_back(number(c->real()));
                r.push_back(number(c->imag()));
                r.push_back(number(std::norm(*c)));
            } else {
                r.insert(r.end(), 3, std::string());
            }
        };
        complexCells(s.alpha);
        if (hasBeta)
            complexCells(s.beta);
        if (hasZ)
            r.push_back(number(s.z));
        r.push_back(number(s.energy));
        r.push_back(number(s.heatingRate));
        r.push_back(i + 1 == tr.samples.size() ? to_string(tr.termination) : "");
        t.rows.push_back(std::move(r));
    }
    return t;
}

Table sweep_table(const std::vector<SweepRecord>& records)
{
    Table t;
    t.header = {"g", "B", "dba", "epsilon", "found", "chi_min", "width", "depth", "area"};
    for (const SweepRecord& r : records) {
        std::vector<std::string> row{number(r.g), number(r.b), number(r.dba), number(r.epsilon),
                                     r.trap ? "1" : "0"};
        if (r.trap) {
            row.insert(row.end(), {number(r.trap->chiMin), number(r.trap->width), number(r.trap->depth),
                                   number(r.trap->area)});
        } else {
            row.insert(row.end(), 4, std::string());
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::vector<SweepRecord> parse_sweep(const Table& t)
{
    const std::vector<std::string> expected{"g", "B", "dba", "epsilon", "found", "chi_min", "width", "depth", "area"};
    if (t.header != expected)
        throw std::runtime_error("not a sweep table: unexpected header");
    std::vector<SweepRecord> out;
    out.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        SweepRecord r;
        r.g = to_double(row[0]);
        r.b = to_double(row[1]);
        r.dba = to_double(row[2]);
        r.epsilon = to_double(row[3]);
        if (row[4] == "1") {
            TrapRegion tr;
            tr.chiMin = to_double(row[5]);
            tr.width = to_double(row[6]);
            tr.depth = to_double(row[7]);
            tr.area = to_double(row[8]);
            r.trap = tr;
        } else if (row[4] != "0") {
            throw std::runtime_error("sweep table: found must be 0 or 1");
        }
        out.push_back(r);
    }
    return out;
}

Table frequency_table(const std::vector<FrequencyCell>& cells)
{
    Table t;
    t.header = {"g", "amplitude", "frequency"};
    for (const FrequencyCell& c : cells)
        t.rows.push_back({number(c.g), number(c.amplitude), number(c.frequency)});
    return t;
}

Table stability_table(const std::vector<StabilityRecord>& records)
{
    Table t;
    t.header = {"g", "zeta", "epsilon", "gamma", "max_eig_real", "class"};
    for (const StabilityRecord& r : records) {
        t.rows.push_back({number(r.g), number(r.zeta), number(r.epsilon), number(r.gamma),
                          r.error.empty() ? number(r.maxEigRealPart) : std::string(),
                          r.error.empty() ? to_string(r.classification) : "error"});
    }
    return t;
}

void write_file_atomic(const std::string& path, const Table& t)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            throw std::runtime_error("cannot open " + tmp + " for writing");
        write(os, t);
        os.flush();
        if (!os)
            throw std::runtime_error("write to " + tmp + " failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw std::runtime_error("cannot move " + tmp + " to " + path + ": " + ec.message());
}

Table read_file(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open " + path);
    return read(is);
}

} // namespace levcav::csv
