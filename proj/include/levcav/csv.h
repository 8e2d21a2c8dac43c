#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "levcav/dynamics.h"
#include "levcav/photothermal.h"
#include "levcav/potential.h"
#include "levcav/twolaser.h"

namespace levcav::csv {

/// Shortest-free fixed format: 17 significant digits, locale independent.
std::string number(double v);
std::string number(const std::optional<double>& v); // empty when absent

/// A plain table: header plus rows of already formatted cells.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

void write(std::ostream& os, const Table& t);
Table read(std::istream& is);

/// tau,x,p,re_alpha,im_alpha,alpha2,[re_beta,im_beta,beta2,][z,]energy,heating_rate,termination
/// The termination reason is written on the last row only.
Table trajectory_table(const Trajectory& t);

/// g,B,dba,epsilon,found,chi_min,width,depth,area
Table sweep_table(const std::vector<SweepRecord>& records);
std::vector<SweepRecord> parse_sweep(const Table& t);

/// g,amplitude,frequency
Table frequency_table(const std::vector<FrequencyCell>& cells);

/// g,zeta,epsilon,gamma,max_eig_real,class
Table stability_table(const std::vector<StabilityRecord>& records);

/// Writes through a temporary file and renames it into place.
void write_file_atomic(const std::string& path, const Table& t);
Table read_file(const std::string& path);

} // namespace levcav::csv
