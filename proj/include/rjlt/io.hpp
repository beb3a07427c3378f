#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rjlt/types.hpp"

namespace rjlt {

// Shortest decimal that reads back to the same double.
std::string format_double(double x);
// Six significant digits, used in human-facing tables.  NaN prints as "NA".
std::string format_sig6(double x);

std::vector<std::string> split_csv_line(std::string_view line);

// Synchronous pair on one grid: header timestamp,x,y.
void write_paths_csv(std::ostream& os, const SamplePath& x, const SamplePath& y);
std::pair<SamplePath, SamplePath> read_paths_csv(const std::string& path);

// One series: header timestamp,value.
void write_series_csv(std::ostream& os, const SamplePath& s);
SamplePath read_series_csv(const std::string& path);

// Latent volatility: header timestamp,sigma_x,sigma_y.
void write_vol_csv(std::ostream& os, const VolPath& vol);

}  // namespace rjlt
