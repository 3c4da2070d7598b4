#pragma once

// Line-delimited JSON run records.
//
// Line 1:  {"type":"run","problem":..,"method":..,"start":..,"status":..,
//           "iterations":..,"f_final":..,"sigma_f":..}
// Line 2+: {"k","f","gap","alpha","kind","backtracks","estimate",
//           "predicted","dikin","certificate","active","forced","time"}
// NaN fields are written as null. "time" is the only nondeterministic field.

#include "gscfw/profile.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace gscfw {

void write_run(std::ostream& out, const RunRecord& r);
RunRecord read_run(std::istream& in);

void write_run_file(const std::filesystem::path& path, const RunRecord& r);
RunRecord read_run_file(const std::filesystem::path& path);

/// Every *.jsonl file in dir, sorted by file name.
std::vector<RunRecord> read_run_dir(const std::filesystem::path& dir);

void write_summary_csv(std::ostream& out, const std::vector<RunRecord>& records,
                       const std::vector<double>& eps_grid);

}  // namespace gscfw
