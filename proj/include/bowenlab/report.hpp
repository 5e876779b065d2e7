#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bowenlab/exceptional.hpp"

namespace bowenlab {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// 9 significant digits; NaN prints as "nan".
std::string format_number(double v);
void write_csv(const Table& table, std::ostream& out);
void write_csv(const Table& table, const std::string& path);

Table avoid_table(const AvoidSeries& series, int dimension);

// Parses "lo:hi" (inclusive) and "lo:hi:steps".
std::pair<int, int> parse_range(const std::string& text);
std::vector<double> parse_grid(const std::string& text);
Vector parse_point(const std::string& text);

// Command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct SelftestResult {
  std::string name;
  bool passed = false;
  std::string detail;
};
std::vector<SelftestResult> run_selftest();

}  // namespace bowenlab
