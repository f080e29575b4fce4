#pragma once

#include <iosfwd>
#include <string>

#include "fdrecon/sample.hpp"

namespace fdrecon {

// Wide curve format: header row holds the grid points; each following row is
// one curve. Unobserved cells are empty on write; empty or "NaN" on read.
// Values are printed with 17 significant digits so a write/read cycle is
// bit-exact.

FunctionalSample read_sample_csv(std::istream& in, const std::string& source_name = "<stream>");
FunctionalSample read_sample_csv_file(const std::string& path);

void write_sample_csv(std::ostream& out, const FunctionalSample& sample);
void write_sample_csv_file(const std::string& path, const FunctionalSample& sample);

/// Shortest round-trip decimal text for a double (17 significant digits).
std::string format_value(double x);

}  // namespace fdrecon
