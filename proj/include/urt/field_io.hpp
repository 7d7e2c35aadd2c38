#pragma once

// Text serialisation of sampled fields.
//
// Layout: a header line naming the coordinate columns ("x", "x,y", "x,y,z",
// or "px", ... for momentum space) followed by "re,im"; then one row per node
// in row-major order (last axis fastest). Numbers use 12 significant digits
// in scientific notation so that output is byte-reproducible.

#include <iosfwd>
#include <string>

#include "urt/grid.hpp"

namespace urt {

/// Fixed 12-significant-digit scientific formatting used for all CSV output.
std::string format_number(double value);

void write_field_csv(std::ostream& out, const SampledField& field);
SampledField read_field_csv(std::istream& in);

void save_field_csv(const std::string& path, const SampledField& field);
SampledField load_field_csv(const std::string& path);

}  // namespace urt
