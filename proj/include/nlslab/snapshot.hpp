#pragma once

#include <filesystem>
#include <iosfwd>

#include "nlslab/field.hpp"

namespace nlslab {

// Field snapshot text format:
//
//   <d> <M> <Rmax>
//   <r_1> <re u(r_1)> <im u(r_1)>
//   ...
//   <r_M> <re u(r_M)> <im u(r_M)>
//
// All reals are written with 17 significant digits so that a read-back is
// bit-exact. Lines starting with '#' are ignored on input.

void write_snapshot(std::ostream& out, const RadialField& f);
void write_snapshot(const std::filesystem::path& path, const RadialField& f);

/// Rebuilds the grid from the header and checks the node radii against it.
RadialField read_snapshot(std::istream& in);
RadialField read_snapshot(const std::filesystem::path& path);

}  // namespace nlslab
