#pragma once

#include <iosfwd>
#include <string>

#include "gibbslab/lattice.hpp"
#include "gibbslab/patterns.hpp"

namespace gibbslab {

// Spin window format (bit-exact round trip):
//   ising-spin v1 d=<d> extent=<e1>x...x<ed> boundary=<tag>
//   [ring=<+->... when the boundary is explicit]
//   one line of +/- per row (rows grouped per plane for d=3)
void write_spin_window(std::ostream& os, const SpinConfig& cfg);
SpinConfig read_spin_window(std::istream& is);

// Pattern format, same header scheme:
//   ising-pattern v1 d=2 extent=<w>x<h> support=<cube|nested|mask> origin=<x>,<y>
//   rows over the bounding box, '.' marks non-support cells
void write_pattern(std::ostream& os, const Pattern& pattern);
Pattern read_pattern(std::istream& is);

void save_spin_window(const std::string& path, const SpinConfig& cfg);
SpinConfig load_spin_window(const std::string& path);
void save_pattern(const std::string& path, const Pattern& pattern);
Pattern load_pattern(const std::string& path);

}  // namespace gibbslab
