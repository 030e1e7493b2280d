#pragma once

// Flat `key = value` experiment grid files. Grid keys (n, p, tau, k, delta)
// take comma lists; `#` starts a comment. Unknown keys are an error.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "covel/experiment.hpp"

namespace covel {

struct DesignGrid {
  Design design = Design::identity_alt;
  std::vector<Index> n;
  std::vector<Index> p;
  std::vector<Index> tau;
  std::vector<Index> k;  // empty: tau + 10 for banded_alt
  std::vector<double> delta{0.0};
  std::vector<std::string> methods;
  double alpha = 0.05;
  int replications = 1000;
  std::optional<std::uint64_t> seed;
  int bootstrap_b = 300;
  double split_frac = 0.4;
  Index top_k = 4;
};

DesignGrid parse_design_file(std::istream& in, const std::string& source);
DesignGrid parse_design_file(const std::string& path);

/// Cartesian product in the order n, p, tau, k, delta (delta fastest).
std::vector<DesignSpec> expand_grid(const DesignGrid& grid, std::uint64_t seed);

}  // namespace covel
