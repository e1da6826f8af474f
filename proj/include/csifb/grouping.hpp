#pragma once

#include <vector>

#include "csifb/complex_matrix.hpp"

namespace csifb {

// Subcarrier grouping: keep the first subcarrier of every group of ng.
// ng must be 1, 2 or 4. Output length is ceil(len / ng).
std::vector<ComplexMatrix> group_subcarriers(const std::vector<ComplexMatrix>& v_list,
                                             std::size_t ng);

// Access-point side expansion: replicate each group representative ng
// times, truncated to `total` entries.
std::vector<ComplexMatrix> expand_groups(const std::vector<ComplexMatrix>& v_grouped,
                                         std::size_t ng, std::size_t total);

}  // namespace csifb
