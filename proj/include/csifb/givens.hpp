#pragma once

#include <cstddef>
#include <vector>

#include "csifb/complex_matrix.hpp"

namespace csifb {

// Ordered angle sets for one fed-back subcarrier. Ordering follows the
// standard's extraction loop: for step i = 1..min(Ns, Nt-1), first the
// phi_{l,i} for l = i..Nt-1, then the psi_{l,i} for l = i+1..Nt. Both sets
// hold sum_{i}(Nt - i) angles.
struct GivensAngles {
    std::size_t nt = 0;
    std::size_t ns = 0;
    std::vector<double> phi;  // each in [0, 2*pi)
    std::vector<double> psi;  // each in [0, pi/2]
};

// Angle count per set for an Nt x Ns beamforming matrix.
std::size_t givens_angle_count(std::size_t nt, std::size_t ns);

// Decompose a phase-normalized beamforming matrix (unit-norm columns, real
// non-negative last row) into its diagonal-phase and rotation angles.
// givens_reconstruct() of the result reproduces v to ~1e-12.
GivensAngles givens_decompose(const ComplexMatrix& v);

// V = (prod_i D_i(phi) prod_{l=i+1..Nt} G_li^T(psi)) I_{Nt x Ns}.
ComplexMatrix givens_reconstruct(const GivensAngles& angles);

}  // namespace csifb
