#pragma once

#include <vector>

#include "csifb/complex_matrix.hpp"

namespace csifb {

struct SvdResult {
    ComplexMatrix u;            // Nr x Nr unitary
    std::vector<double> sigma;  // min(Nr, Nt) singular values, non-increasing
    ComplexMatrix v;            // Nt x Nt unitary
};

// Full SVD h = U diag(sigma) V^H for small dense complex matrices
// (1..8 rows/cols). One-sided Jacobi with a fixed cyclic sweep order, so
// the result is deterministic for identical input.
SvdResult svd(const ComplexMatrix& h);

// First ns columns of V, each column rotated by a unit phase so that its
// last entry is real and non-negative. This is the beamforming matrix the
// station feeds back; per-column phase does not affect beamforming.
ComplexMatrix extract_beamforming(const SvdResult& s, std::size_t ns);

}  // namespace csifb
