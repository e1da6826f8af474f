#pragma once

#include <optional>
#include <vector>

#include "csifb/channel.hpp"
#include "csifb/complex_matrix.hpp"
#include "csifb/tensor.hpp"

namespace csifb {

// The autoencoder's input: per-subcarrier beamforming matrices vectorized
// into a (Nt*Ns) x Nvs image with separate real/imaginary planes,
// normalized to [-1, 1] by a shared positive scale.
struct VImage {
    Tensor data;       // (nt*ns, n_vs, 2); channel 0 real, channel 1 imag
    double scale = 1;  // > 0; multiplying by it undoes the normalization
    std::size_t clipped = 0;  // entries that fell outside [-1, 1] pre-clip
};

// Stack a per-subcarrier beamforming sequence into a normalized image.
// Matrix entry (r, c) of subcarrier k lands at image row c*nt + r,
// column k (column-major vectorization). If scale is absent, the sample's
// own max-abs entry is used; entries outside [-1, 1] under a supplied
// scale are clipped and counted.
VImage vimage_from_v_seq(const std::vector<ComplexMatrix>& v_seq,
                         std::optional<double> scale = std::nullopt);

// SVD + beamforming extraction per subcarrier, then vimage_from_v_seq.
VImage build_vimage(const ChannelRealization& h_seq, std::size_t ns,
                    std::optional<double> scale = std::nullopt);

// De-normalized per-subcarrier beamforming matrices (nt x ns each).
std::vector<ComplexMatrix> v_seq_from_vimage(const VImage& img, std::size_t nt, std::size_t ns);

// Largest |entry| of the un-normalized image for this V sequence.
double vimage_raw_max_abs(const std::vector<ComplexMatrix>& v_seq);

}  // namespace csifb
