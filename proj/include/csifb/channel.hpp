#pragma once

#include <cstdint>
#include <vector>

#include "csifb/complex_matrix.hpp"
#include "csifb/rng.hpp"

namespace csifb {

// Tapped-delay-line MIMO channel generator configuration. The tap count
// controls frequency-domain coherence: fewer taps, flatter channel.
struct ChannelModelCfg {
    std::size_t nt = 3;
    std::size_t nr = 2;
    std::size_t n_fft = 64;
    std::size_t n_vs = 28;
    std::size_t n_taps = 8;
    double delay_decay = 4.0;  // exponential power-decay constant, > 0
    uint64_t seed = 1;

    void validate() const;
};

struct ChannelRealization {
    std::vector<ComplexMatrix> h_per_subcarrier;  // length n_vs, each Nr x Nt
    std::vector<std::size_t> subcarrier_indices;  // into 0..n_fft-1
};

// Equally spaced valid-subcarrier indices starting at 0 (stride
// floor(n_fft / n_vs)).
std::vector<std::size_t> valid_subcarrier_indices(std::size_t n_fft, std::size_t n_vs);

// One channel draw. Taps are i.i.d. complex Gaussian per (rx, tx) path with
// an exponential power profile normalized to unit total power, so
// E[|H[k]|_F^2] = nr * nt. Deterministic in (cfg.seed, packet_index).
ChannelRealization gen_channel(const ChannelModelCfg& cfg, uint64_t packet_index);

// y = H x + n with circular complex Gaussian noise of per-entry variance
// noise_power (watts).
ComplexMatrix apply_channel(const ComplexMatrix& x, const ComplexMatrix& h, double noise_power,
                            Rng& rng);

}  // namespace csifb
