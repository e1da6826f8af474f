#pragma once

#include <cstdint>
#include <vector>

#include "csifb/complex_matrix.hpp"

namespace csifb {

// Mean over subcarriers of |vhat^H v| / (|vhat| |v|) for single-stream
// beamforming vectors. Zero-norm entries are excluded and counted.
double cosine_similarity(const std::vector<ComplexMatrix>& vhat_seq,
                         const std::vector<ComplexMatrix>& v_seq,
                         std::size_t* zero_norm_skipped = nullptr);

struct EvmCfg {
    double tx_power_dbm = 30.0;
    double noise_floor_dbm = -85.0;
    // Desk calibration of the unmodeled link budget, chosen so that
    // perfect feedback on the default 3x2 setup lands near -18 dB.
    double path_gain_db = -103.0;
    int n_symbols = 16;       // QPSK symbols per subcarrier
    double floor_db = -60.0;  // reporting floor for near-noiseless runs
    uint64_t seed = 0xE7;
};

// Running error/signal energy over symbols and subcarriers.
struct EvmAccumulator {
    double err_energy = 0;
    double sig_energy = 0;
    std::size_t skipped = 0;  // zero-gain beamformers

    double evm_db(double floor_db) const;
};

// Beamform known unit-power QPSK symbols with vhat over the true channel,
// maximum-ratio combine with the known effective channel, and accumulate
// symbol error energy. Channels are normalized to unit mean per-entry gain
// so the link budget is carried entirely by cfg.
void simulate_evm_accumulate(const std::vector<ComplexMatrix>& vhat_seq,
                             const std::vector<ComplexMatrix>& h_seq, const EvmCfg& cfg,
                             uint64_t sample_id, EvmAccumulator& acc);

double simulate_evm(const std::vector<ComplexMatrix>& vhat_seq,
                    const std::vector<ComplexMatrix>& h_seq, const EvmCfg& cfg,
                    uint64_t sample_id = 0);

}  // namespace csifb
