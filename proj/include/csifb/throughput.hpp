#pragma once

#include <cstdint>

#include "csifb/angle_codec.hpp"

namespace csifb {

struct ThroughputCfg {
    std::size_t n_vs = 28, n_fft = 64, n_cp = 16;
    double sample_rate_hz = 40e6;
    std::size_t packet_bytes = 300;
    // Lumped NDPA + NDP + ACK + interframe time. Defaults below are the
    // values back-solved from the published net-throughput rows (131.7 us
    // for the 40 MHz setup, 142.1 us for the 20 MHz one).
    double t_fixed_s = 131.7e-6;

    void validate() const;
    double symbol_rate() const {
        return sample_rate_hz / static_cast<double>(n_fft + n_cp);
    }
    // CBR airtime rate: BPSK rate-1/2 over the valid subcarriers.
    double bpsk_rate() const { return static_cast<double>(n_vs) * symbol_rate() * 0.5; }
};

// r = n_vs / (n_fft + n_cp) * b * gamma.
double gross_throughput(double gamma, const ThroughputCfg& cfg);

// r_bar = T / (T + T_overhead) * r with T = packet bits / r and
// T_overhead = t_fixed + overhead_bits / bpsk_rate.
double net_throughput(double r, uint64_t overhead_bits, const ThroughputCfg& cfg);

// ceil(n_vs / ng) * per-subcarrier angle bits.
uint64_t standard_overhead_bits(std::size_t nt, std::size_t ns, std::size_t n_vs, std::size_t ng,
                                const QuantScheme& scheme);

}  // namespace csifb
