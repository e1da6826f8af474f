#include "csifb/throughput.hpp"

#include "csifb/errors.hpp"

namespace csifb {

void ThroughputCfg::validate() const {
    if (n_vs < 1 || n_fft < 1 || n_cp >= n_fft)
        throw InvalidInputError("throughput cfg: need n_cp < n_fft and n_vs >= 1");
    if (!(sample_rate_hz > 0) || packet_bytes < 1 || t_fixed_s < 0)
        throw InvalidInputError("throughput cfg: non-positive rate, packet or overhead time");
}

double gross_throughput(double gamma, const ThroughputCfg& cfg) {
    cfg.validate();
    if (gamma < 0) throw InvalidInputError("gross_throughput: gamma must be >= 0");
    return static_cast<double>(cfg.n_vs) * cfg.symbol_rate() * gamma;
}

double net_throughput(double r, uint64_t overhead_bits, const ThroughputCfg& cfg) {
    cfg.validate();
    if (!(r > 0)) throw InvalidInputError("net_throughput: gross rate must be > 0");
    const double t_data = static_cast<double>(cfg.packet_bytes) * 8.0 / r;
    const double t_overhead =
        cfg.t_fixed_s + static_cast<double>(overhead_bits) / cfg.bpsk_rate();
    return t_data / (t_data + t_overhead) * r;
}

uint64_t standard_overhead_bits(std::size_t nt, std::size_t ns, std::size_t n_vs, std::size_t ng,
                                const QuantScheme& scheme) {
    if (ng != 1 && ng != 2 && ng != 4) throw InvalidInputError("ng must be 1, 2 or 4");
    if (n_vs < 1) throw InvalidInputError("n_vs must be >= 1");
    const uint64_t kept = (n_vs + ng - 1) / ng;
    return kept * scheme.bits_per_subcarrier(nt, ns);
}

}  // namespace csifb
