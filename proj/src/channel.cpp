#include "csifb/channel.hpp"

#include <cmath>
#include <numbers>

#include "csifb/errors.hpp"

namespace csifb {

void ChannelModelCfg::validate() const {
    if (nt < 1 || nt > 8 || nr < 1 || nr > 8)
        throw InvalidInputError("channel cfg: antenna counts must be in 1..8");
    if (n_vs < 1 || n_vs > n_fft) throw InvalidInputError("channel cfg: need 1 <= n_vs <= n_fft");
    if (n_taps < 1) throw InvalidInputError("channel cfg: n_taps must be >= 1");
    if (!(delay_decay > 0)) throw InvalidInputError("channel cfg: delay decay must be > 0");
}

std::vector<std::size_t> valid_subcarrier_indices(std::size_t n_fft, std::size_t n_vs) {
    const std::size_t stride = std::max<std::size_t>(1, n_fft / n_vs);
    std::vector<std::size_t> idx(n_vs);
    for (std::size_t i = 0; i < n_vs; ++i) idx[i] = i * stride;
    return idx;
}

ChannelRealization gen_channel(const ChannelModelCfg& cfg, uint64_t packet_index) {
    cfg.validate();

    // Unit-total-power exponential tap profile.
    std::vector<double> amp(cfg.n_taps);
    double total = 0;
    for (std::size_t t = 0; t < cfg.n_taps; ++t) {
        const double p = std::exp(-static_cast<double>(t) / cfg.delay_decay);
        amp[t] = p;
        total += p;
    }
    for (auto& a : amp) a = std::sqrt(a / total);

    Rng rng = Rng::stream(cfg.seed, packet_index);
    std::vector<std::vector<cplx>> taps(cfg.nr * cfg.nt, std::vector<cplx>(cfg.n_taps));
    for (auto& path : taps)
        for (std::size_t t = 0; t < cfg.n_taps; ++t) path[t] = amp[t] * rng.cgaussian();

    ChannelRealization out;
    out.subcarrier_indices = valid_subcarrier_indices(cfg.n_fft, cfg.n_vs);
    out.h_per_subcarrier.reserve(cfg.n_vs);
    for (std::size_t k : out.subcarrier_indices) {
        ComplexMatrix h(cfg.nr, cfg.nt);
        for (std::size_t r = 0; r < cfg.nr; ++r) {
            for (std::size_t c = 0; c < cfg.nt; ++c) {
                cplx acc = 0;
                const auto& path = taps[r * cfg.nt + c];
                for (std::size_t t = 0; t < cfg.n_taps; ++t) {
                    const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) *
                                       static_cast<double>(t) / static_cast<double>(cfg.n_fft);
                    acc += path[t] * std::polar(1.0, ang);
                }
                h(r, c) = acc;
            }
        }
        out.h_per_subcarrier.push_back(std::move(h));
    }
    return out;
}

ComplexMatrix apply_channel(const ComplexMatrix& x, const ComplexMatrix& h, double noise_power,
                            Rng& rng) {
    if (x.cols() != 1 || h.cols() != x.rows())
        throw InvalidInputError("apply_channel: shape mismatch");
    ComplexMatrix y = h * x;
    if (noise_power > 0) {
        const double s = std::sqrt(noise_power);
        for (std::size_t r = 0; r < y.rows(); ++r) y(r, 0) += s * rng.cgaussian();
    }
    return y;
}

}  // namespace csifb
