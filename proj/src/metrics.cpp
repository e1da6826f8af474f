#include "csifb/metrics.hpp"

#include <cmath>
#include <numbers>

#include "csifb/rng.hpp"

namespace csifb {

double cosine_similarity(const std::vector<ComplexMatrix>& vhat_seq,
                         const std::vector<ComplexMatrix>& v_seq,
                         std::size_t* zero_norm_skipped) {
    if (vhat_seq.size() != v_seq.size())
        throw InvalidInputError("cosine_similarity: sequence length mismatch");
    double acc = 0;
    std::size_t n = 0, skipped = 0;
    for (std::size_t k = 0; k < v_seq.size(); ++k) {
        const auto& a = vhat_seq[k];
        const auto& b = v_seq[k];
        if (a.rows() != b.rows() || a.cols() != 1 || b.cols() != 1)
            throw InvalidInputError("cosine_similarity: expects aligned column vectors");
        const double na = column_norm(a, 0), nb = column_norm(b, 0);
        if (na <= 0 || nb <= 0) {
            ++skipped;
            continue;
        }
        acc += std::abs(column_dot(a, 0, b, 0)) / (na * nb);
        ++n;
    }
    if (zero_norm_skipped) *zero_norm_skipped += skipped;
    return n == 0 ? 0.0 : acc / static_cast<double>(n);
}

double EvmAccumulator::evm_db(double floor_db) const {
    if (sig_energy <= 0 || err_energy <= 0) return floor_db;
    return std::max(floor_db, 10.0 * std::log10(err_energy / sig_energy));
}

void simulate_evm_accumulate(const std::vector<ComplexMatrix>& vhat_seq,
                             const std::vector<ComplexMatrix>& h_seq, const EvmCfg& cfg,
                             uint64_t sample_id, EvmAccumulator& acc) {
    if (vhat_seq.size() != h_seq.size())
        throw InvalidInputError("simulate_evm: sequence length mismatch");
    if (h_seq.empty()) return;

    const std::size_t nr = h_seq.front().rows();
    const std::size_t nt = h_seq.front().cols();

    // Unit mean per-entry channel gain across this sample's subcarriers.
    double mean_gain = 0;
    for (const auto& h : h_seq) mean_gain += h.frobenius_norm_sq();
    mean_gain /= static_cast<double>(h_seq.size() * nr * nt);
    if (mean_gain <= 0) {
        acc.skipped += h_seq.size();
        return;
    }
    const double chan_scale = 1.0 / std::sqrt(mean_gain);

    const double p_rx =
        std::pow(10.0, (cfg.tx_power_dbm - 30.0 + cfg.path_gain_db) / 10.0);
    const double n0 = std::pow(10.0, (cfg.noise_floor_dbm - 30.0) / 10.0);
    const double amp = std::sqrt(p_rx);
    const double noise_sd = std::sqrt(n0 / 2.0);
    const double inv_sqrt2 = std::numbers::sqrt2 / 2.0;

    Rng rng = Rng::stream(cfg.seed, sample_id);
    for (std::size_t k = 0; k < h_seq.size(); ++k) {
        const auto& h = h_seq[k];
        const auto& vhat = vhat_seq[k];
        if (vhat.rows() != nt || vhat.cols() != 1)
            throw InvalidInputError("simulate_evm: beamformer shape mismatch");

        const double vn = column_norm(vhat, 0);
        if (vn <= 0) {
            ++acc.skipped;
            continue;
        }
        // effective channel h * vhat with a unit-power beamformer
        std::vector<cplx> heff(nr, 0.0);
        double heff_sq = 0;
        for (std::size_t r = 0; r < nr; ++r) {
            cplx s = 0;
            for (std::size_t c = 0; c < nt; ++c) s += h(r, c) * vhat(c, 0);
            heff[r] = s * chan_scale / vn;
            heff_sq += std::norm(heff[r]);
        }
        if (heff_sq <= 0) {
            ++acc.skipped;
            continue;
        }

        for (int sym = 0; sym < cfg.n_symbols; ++sym) {
            const cplx s{rng.bits(1) ? inv_sqrt2 : -inv_sqrt2,
                         rng.bits(1) ? inv_sqrt2 : -inv_sqrt2};
            cplx combined = 0;
            for (std::size_t r = 0; r < nr; ++r) {
                const cplx y = amp * heff[r] * s +
                               cplx{noise_sd * rng.gaussian(), noise_sd * rng.gaussian()};
                combined += std::conj(heff[r]) * y;
            }
            const cplx s_hat = combined / (amp * heff_sq);
            acc.err_energy += std::norm(s_hat - s);
            acc.sig_energy += std::norm(s);
        }
    }
}

double simulate_evm(const std::vector<ComplexMatrix>& vhat_seq,
                    const std::vector<ComplexMatrix>& h_seq, const EvmCfg& cfg,
                    uint64_t sample_id) {
    EvmAccumulator acc;
    simulate_evm_accumulate(vhat_seq, h_seq, cfg, sample_id, acc);
    return acc.evm_db(cfg.floor_db);
}

}  // namespace csifb
