#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace csifb {

// Deterministic splitmix64 stream. All randomness in the project flows
// through this so results are reproducible from (seed, stream id) alone,
// independent of the standard library's distribution implementations.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    // Decorrelated substream, e.g. one per packet or per sample.
    static Rng stream(uint64_t seed, uint64_t stream_id) {
        Rng r(seed ^ (0x9E3779B97F4A7C15ull * (stream_id + 1)));
        r.next_u64();
        return r;
    }

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    uint32_t bits(unsigned n) { return static_cast<uint32_t>(next_u64() >> (64 - n)); }

    // Standard normal via Box-Muller; the pair partner is cached.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    // Circularly symmetric complex Gaussian with E|z|^2 = 1.
    std::complex<double> cgaussian() {
        const double s = std::numbers::sqrt2 / 2.0;
        return {s * gaussian(), s * gaussian()};
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_u64() % i);
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace csifb
