#include "csifb/angle_codec.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "csifb/binio.hpp"

namespace csifb {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHalfPi = 0.5 * std::numbers::pi;

uint32_t quant_index(double value, double range, unsigned bits) {
    const double step = range / static_cast<double>(1u << bits);
    auto idx = static_cast<long>(std::floor(value / step));
    idx = std::clamp(idx, 0l, static_cast<long>((1u << bits) - 1));
    return static_cast<uint32_t>(idx);
}
}  // namespace

double phi_midpoint(uint32_t index, unsigned bits_phi) {
    const double step = kTwoPi / static_cast<double>(1u << bits_phi);
    return (static_cast<double>(index) + 0.5) * step;
}

double psi_midpoint(uint32_t index, unsigned bits_psi) {
    const double step = kHalfPi / static_cast<double>(1u << bits_psi);
    return (static_cast<double>(index) + 0.5) * step;
}

AngleBits quantize_angles(const GivensAngles& angles, const QuantScheme& scheme) {
    AngleBits out;
    BitWriter w;
    const std::size_t steps = std::min(angles.ns, angles.nt - 1);
    std::size_t at = 0;
    for (std::size_t i = 1; i <= steps; ++i) {
        const std::size_t n = angles.nt - i;
        for (std::size_t k = 0; k < n; ++k)
            w.put(quant_index(angles.phi[at + k], kTwoPi, scheme.bits_phi), scheme.bits_phi);
        for (std::size_t k = 0; k < n; ++k)
            w.put(quant_index(angles.psi[at + k], kHalfPi, scheme.bits_psi), scheme.bits_psi);
        at += n;
    }
    out.bitstream = w.bytes();
    out.length_bits = w.bit_length();
    return out;
}

GivensAngles dequantize_angles(const AngleBits& bits, const QuantScheme& scheme, std::size_t nt,
                               std::size_t ns) {
    if (bits.length_bits != scheme.bits_per_subcarrier(nt, ns))
        throw FramingError("angle bitstream length does not match (nt, ns, scheme)");
    BitReader r(bits.bitstream, bits.length_bits);
    GivensAngles out;
    out.nt = nt;
    out.ns = ns;
    const std::size_t steps = std::min(ns, nt - 1);
    for (std::size_t i = 1; i <= steps; ++i) {
        const std::size_t n = nt - i;
        for (std::size_t k = 0; k < n; ++k)
            out.phi.push_back(phi_midpoint(r.get(scheme.bits_phi), scheme.bits_phi));
        for (std::size_t k = 0; k < n; ++k)
            out.psi.push_back(psi_midpoint(r.get(scheme.bits_psi), scheme.bits_psi));
    }
    return out;
}

AngleBits quantize_angle_sequence(const std::vector<GivensAngles>& seq,
                                  const QuantScheme& scheme) {
    AngleBits out;
    BitWriter w;
    for (const auto& a : seq) {
        AngleBits one = quantize_angles(a, scheme);
        BitReader r(one.bitstream, one.length_bits);
        // Re-emit bit by bit; per-subcarrier payloads are not byte aligned.
        for (uint64_t i = 0; i < one.length_bits; ++i) w.put(r.get(1), 1);
    }
    out.bitstream = w.bytes();
    out.length_bits = w.bit_length();
    return out;
}

std::vector<GivensAngles> dequantize_angle_sequence(const AngleBits& bits,
                                                    const QuantScheme& scheme, std::size_t nt,
                                                    std::size_t ns, std::size_t count) {
    const uint64_t per = scheme.bits_per_subcarrier(nt, ns);
    if (bits.length_bits != per * count)
        throw FramingError("angle bitstream length does not match subcarrier count");
    BitReader r(bits.bitstream, bits.length_bits);
    std::vector<GivensAngles> out;
    out.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        GivensAngles a;
        a.nt = nt;
        a.ns = ns;
        const std::size_t steps = std::min(ns, nt - 1);
        for (std::size_t i = 1; i <= steps; ++i) {
            const std::size_t n = nt - i;
            for (std::size_t k = 0; k < n; ++k)
                a.phi.push_back(phi_midpoint(r.get(scheme.bits_phi), scheme.bits_phi));
            for (std::size_t k = 0; k < n; ++k)
                a.psi.push_back(psi_midpoint(r.get(scheme.bits_psi), scheme.bits_psi));
        }
        out.push_back(std::move(a));
    }
    return out;
}

}  // namespace csifb
