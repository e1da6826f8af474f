#pragma once

#include <cstdint>
#include <vector>

#include "csifb/givens.hpp"

namespace csifb {

enum class QuantType : uint8_t { Type0 = 0, Type1 = 1 };

// Standard angle quantization schemes: Type 0 uses (5, 7) bits for
// (psi, phi), Type 1 uses (7, 9).
struct QuantScheme {
    QuantType kind;
    unsigned bits_psi;
    unsigned bits_phi;

    static QuantScheme type0() { return {QuantType::Type0, 5, 7}; }
    static QuantScheme type1() { return {QuantType::Type1, 7, 9}; }
    static QuantScheme of(QuantType t) { return t == QuantType::Type0 ? type0() : type1(); }

    unsigned bits_per_subcarrier(std::size_t nt, std::size_t ns) const {
        return static_cast<unsigned>(givens_angle_count(nt, ns)) * (bits_phi + bits_psi);
    }
};

// Packed angle indices, MSB-first per angle, in the standard loop order
// (all phi of a step, then that step's psi). May hold several subcarriers'
// worth back to back.
struct AngleBits {
    std::vector<uint8_t> bitstream;
    uint64_t length_bits = 0;
};

// Midpoint uniform quantizer indices for one subcarrier's angles:
// phi on [0, 2*pi) with bits_phi bits, psi on [0, pi/2] with bits_psi bits.
AngleBits quantize_angles(const GivensAngles& angles, const QuantScheme& scheme);

GivensAngles dequantize_angles(const AngleBits& bits, const QuantScheme& scheme, std::size_t nt,
                               std::size_t ns);

// Concatenation over fed-back subcarriers, in sequence order.
AngleBits quantize_angle_sequence(const std::vector<GivensAngles>& seq, const QuantScheme& scheme);

std::vector<GivensAngles> dequantize_angle_sequence(const AngleBits& bits,
                                                    const QuantScheme& scheme, std::size_t nt,
                                                    std::size_t ns, std::size_t count);

// Reconstruction levels (exposed for the quantizer-arithmetic tests).
double phi_midpoint(uint32_t index, unsigned bits_phi);
double psi_midpoint(uint32_t index, unsigned bits_psi);

}  // namespace csifb
