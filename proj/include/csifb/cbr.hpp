#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csifb/angle_codec.hpp"
#include "csifb/efnet.hpp"
#include "csifb/throughput.hpp"

namespace csifb {

enum class CbrSchemeId : uint8_t { T0 = 0, T1 = 1, Efnet = 2 };

// Compressed beamforming report frame: a 10-byte little-endian header
// followed by the packed feedback payload, zero-padded to a byte boundary.
struct CbrFrame {
    CbrSchemeId scheme = CbrSchemeId::T0;
    uint8_t nt = 0, ns = 0, ng = 1;
    uint16_t n_vs = 0;
    uint32_t payload_bits = 0;
    std::vector<uint8_t> payload;

    std::size_t byte_size() const { return 10 + (payload_bits + 7) / 8; }
};

CbrFrame make_cbr_frame(CbrSchemeId scheme, std::size_t nt, std::size_t ns, std::size_t ng,
                        std::size_t n_vs, const std::vector<uint8_t>& payload,
                        uint64_t payload_bits);

std::vector<uint8_t> pack_cbr(const CbrFrame& frame);
CbrFrame unpack_cbr(const std::vector<uint8_t>& bytes);

struct SoundingTiming {
    double t_fixed_s = 0;    // lumped NDPA + NDP + ACK + spacing
    double cbr_seconds = 0;  // payload airtime at the BPSK rate
    double total() const { return t_fixed_s + cbr_seconds; }
};

SoundingTiming sequence_overhead(const CbrFrame& frame, const ThroughputCfg& cfg);

// Dump file: frames back to back, each preceded by a u32 byte length.
void write_cbr_dump(const std::vector<CbrFrame>& frames, const std::string& path);
std::vector<CbrFrame> read_cbr_dump(const std::string& path);

}  // namespace csifb
