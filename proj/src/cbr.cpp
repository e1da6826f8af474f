#include "csifb/cbr.hpp"

#include "csifb/binio.hpp"

namespace csifb {

namespace {
void validate_frame(const CbrFrame& f) {
    if (f.nt < 2 || f.ns < 1 || f.ns > f.nt || f.n_vs < 1)
        throw FramingError("cbr frame: bad antenna/subcarrier fields");
    if (f.payload.size() != (f.payload_bits + 7) / 8)
        throw FramingError("cbr frame: payload byte count disagrees with payload_bits");
    // padding bits must be zero
    if (f.payload_bits % 8 != 0 && !f.payload.empty()) {
        const uint8_t mask = static_cast<uint8_t>(0xFF >> (f.payload_bits % 8));
        if (f.payload.back() & mask) throw FramingError("cbr frame: nonzero padding bits");
    }
    if (f.scheme == CbrSchemeId::T0 || f.scheme == CbrSchemeId::T1) {
        if (f.ng != 1 && f.ng != 2 && f.ng != 4)
            throw FramingError("cbr frame: ng must be 1, 2 or 4");
        const QuantScheme q =
            f.scheme == CbrSchemeId::T0 ? QuantScheme::type0() : QuantScheme::type1();
        const uint64_t expect = standard_overhead_bits(f.nt, f.ns, f.n_vs, f.ng, q);
        if (f.payload_bits != expect)
            throw FramingError("cbr frame: payload_bits does not match the scheme formula");
    } else if (f.scheme == CbrSchemeId::Efnet) {
        if (f.payload_bits == 0) throw FramingError("cbr frame: empty codeword payload");
    } else {
        throw FramingError("cbr frame: unknown scheme id");
    }
}
}  // namespace

CbrFrame make_cbr_frame(CbrSchemeId scheme, std::size_t nt, std::size_t ns, std::size_t ng,
                        std::size_t n_vs, const std::vector<uint8_t>& payload,
                        uint64_t payload_bits) {
    CbrFrame f;
    f.scheme = scheme;
    f.nt = static_cast<uint8_t>(nt);
    f.ns = static_cast<uint8_t>(ns);
    f.ng = static_cast<uint8_t>(ng);
    f.n_vs = static_cast<uint16_t>(n_vs);
    f.payload_bits = static_cast<uint32_t>(payload_bits);
    f.payload = payload;
    validate_frame(f);
    return f;
}

std::vector<uint8_t> pack_cbr(const CbrFrame& frame) {
    validate_frame(frame);
    ByteWriter w;
    w.u8(static_cast<uint8_t>(frame.scheme));
    w.u8(frame.nt);
    w.u8(frame.ns);
    w.u8(frame.ng);
    w.u16(frame.n_vs);
    w.u32(frame.payload_bits);
    w.bytes(frame.payload.data(), frame.payload.size());
    return w.data();
}

CbrFrame unpack_cbr(const std::vector<uint8_t>& bytes) {
    if (bytes.size() < 10) throw FramingError("cbr frame: shorter than the header");
    ByteReader r(bytes);
    CbrFrame f;
    f.scheme = static_cast<CbrSchemeId>(r.u8());
    f.nt = r.u8();
    f.ns = r.u8();
    f.ng = r.u8();
    f.n_vs = r.u16();
    f.payload_bits = r.u32();
    const std::size_t payload_bytes = (f.payload_bits + 7) / 8;
    if (bytes.size() != 10 + payload_bytes)
        throw FramingError("cbr frame: byte length disagrees with payload_bits");
    f.payload.resize(payload_bytes);
    r.bytes(f.payload.data(), payload_bytes);
    validate_frame(f);
    return f;
}

SoundingTiming sequence_overhead(const CbrFrame& frame, const ThroughputCfg& cfg) {
    cfg.validate();
    SoundingTiming t;
    t.t_fixed_s = cfg.t_fixed_s;
    t.cbr_seconds = static_cast<double>(frame.payload_bits) / cfg.bpsk_rate();
    return t;
}

void write_cbr_dump(const std::vector<CbrFrame>& frames, const std::string& path) {
    ByteWriter w;
    for (const auto& f : frames) {
        const auto bytes = pack_cbr(f);
        w.u32(static_cast<uint32_t>(bytes.size()));
        w.bytes(bytes.data(), bytes.size());
    }
    write_file_bytes(path, w.data());
}

std::vector<CbrFrame> read_cbr_dump(const std::string& path) {
    const auto bytes = read_file_bytes(path);
    ByteReader r(bytes);
    std::vector<CbrFrame> frames;
    while (r.remaining() > 0) {
        const uint32_t len = r.u32();
        if (len > r.remaining()) throw FormatError("truncated cbr dump entry", r.offset());
        std::vector<uint8_t> chunk(len);
        r.bytes(chunk.data(), len);
        frames.push_back(unpack_cbr(chunk));
    }
    return frames;
}

}  // namespace csifb
