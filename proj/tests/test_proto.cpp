#include <doctest.h>

#include <filesystem>

#include "csifb/cbr.hpp"
#include "csifb/givens.hpp"
#include "csifb/grouping.hpp"
#include "test_support.hpp"

using namespace csifb;
using namespace csifb::test;

namespace {
// Type-0 angle payload for n_vs random subcarriers.
AngleBits t0_payload(std::size_t nt, std::size_t n_vs, std::size_t ng, uint64_t seed) {
    Rng rng(seed);
    std::vector<GivensAngles> angles;
    for (std::size_t k = 0; k < (n_vs + ng - 1) / ng; ++k)
        angles.push_back(givens_decompose(phase_normalize_last_row(random_orthonormal(nt, 1, rng))));
    return quantize_angle_sequence(angles, QuantScheme::type0());
}
}  // namespace

TEST_CASE("cbr: pack/unpack round trip") {
    AngleBits bits = t0_payload(3, 28, 1, 91);
    REQUIRE(bits.length_bits == 672);
    CbrFrame f = make_cbr_frame(CbrSchemeId::T0, 3, 1, 1, 28, bits.bitstream, bits.length_bits);
    auto bytes = pack_cbr(f);
    CHECK(bytes.size() == 94);  // 10-byte header + 84 payload bytes

    CbrFrame g = unpack_cbr(bytes);
    CHECK(g.scheme == CbrSchemeId::T0);
    CHECK(g.nt == 3);
    CHECK(g.ns == 1);
    CHECK(g.ng == 1);
    CHECK(g.n_vs == 28);
    CHECK(g.payload_bits == 672);
    CHECK(g.payload == f.payload);
}

TEST_CASE("cbr: efnet codeword frame arithmetic") {
    // 25 codeword elements at 4 bits -> 100 bits -> 13 payload bytes
    std::vector<uint8_t> payload(13, 0);
    payload[0] = 0xAB;
    CbrFrame f = make_cbr_frame(CbrSchemeId::Efnet, 3, 1, 1, 28, payload, 100);
    auto bytes = pack_cbr(f);
    CHECK(bytes.size() == 23);
    CbrFrame g = unpack_cbr(bytes);
    CHECK(g.payload_bits == 100);
    CHECK(g.payload == payload);
}

TEST_CASE("cbr: header/payload consistency is enforced") {
    AngleBits bits = t0_payload(3, 28, 1, 92);
    // wrong payload_bits for the declared scheme/geometry
    CHECK_THROWS_AS(make_cbr_frame(CbrSchemeId::T0, 3, 1, 2, 28, bits.bitstream, bits.length_bits),
                    FramingError);
    CHECK_THROWS_AS(make_cbr_frame(CbrSchemeId::T0, 3, 1, 3, 28, bits.bitstream, bits.length_bits),
                    FramingError);

    CbrFrame f = make_cbr_frame(CbrSchemeId::T0, 3, 1, 1, 28, bits.bitstream, bits.length_bits);
    auto bytes = pack_cbr(f);
    auto truncated = bytes;
    truncated.resize(bytes.size() - 1);
    CHECK_THROWS_AS(unpack_cbr(truncated), FramingError);

    // corrupt the declared ng so the formula check fires
    auto bad = bytes;
    bad[3] = 2;
    CHECK_THROWS_AS(unpack_cbr(bad), FramingError);

    // nonzero padding bits
    std::vector<uint8_t> padded(2, 0xFF);
    CHECK_THROWS_AS(make_cbr_frame(CbrSchemeId::Efnet, 2, 1, 1, 4, padded, 12), FramingError);
}

TEST_CASE("cbr: sequence overhead arithmetic") {
    ThroughputCfg cfg;
    cfg.n_vs = 28;
    cfg.n_fft = 64;
    cfg.n_cp = 16;
    cfg.sample_rate_hz = 40e6;
    cfg.t_fixed_s = 131.7e-6;

    AngleBits bits = t0_payload(3, 28, 1, 93);
    CbrFrame f = make_cbr_frame(CbrSchemeId::T0, 3, 1, 1, 28, bits.bitstream, bits.length_bits);
    SoundingTiming t = sequence_overhead(f, cfg);
    CHECK(t.cbr_seconds == doctest::Approx(96.0e-6));  // 672 bits at 7 Mb/s
    CHECK(t.total() == doctest::Approx(131.7e-6 + 96.0e-6));

    ThroughputCfg cfg20;
    cfg20.n_vs = 52;
    cfg20.n_fft = 64;
    cfg20.n_cp = 16;
    cfg20.sample_rate_hz = 20e6;
    cfg20.t_fixed_s = 142.1e-6;
    std::vector<uint8_t> payload(15, 0);
    CbrFrame e = make_cbr_frame(CbrSchemeId::Efnet, 2, 1, 1, 52, payload, 120);
    CHECK(sequence_overhead(e, cfg20).cbr_seconds == doctest::Approx(120.0 / 6.5e6));
}

TEST_CASE("cbr: payload_bits matches the overhead formula for every table row") {
    struct Combo {
        CbrSchemeId id;
        std::size_t nt, n_vs, ng;
        uint64_t expect;
    };
    const Combo combos[] = {
        {CbrSchemeId::T0, 3, 28, 1, 672}, {CbrSchemeId::T1, 3, 28, 1, 896},
        {CbrSchemeId::T0, 2, 52, 1, 624}, {CbrSchemeId::T0, 2, 52, 2, 312},
        {CbrSchemeId::T0, 2, 52, 4, 156}, {CbrSchemeId::T1, 2, 52, 1, 832},
        {CbrSchemeId::T1, 2, 52, 2, 416}, {CbrSchemeId::T1, 2, 52, 4, 208},
    };
    Rng rng(96);
    for (const auto& c : combos) {
        const QuantScheme q =
            c.id == CbrSchemeId::T0 ? QuantScheme::type0() : QuantScheme::type1();
        std::vector<GivensAngles> angles;
        for (std::size_t k = 0; k < (c.n_vs + c.ng - 1) / c.ng; ++k)
            angles.push_back(
                givens_decompose(phase_normalize_last_row(random_orthonormal(c.nt, 1, rng))));
        AngleBits bits = quantize_angle_sequence(angles, q);
        CHECK(bits.length_bits == c.expect);
        CbrFrame f =
            make_cbr_frame(c.id, c.nt, 1, c.ng, c.n_vs, bits.bitstream, bits.length_bits);
        CHECK(f.payload_bits == standard_overhead_bits(c.nt, 1, c.n_vs, c.ng, q));
    }

    // EFNet rows: 25x4 = 100 and 30x4 = 120 feedback bits
    for (uint64_t bits : {100ull, 120ull}) {
        std::vector<uint8_t> payload((bits + 7) / 8, 0);
        CbrFrame f = make_cbr_frame(CbrSchemeId::Efnet, 3, 1, 1, 28, payload, bits);
        CHECK(f.payload_bits == bits);
    }
}

TEST_CASE("cbr: dump file round trip") {
    AngleBits b1 = t0_payload(3, 28, 1, 94);
    AngleBits b2 = t0_payload(2, 52, 4, 95);
    std::vector<CbrFrame> frames = {
        make_cbr_frame(CbrSchemeId::T0, 3, 1, 1, 28, b1.bitstream, b1.length_bits),
        make_cbr_frame(CbrSchemeId::T0, 2, 1, 4, 52, b2.bitstream, b2.length_bits),
    };
    const std::string path =
        (std::filesystem::temp_directory_path() / "csifb_test_cbr.bin").string();
    write_cbr_dump(frames, path);
    auto back = read_cbr_dump(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].payload == frames[0].payload);
    CHECK(back[1].n_vs == 52);
    CHECK(back[1].ng == 4);
    CHECK(back[1].payload_bits == 156);
    std::filesystem::remove(path);
}
