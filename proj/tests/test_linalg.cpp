#include <doctest.h>

#include <cmath>
#include <numbers>

#include "csifb/angle_codec.hpp"
#include "csifb/givens.hpp"
#include "csifb/grouping.hpp"
#include "csifb/svd.hpp"
#include "test_support.hpp"

using namespace csifb;
using namespace csifb::test;

namespace {
constexpr double kPi = std::numbers::pi;

double reconstruction_error(const ComplexMatrix& h, const SvdResult& s) {
    ComplexMatrix sig(s.u.cols(), s.v.cols());
    for (std::size_t i = 0; i < s.sigma.size(); ++i) sig(i, i) = s.sigma[i];
    return h.max_abs_diff(s.u * sig * s.v.hermitian());
}

double unitarity_error(const ComplexMatrix& q) {
    ComplexMatrix g = q.hermitian() * q;
    return g.max_abs_diff(ComplexMatrix::identity(q.cols()));
}

double vector_cosine(const ComplexMatrix& a, const ComplexMatrix& b) {
    return std::abs(column_dot(a, 0, b, 0)) / (column_norm(a, 0) * column_norm(b, 0));
}
}  // namespace

TEST_CASE("svd: identity and diagonal cases") {
    SvdResult s = svd(ComplexMatrix::identity(2));
    CHECK(s.sigma[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.sigma[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((s.u * s.v.hermitian()).max_abs_diff(ComplexMatrix::identity(2)) <= 1e-10);

    ComplexMatrix d(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    SvdResult sd = svd(d);
    CHECK(sd.sigma[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(sd.sigma[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("svd: random 3x2 against characteristic-polynomial oracle") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        ComplexMatrix h = random_matrix(3, 2, rng);
        SvdResult s = svd(h);
        CHECK(reconstruction_error(h, s) <= 1e-10);
        CHECK(unitarity_error(s.u) <= 1e-10);
        CHECK(unitarity_error(s.v) <= 1e-10);
        REQUIRE(s.sigma.size() == 2);
        CHECK(s.sigma[0] >= s.sigma[1]);
        CHECK(s.sigma[1] >= 0.0);

        auto lam = hermitian2_eigenvalues(h.hermitian() * h);
        CHECK(s.sigma[0] == doctest::Approx(std::sqrt(lam[0])).epsilon(1e-10));
        CHECK(s.sigma[1] == doctest::Approx(std::sqrt(std::max(0.0, lam[1]))).epsilon(1e-9));
    }
}

TEST_CASE("svd: wide matrices and full size range") {
    Rng rng(12);
    for (std::size_t m = 1; m <= 4; ++m) {
        for (std::size_t n = 1; n <= 4; ++n) {
            ComplexMatrix h = random_matrix(m, n, rng);
            SvdResult s = svd(h);
            CHECK(s.sigma.size() == std::min(m, n));
            CHECK(reconstruction_error(h, s) <= 1e-10);
            CHECK(unitarity_error(s.u) <= 1e-10);
            CHECK(unitarity_error(s.v) <= 1e-10);
        }
    }
}

TEST_CASE("svd: rank deficient input still yields unitary factors") {
    ComplexMatrix h(3, 2);
    h(0, 0) = 1.0;
    h(0, 1) = 2.0;  // second column parallel to first
    h(1, 0) = cplx(0, 1);
    h(1, 1) = cplx(0, 2);
    SvdResult s = svd(h);
    CHECK(s.sigma[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(unitarity_error(s.u) <= 1e-10);
    CHECK(unitarity_error(s.v) <= 1e-10);
    CHECK(reconstruction_error(h, s) <= 1e-10);
}

TEST_CASE("svd: deterministic and rejects bad input") {
    Rng rng(13);
    ComplexMatrix h = random_matrix(4, 3, rng);
    SvdResult a = svd(h);
    SvdResult b = svd(h);
    CHECK(a.u == b.u);
    CHECK(a.v == b.v);
    CHECK(a.sigma == b.sigma);

    ComplexMatrix bad(2, 2);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(svd(bad), InvalidInputError);
    CHECK_THROWS_AS(svd(ComplexMatrix(1, 1) = random_matrix(9, 1, rng)), InvalidInputError);
}

TEST_CASE("extract_beamforming: identity and pure-phase columns") {
    SvdResult s;
    s.u = ComplexMatrix::identity(3);
    s.sigma = {1, 1, 1};
    s.v = ComplexMatrix::identity(3);
    ComplexMatrix b = extract_beamforming(s, 1);
    CHECK(b.rows() == 3);
    CHECK(b.cols() == 1);
    CHECK(std::abs(b(0, 0) - 1.0) <= 1e-15);
    CHECK(std::abs(b(2, 0)) <= 1e-15);

    // Column [0, 0, e^{j pi/4}] must normalize to [0, 0, 1].
    ComplexMatrix v(3, 3);
    v(2, 0) = std::polar(1.0, kPi / 4);
    v(0, 1) = 1.0;
    v(1, 2) = 1.0;
    s.v = v;
    ComplexMatrix b2 = extract_beamforming(s, 1);
    CHECK(std::abs(b2(2, 0) - 1.0) <= 1e-15);

    CHECK_THROWS_AS(extract_beamforming(s, 4), InvalidInputError);
    CHECK_THROWS_AS(extract_beamforming(s, 0), InvalidInputError);
}

TEST_CASE("extract_beamforming: random unitary, two streams") {
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        SvdResult s;
        s.u = ComplexMatrix::identity(3);
        s.sigma = {1, 1, 1};
        s.v = random_orthonormal(3, 3, rng);
        ComplexMatrix b = extract_beamforming(s, 2);
        for (std::size_t c = 0; c < 2; ++c) {
            CHECK(std::abs(b(2, c).imag()) <= 1e-12);
            CHECK(b(2, c).real() >= -1e-12);
            CHECK(column_norm(b, c) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("givens: canonical basis vectors") {
    ComplexMatrix e1(3, 1);
    e1(0, 0) = 1.0;
    GivensAngles a = givens_decompose(e1);
    CHECK(a.phi.size() == 2);
    CHECK(a.psi.size() == 2);
    CHECK(givens_reconstruct(a).max_abs_diff(e1) <= 1e-12);

    ComplexMatrix e3(3, 1);
    e3(2, 0) = 1.0;
    GivensAngles a3 = givens_decompose(e3);
    CHECK(a3.psi[0] == doctest::Approx(0.0));
    CHECK(a3.psi[1] == doctest::Approx(kPi / 2));
    CHECK(givens_reconstruct(a3).max_abs_diff(e3) <= 1e-12);
}

TEST_CASE("givens: zero angles give the padded identity") {
    GivensAngles a;
    a.nt = 4;
    a.ns = 2;
    a.phi.assign(givens_angle_count(4, 2), 0.0);
    a.psi.assign(givens_angle_count(4, 2), 0.0);
    CHECK(givens_reconstruct(a).max_abs_diff(ComplexMatrix::identity_padded(4, 2)) <= 1e-15);
}

TEST_CASE("givens: closed form for the 2x1 case") {
    const double theta = 0.83, alpha = 0.41;
    GivensAngles a;
    a.nt = 2;
    a.ns = 1;
    a.phi = {theta};
    a.psi = {alpha};
    ComplexMatrix v = givens_reconstruct(a);
    CHECK(std::abs(v(0, 0) - std::cos(alpha) * std::polar(1.0, theta)) <= 1e-14);
    CHECK(std::abs(v(1, 0) - std::sin(alpha)) <= 1e-14);
}

TEST_CASE("givens: round-trip property over random beamforming matrices") {
    Rng rng(31);
    for (std::size_t nt = 2; nt <= 4; ++nt) {
        for (std::size_t ns : {std::size_t{1}, std::size_t{2}}) {
            if (ns > nt) continue;
            for (int trial = 0; trial < 200; ++trial) {
                ComplexMatrix v = phase_normalize_last_row(random_orthonormal(nt, ns, rng));
                GivensAngles a = givens_decompose(v);
                CHECK(a.phi.size() == givens_angle_count(nt, ns));
                CHECK(a.psi.size() == givens_angle_count(nt, ns));
                for (double p : a.phi) {
                    CHECK(p >= 0.0);
                    CHECK(p < 2 * kPi);
                }
                for (double p : a.psi) {
                    CHECK(p >= 0.0);
                    CHECK(p <= kPi / 2);
                }
                ComplexMatrix back = givens_reconstruct(a);
                CHECK(back.max_abs_diff(v) <= 1e-10);
            }
        }
    }
}

TEST_CASE("givens: rejects unnormalized last row and bad counts") {
    ComplexMatrix v(2, 1);
    v(0, 0) = std::numbers::sqrt2 / 2.0;
    v(1, 0) = cplx(0.0, std::numbers::sqrt2 / 2.0);
    CHECK_THROWS_AS(givens_decompose(v), InvalidInputError);

    ComplexMatrix neg(2, 1);
    neg(0, 0) = std::numbers::sqrt2 / 2.0;
    neg(1, 0) = -std::numbers::sqrt2 / 2.0;
    CHECK_THROWS_AS(givens_decompose(neg), InvalidInputError);

    GivensAngles bad;
    bad.nt = 3;
    bad.ns = 1;
    bad.phi = {0.0};
    bad.psi = {0.0, 0.0};
    CHECK_THROWS_AS(givens_reconstruct(bad), InvalidInputError);
}

TEST_CASE("angle quantizer: bit budgets match the standard") {
    CHECK(QuantScheme::type0().bits_per_subcarrier(3, 1) == 24);
    CHECK(QuantScheme::type1().bits_per_subcarrier(3, 1) == 32);
    CHECK(QuantScheme::type0().bits_per_subcarrier(2, 1) == 12);
    CHECK(QuantScheme::type1().bits_per_subcarrier(2, 1) == 16);

    // 28 subcarriers, Nt=3, Type 0 -> 672 bits; Nt=2, Type 1, 52 -> 832.
    Rng rng(41);
    std::vector<GivensAngles> seq28(28);
    for (auto& a : seq28)
        a = givens_decompose(phase_normalize_last_row(random_orthonormal(3, 1, rng)));
    CHECK(quantize_angle_sequence(seq28, QuantScheme::type0()).length_bits == 672);

    std::vector<GivensAngles> seq52(52);
    for (auto& a : seq52)
        a = givens_decompose(phase_normalize_last_row(random_orthonormal(2, 1, rng)));
    CHECK(quantize_angle_sequence(seq52, QuantScheme::type1()).length_bits == 832);
}

TEST_CASE("angle quantizer: midpoint arithmetic") {
    // phi = 0 with 7 bits -> index 0 -> midpoint pi/2^7.
    GivensAngles a;
    a.nt = 2;
    a.ns = 1;
    a.phi = {0.0};
    a.psi = {0.3};
    AngleBits bits = quantize_angles(a, QuantScheme::type0());
    CHECK(bits.length_bits == 12);
    GivensAngles back = dequantize_angles(bits, QuantScheme::type0(), 2, 1);
    CHECK(back.phi[0] == doctest::Approx(kPi / 128.0).epsilon(1e-12));
    CHECK(std::abs(back.phi[0] - a.phi[0]) <= kPi / 128.0 + 1e-15);

    // psi with 5 bits: max error (pi/2)/2^5/2 = pi/128.
    Rng rng(42);
    for (int trial = 0; trial < 500; ++trial) {
        GivensAngles g;
        g.nt = 2;
        g.ns = 1;
        g.phi = {rng.uniform(0.0, 2 * kPi)};
        g.psi = {rng.uniform(0.0, kPi / 2)};
        GivensAngles h0 = dequantize_angles(quantize_angles(g, QuantScheme::type0()),
                                            QuantScheme::type0(), 2, 1);
        GivensAngles h1 = dequantize_angles(quantize_angles(g, QuantScheme::type1()),
                                            QuantScheme::type1(), 2, 1);
        CHECK(std::abs(h0.psi[0] - g.psi[0]) <= kPi / 128.0 + 1e-15);
        CHECK(std::abs(h0.phi[0] - g.phi[0]) <= kPi / 128.0 + 1e-15);
        CHECK(std::abs(h1.psi[0] - g.psi[0]) <= kPi / 512.0 + 1e-15);
        CHECK(std::abs(h1.phi[0] - g.phi[0]) <= kPi / 512.0 + 1e-15);
    }
}

TEST_CASE("angle quantizer: T1 beats T0 on average and in bound") {
    Rng rng(45);
    double err0 = 0, err1 = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        GivensAngles g;
        g.nt = 2;
        g.ns = 1;
        g.phi = {rng.uniform(0.0, 2 * kPi)};
        g.psi = {rng.uniform(0.0, kPi / 2)};
        GivensAngles h0 = dequantize_angles(quantize_angles(g, QuantScheme::type0()),
                                            QuantScheme::type0(), 2, 1);
        GivensAngles h1 = dequantize_angles(quantize_angles(g, QuantScheme::type1()),
                                            QuantScheme::type1(), 2, 1);
        err0 += std::abs(h0.phi[0] - g.phi[0]) + std::abs(h0.psi[0] - g.psi[0]);
        err1 += std::abs(h1.phi[0] - g.phi[0]) + std::abs(h1.psi[0] - g.psi[0]);
    }
    CHECK(err1 < err0);
    // the half-step bound itself is strictly tighter for Type 1
    CHECK(kPi / 512.0 < kPi / 128.0);
}

TEST_CASE("angle quantizer: idempotent round-trip") {
    Rng rng(43);
    for (int trial = 0; trial < 100; ++trial) {
        GivensAngles g = givens_decompose(phase_normalize_last_row(random_orthonormal(3, 1, rng)));
        AngleBits b1 = quantize_angles(g, QuantScheme::type1());
        GivensAngles mid = dequantize_angles(b1, QuantScheme::type1(), 3, 1);
        AngleBits b2 = quantize_angles(mid, QuantScheme::type1());
        CHECK(b1.bitstream == b2.bitstream);
        CHECK(b1.length_bits == b2.length_bits);
    }

    AngleBits wrong;
    wrong.bitstream = {0, 0};
    wrong.length_bits = 16;
    CHECK_THROWS_AS(dequantize_angles(wrong, QuantScheme::type0(), 3, 1), FramingError);
}

TEST_CASE("angle quantizer: T1 round-trip keeps cosine similarity above 0.999") {
    Rng rng(44);
    double acc = 0;
    const int trials = 1000;
    for (int trial = 0; trial < trials; ++trial) {
        ComplexMatrix v = phase_normalize_last_row(random_orthonormal(3, 1, rng));
        GivensAngles g = givens_decompose(v);
        GivensAngles q = dequantize_angles(quantize_angles(g, QuantScheme::type1()),
                                           QuantScheme::type1(), 3, 1);
        acc += vector_cosine(givens_reconstruct(q), v);
    }
    CHECK(acc / trials >= 0.999);
}

TEST_CASE("grouping: keep-first semantics and overhead arithmetic") {
    Rng rng(51);
    std::vector<ComplexMatrix> vs(52);
    for (auto& v : vs) v = random_matrix(2, 1, rng);

    auto g4 = group_subcarriers(vs, 4);
    CHECK(g4.size() == 13);
    CHECK(g4[1] == vs[4]);
    // 13 kept subcarriers at 12 Type-0 bits each -> 156.
    CHECK(13 * QuantScheme::type0().bits_per_subcarrier(2, 1) == 156);

    auto g2 = group_subcarriers(vs, 2);
    CHECK(g2.size() == 26);
    CHECK(26 * QuantScheme::type1().bits_per_subcarrier(2, 1) == 416);

    CHECK(group_subcarriers(vs, 1) == vs);
    CHECK_THROWS_AS(group_subcarriers(vs, 3), InvalidInputError);
}

TEST_CASE("grouping: piecewise-constant expansion") {
    Rng rng(52);
    ComplexMatrix a = random_matrix(2, 1, rng), b = random_matrix(2, 1, rng);
    auto out = expand_groups({a, b}, 2, 4);
    REQUIRE(out.size() == 4);
    CHECK(out[0] == a);
    CHECK(out[1] == a);
    CHECK(out[2] == b);
    CHECK(out[3] == b);

    std::vector<ComplexMatrix> one = {a};
    CHECK(expand_groups(one, 1, 1) == one);
    CHECK_THROWS_AS(expand_groups({a, b}, 4, 4), FramingError);
}
