#include "csifb/givens.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace csifb {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHalfPi = 0.5 * std::numbers::pi;

double wrap_to_2pi(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0) a += kTwoPi;
    if (a >= kTwoPi) a = 0.0;
    return a;
}
}  // namespace

std::size_t givens_angle_count(std::size_t nt, std::size_t ns) {
    const std::size_t steps = std::min(ns, nt - 1);
    std::size_t n = 0;
    for (std::size_t i = 1; i <= steps; ++i) n += nt - i;
    return n;
}

GivensAngles givens_decompose(const ComplexMatrix& v) {
    const std::size_t nt = v.rows();
    const std::size_t ns = v.cols();
    if (nt < 2) throw InvalidInputError("givens_decompose: need at least 2 rows");
    if (ns > nt) throw InvalidInputError("givens_decompose: more columns than rows");
    for (std::size_t c = 0; c < ns; ++c) {
        const cplx last = v(nt - 1, c);
        if (std::abs(last.imag()) > 1e-8 || last.real() < -1e-8)
            throw InvalidInputError("givens_decompose: last row not real non-negative");
    }

    GivensAngles out;
    out.nt = nt;
    out.ns = ns;
    ComplexMatrix w = v;
    const std::size_t steps = std::min(ns, nt - 1);

    for (std::size_t i = 1; i <= steps; ++i) {
        // Phases of column i, rows i..Nt-1 (the last row stays untouched
        // and is real by the precondition). D_i^H makes them non-negative
        // real.
        for (std::size_t l = i; l <= nt - 1; ++l) {
            const cplx z = w(l - 1, i - 1);
            const double phi = wrap_to_2pi(std::atan2(z.imag(), z.real()));
            out.phi.push_back(phi);
            const cplx rot = std::polar(1.0, -phi);
            for (std::size_t c = 0; c < ns; ++c) w(l - 1, c) *= rot;
        }
        // Real rotations zeroing rows i+1..Nt of column i against the
        // diagonal entry. Both operands are non-negative real, so psi lands
        // in [0, pi/2].
        for (std::size_t l = i + 1; l <= nt; ++l) {
            const double x = w(i - 1, i - 1).real();
            const double y = w(l - 1, i - 1).real();
            double psi = std::atan2(y, x);
            psi = std::clamp(psi, 0.0, kHalfPi);
            out.psi.push_back(psi);
            const double c0 = std::cos(psi), s0 = std::sin(psi);
            for (std::size_t c = 0; c < ns; ++c) {
                const cplx a = w(i - 1, c), b = w(l - 1, c);
                w(i - 1, c) = c0 * a + s0 * b;
                w(l - 1, c) = -s0 * a + c0 * b;
            }
        }
    }
    return out;
}

ComplexMatrix givens_reconstruct(const GivensAngles& angles) {
    const std::size_t nt = angles.nt;
    const std::size_t ns = angles.ns;
    if (nt < 2 || ns < 1 || ns > nt)
        throw InvalidInputError("givens_reconstruct: bad (nt, ns)");
    const std::size_t expect = givens_angle_count(nt, ns);
    if (angles.phi.size() != expect || angles.psi.size() != expect)
        throw InvalidInputError("givens_reconstruct: angle count inconsistent with (nt, ns)");

    // Per-step offsets into the flat angle lists.
    const std::size_t steps = std::min(ns, nt - 1);
    std::vector<std::size_t> base(steps + 1, 0);
    for (std::size_t i = 1; i <= steps; ++i) base[i] = base[i - 1] + (nt - i);

    ComplexMatrix w = ComplexMatrix::identity_padded(nt, ns);
    // Factors applied right to left: within step i, G^T in descending l,
    // then D_i; steps in descending i.
    for (std::size_t i = steps; i >= 1; --i) {
        for (std::size_t l = nt; l >= i + 1; --l) {
            const double psi = angles.psi[base[i - 1] + (l - i - 1)];
            const double c0 = std::cos(psi), s0 = std::sin(psi);
            for (std::size_t c = 0; c < ns; ++c) {
                const cplx a = w(i - 1, c), b = w(l - 1, c);
                w(i - 1, c) = c0 * a - s0 * b;
                w(l - 1, c) = s0 * a + c0 * b;
            }
        }
        for (std::size_t l = i; l <= nt - 1; ++l) {
            const cplx rot = std::polar(1.0, angles.phi[base[i - 1] + (l - i)]);
            for (std::size_t c = 0; c < ns; ++c) w(l - 1, c) *= rot;
        }
    }
    return w;
}

}  // namespace csifb
