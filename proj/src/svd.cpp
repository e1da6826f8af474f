#include "csifb/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace csifb {

namespace {

constexpr double kOrthThreshold = 1e-14;
constexpr int kMaxSweeps = 60;

// One-sided Jacobi on a tall (rows >= cols) matrix: returns B with mutually
// orthogonal columns and the accumulated right rotations in v (so that
// input = B * v^H).
void one_sided_jacobi(ComplexMatrix& b, ComplexMatrix& v) {
    const std::size_t n = b.cols();
    v = ComplexMatrix::identity(n);
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double app = std::real(column_dot(b, p, b, p));
                const double aqq = std::real(column_dot(b, q, b, q));
                const cplx apq = column_dot(b, p, b, q);
                const double off = std::abs(apq);
                if (off <= kOrthThreshold * std::sqrt(app * aqq) || off == 0.0) continue;
                rotated = true;

                // Phase column q so the pair's Gram block becomes real
                // symmetric, then diagonalize it with a real rotation.
                const cplx phase = std::conj(apq) / off;
                const double theta = 0.5 * std::atan2(2.0 * off, app - aqq);
                const double c = std::cos(theta);
                const double s = std::sin(theta);

                for (std::size_t r = 0; r < b.rows(); ++r) {
                    const cplx bp = b(r, p), bq = phase * b(r, q);
                    b(r, p) = c * bp + s * bq;
                    b(r, q) = -s * bp + c * bq;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const cplx vp = v(r, p), vq = phase * v(r, q);
                    v(r, p) = c * vp + s * vq;
                    v(r, q) = -s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }
}

// Extend the first `have` orthonormal columns of u to a full unitary basis
// using canonical vectors in index order (deterministic).
void complete_basis(ComplexMatrix& u, std::size_t have) {
    const std::size_t m = u.rows();
    std::size_t next = have;
    for (std::size_t e = 0; e < m && next < m; ++e) {
        ComplexMatrix cand(m, 1);
        cand(e, 0) = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < next; ++k) {
                cplx proj = 0;
                for (std::size_t r = 0; r < m; ++r) proj += std::conj(u(r, k)) * cand(r, 0);
                for (std::size_t r = 0; r < m; ++r) cand(r, 0) -= proj * u(r, k);
            }
        }
        const double nrm = column_norm(cand, 0);
        if (nrm < 1e-6) continue;
        for (std::size_t r = 0; r < m; ++r) u(r, next) = cand(r, 0) / nrm;
        ++next;
    }
}

SvdResult svd_tall(const ComplexMatrix& h) {
    const std::size_t m = h.rows(), n = h.cols();
    ComplexMatrix b = h, v;
    one_sided_jacobi(b, v);

    std::vector<double> norms(n);
    for (std::size_t c = 0; c < n; ++c) norms[c] = column_norm(b, c);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t bb) { return norms[a] > norms[bb]; });

    SvdResult out;
    out.sigma.resize(n);
    out.u = ComplexMatrix(m, m);
    out.v = ComplexMatrix(n, n);
    const double sig_max = norms.empty() ? 0.0 : norms[order[0]];
    std::size_t u_cols = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = order[k];
        out.sigma[k] = norms[src];
        for (std::size_t r = 0; r < n; ++r) out.v(r, k) = v(r, src);
        if (norms[src] > 1e-14 * std::max(1.0, sig_max)) {
            for (std::size_t r = 0; r < m; ++r) out.u(r, k) = b(r, src) / norms[src];
            u_cols = k + 1;
        } else {
            out.sigma[k] = 0.0;
        }
    }
    complete_basis(out.u, u_cols);
    return out;
}

}  // namespace

SvdResult svd(const ComplexMatrix& h) {
    if (h.rows() < 1 || h.rows() > 8 || h.cols() < 1 || h.cols() > 8)
        throw InvalidInputError("svd: matrix must be between 1x1 and 8x8");
    if (!h.finite()) throw InvalidInputError("svd: non-finite input entry");

    if (h.rows() >= h.cols()) return svd_tall(h);

    // Wide case: decompose h^H and swap the factors.
    SvdResult t = svd_tall(h.hermitian());
    SvdResult out;
    out.u = std::move(t.v);
    out.v = std::move(t.u);
    out.sigma.assign(t.sigma.begin(), t.sigma.begin() + static_cast<long>(h.rows()));
    return out;
}

ComplexMatrix extract_beamforming(const SvdResult& s, std::size_t ns) {
    const std::size_t nt = s.v.rows();
    if (ns < 1 || ns > s.v.cols()) throw InvalidInputError("extract_beamforming: ns out of range");
    ComplexMatrix v(nt, ns);
    for (std::size_t c = 0; c < ns; ++c) {
        const cplx last = s.v(nt - 1, c);
        const double mag = std::abs(last);
        const cplx phase = mag > 0.0 ? std::conj(last) / mag : cplx{1.0, 0.0};
        for (std::size_t r = 0; r < nt; ++r) v(r, c) = s.v(r, c) * phase;
    }
    return v;
}

}  // namespace csifb
