#include "csifb/vimage.hpp"

#include <algorithm>
#include <cmath>

#include "csifb/svd.hpp"

namespace csifb {

double vimage_raw_max_abs(const std::vector<ComplexMatrix>& v_seq) {
    double m = 0;
    for (const auto& v : v_seq)
        for (const auto& z : v.entries())
            m = std::max({m, std::abs(z.real()), std::abs(z.imag())});
    return m;
}

VImage vimage_from_v_seq(const std::vector<ComplexMatrix>& v_seq, std::optional<double> scale) {
    if (v_seq.empty()) throw InvalidInputError("vimage: empty subcarrier sequence");
    const std::size_t nt = v_seq.front().rows();
    const std::size_t ns = v_seq.front().cols();
    const std::size_t n_vs = v_seq.size();

    VImage img;
    img.scale = scale.value_or(vimage_raw_max_abs(v_seq));
    if (img.scale <= 0) img.scale = 1.0;
    img.data = Tensor(nt * ns, n_vs, 2);

    for (std::size_t k = 0; k < n_vs; ++k) {
        const auto& v = v_seq[k];
        if (v.rows() != nt || v.cols() != ns)
            throw InvalidInputError("vimage: inconsistent matrix shapes in sequence");
        for (std::size_t c = 0; c < ns; ++c) {
            for (std::size_t r = 0; r < nt; ++r) {
                const std::size_t row = c * nt + r;
                double re = v(r, c).real() / img.scale;
                double im = v(r, c).imag() / img.scale;
                if (re < -1.0 || re > 1.0) ++img.clipped;
                if (im < -1.0 || im > 1.0) ++img.clipped;
                img.data.at(row, k, 0) = std::clamp(re, -1.0, 1.0);
                img.data.at(row, k, 1) = std::clamp(im, -1.0, 1.0);
            }
        }
    }
    return img;
}

VImage build_vimage(const ChannelRealization& h_seq, std::size_t ns,
                    std::optional<double> scale) {
    std::vector<ComplexMatrix> v_seq;
    v_seq.reserve(h_seq.h_per_subcarrier.size());
    for (const auto& h : h_seq.h_per_subcarrier) {
        if (ns > std::min(h.rows(), h.cols()))
            throw InvalidInputError("build_vimage: ns exceeds min(nr, nt)");
        v_seq.push_back(extract_beamforming(svd(h), ns));
    }
    return vimage_from_v_seq(v_seq, scale);
}

std::vector<ComplexMatrix> v_seq_from_vimage(const VImage& img, std::size_t nt, std::size_t ns) {
    if (img.data.h != nt * ns || img.data.c != 2)
        throw InvalidInputError("vimage: shape does not match (nt, ns)");
    std::vector<ComplexMatrix> out;
    out.reserve(img.data.w);
    for (std::size_t k = 0; k < img.data.w; ++k) {
        ComplexMatrix v(nt, ns);
        for (std::size_t c = 0; c < ns; ++c)
            for (std::size_t r = 0; r < nt; ++r)
                v(r, c) = img.scale * cplx(img.data.at(c * nt + r, k, 0),
                                           img.data.at(c * nt + r, k, 1));
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace csifb
