#include "csifb/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "csifb/binio.hpp"
#include "csifb/parallel.hpp"

namespace csifb {

namespace {
constexpr char kMagic[7] = {'C', 'S', 'I', 'D', 'S', '1', '\0'};
constexpr uint64_t kShuffleStream = 0x5AFF1Eull;

double snap_f32(double v) { return static_cast<double>(static_cast<float>(v)); }

// Shuffle + per-sample raw images -> shared-scale normalized dataset.
Dataset assemble(std::vector<VImage> raw_images, std::size_t nt, std::size_t nr, std::size_t ns,
                 std::size_t n_fft, std::size_t n_vs) {
    Dataset d;
    d.nt = nt;
    d.nr = nr;
    d.ns = ns;
    d.n_fft = n_fft;
    d.n_vs = n_vs;
    d.split = split_counts(raw_images.size());

    double scale = 0;
    for (std::size_t i = 0; i < d.split.train; ++i)
        for (double v : raw_images[i].data.data) scale = std::max(scale, std::abs(v));
    if (scale <= 0) scale = 1.0;
    d.scale = scale;

    for (auto& img : raw_images) {
        img.scale = scale;
        img.clipped = 0;
        for (double& v : img.data.data) {
            double x = snap_f32(v / scale);
            if (x < -1.0 || x > 1.0) {
                ++img.clipped;
                x = std::clamp(x, -1.0, 1.0);
            }
            v = x;
        }
        d.clipped_total += img.clipped;
    }
    d.images = std::move(raw_images);
    return d;
}
}  // namespace

DatasetSplit split_counts(std::size_t n_samples) {
    if (n_samples < 10) throw InvalidInputError("dataset needs at least 10 samples");
    DatasetSplit s;
    s.val = (n_samples + 5) / 10;
    s.test = s.val;
    s.train = n_samples - s.val - s.test;
    return s;
}

std::vector<std::size_t> dataset_permutation(uint64_t seed, std::size_t n_samples) {
    std::vector<std::size_t> perm(n_samples);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng = Rng::stream(seed, kShuffleStream);
    rng.shuffle(perm);
    return perm;
}

Dataset build_dataset(const ChannelModelCfg& cfg, std::size_t n_samples, std::size_t ns,
                      unsigned threads) {
    cfg.validate();
    if (ns > std::min(cfg.nr, cfg.nt)) throw InvalidInputError("ns exceeds min(nr, nt)");
    auto perm = dataset_permutation(cfg.seed, n_samples);

    std::vector<VImage> raw(n_samples);
    parallel_for(n_samples, threads, [&](std::size_t i) {
        raw[i] = build_vimage(gen_channel(cfg, perm[i]), ns, 1.0);
    });
    return assemble(std::move(raw), cfg.nt, cfg.nr, ns, cfg.n_fft, cfg.n_vs);
}

Dataset build_dataset_from_realizations(const std::vector<ChannelRealization>& realizations,
                                        std::size_t ns, uint64_t seed, unsigned threads) {
    if (realizations.empty()) throw InvalidInputError("no realizations");
    const auto& h0 = realizations.front().h_per_subcarrier.front();
    const std::size_t nr = h0.rows(), nt = h0.cols();
    const std::size_t n_vs = realizations.front().h_per_subcarrier.size();
    auto perm = dataset_permutation(seed, realizations.size());

    std::vector<VImage> raw(realizations.size());
    parallel_for(realizations.size(), threads, [&](std::size_t i) {
        raw[i] = build_vimage(realizations[perm[i]], ns, 1.0);
    });
    return assemble(std::move(raw), nt, nr, ns, n_vs, n_vs);
}

void save_dataset(const Dataset& d, const std::string& path) {
    ByteWriter w;
    w.magic(kMagic, sizeof kMagic);
    w.u32(static_cast<uint32_t>(d.nt));
    w.u32(static_cast<uint32_t>(d.nr));
    w.u32(static_cast<uint32_t>(d.ns));
    w.u32(static_cast<uint32_t>(d.n_fft));
    w.u32(static_cast<uint32_t>(d.n_vs));
    w.u32(static_cast<uint32_t>(d.images.size()));
    w.f64(d.scale);
    for (const auto& img : d.images) {
        for (std::size_t plane = 0; plane < 2; ++plane)
            for (std::size_t y = 0; y < img.data.h; ++y)
                for (std::size_t x = 0; x < img.data.w; ++x)
                    w.f32(static_cast<float>(img.data.at(y, x, plane)));
    }
    w.u32(static_cast<uint32_t>(d.split.train));
    w.u32(static_cast<uint32_t>(d.split.val));
    w.u32(static_cast<uint32_t>(d.split.test));
    write_file_bytes(path, w.data());
}

Dataset load_dataset(const std::string& path) {
    const auto bytes = read_file_bytes(path);
    ByteReader r(bytes);
    r.expect_magic(kMagic, sizeof kMagic, "dataset file");
    Dataset d;
    d.nt = r.u32();
    d.nr = r.u32();
    d.ns = r.u32();
    d.n_fft = r.u32();
    d.n_vs = r.u32();
    const std::size_t n = r.u32();
    d.scale = r.f64();
    if (d.nt < 1 || d.ns < 1 || d.n_vs < 1 || !(d.scale > 0))
        throw FormatError("dataset header fields out of range", r.offset());

    d.images.resize(n);
    for (auto& img : d.images) {
        img.scale = d.scale;
        img.data = Tensor(d.nt * d.ns, d.n_vs, 2);
        for (std::size_t plane = 0; plane < 2; ++plane)
            for (std::size_t y = 0; y < img.data.h; ++y)
                for (std::size_t x = 0; x < img.data.w; ++x)
                    img.data.at(y, x, plane) = static_cast<double>(r.f32());
    }
    d.split.train = r.u32();
    d.split.val = r.u32();
    d.split.test = r.u32();
    if (d.split.train + d.split.val + d.split.test != n)
        throw FormatError("split sizes do not sum to sample count", r.offset());
    return d;
}

std::vector<ChannelRealization> load_csi_csv(const std::string& path, std::size_t nr,
                                             std::size_t nt, std::size_t n_vs) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open for reading: " + path);
    std::vector<ChannelRealization> out;
    ChannelRealization current;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        ComplexMatrix h(nr, nt);
        std::string cell;
        for (std::size_t r = 0; r < nr; ++r) {
            for (std::size_t c = 0; c < nt; ++c) {
                double re, im;
                if (!std::getline(ss, cell, ',') || (std::stringstream(cell) >> re).fail())
                    throw FormatError("bad CSV value at line " + std::to_string(lineno));
                if (!std::getline(ss, cell, ',') || (std::stringstream(cell) >> im).fail())
                    throw FormatError("bad CSV value at line " + std::to_string(lineno));
                h(r, c) = cplx(re, im);
            }
        }
        current.h_per_subcarrier.push_back(std::move(h));
        if (current.h_per_subcarrier.size() == n_vs) {
            current.subcarrier_indices.resize(n_vs);
            std::iota(current.subcarrier_indices.begin(), current.subcarrier_indices.end(), 0);
            out.push_back(std::move(current));
            current = ChannelRealization{};
        }
    }
    if (!current.h_per_subcarrier.empty())
        throw FormatError("CSV row count is not a multiple of n_vs");
    return out;
}

}  // namespace csifb
