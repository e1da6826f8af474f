#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csifb/channel.hpp"
#include "csifb/vimage.hpp"

namespace csifb {

struct DatasetSplit {
    std::size_t train = 0, val = 0, test = 0;
};

// 8:1:1 by sample count, rounded to nearest with the remainder on train.
DatasetSplit split_counts(std::size_t n_samples);

// Shuffled sample order used to assign contiguous split blocks. Exposed so
// evaluation can map dataset positions back to packet indices.
std::vector<std::size_t> dataset_permutation(uint64_t seed, std::size_t n_samples);

// Normalized V-images in shuffled order. Entries are snapped to f32
// precision at build time so the in-memory data matches the file format
// bit for bit. All images share one scale computed over the training block.
struct Dataset {
    std::size_t nt = 0, nr = 0, ns = 0, n_fft = 0, n_vs = 0;
    double scale = 1.0;
    std::vector<VImage> images;
    DatasetSplit split;
    std::size_t clipped_total = 0;

    std::size_t test_begin() const { return split.train + split.val; }
};

Dataset build_dataset(const ChannelModelCfg& cfg, std::size_t n_samples, std::size_t ns,
                      unsigned threads = 1);

// Same shuffling/normalization/split pipeline over externally captured CSI.
Dataset build_dataset_from_realizations(const std::vector<ChannelRealization>& realizations,
                                        std::size_t ns, uint64_t seed, unsigned threads = 1);

void save_dataset(const Dataset& d, const std::string& path);
Dataset load_dataset(const std::string& path);

// CSV ingestion: one row per (sample, subcarrier), 2*nr*nt real columns
// ordered re,im per channel entry, rx-major then tx. Row count must be a
// multiple of n_vs.
std::vector<ChannelRealization> load_csi_csv(const std::string& path, std::size_t nr,
                                             std::size_t nt, std::size_t n_vs);

}  // namespace csifb
