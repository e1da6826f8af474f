#pragma once

#include <cstddef>
#include <vector>

#include "csifb/errors.hpp"

namespace csifb {

// Dense (height, width, channels) tensor of doubles, channels innermost.
struct Tensor {
    std::size_t h = 0, w = 0, c = 0;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::size_t h_, std::size_t w_, std::size_t c_)
        : h(h_), w(w_), c(c_), data(h_ * w_ * c_, 0.0) {
        if (h_ < 1 || w_ < 1 || c_ < 1) throw InvalidInputError("tensor dims must be >= 1");
    }

    double& at(std::size_t y, std::size_t x, std::size_t ch) {
        return data[(y * w + x) * c + ch];
    }
    const double& at(std::size_t y, std::size_t x, std::size_t ch) const {
        return data[(y * w + x) * c + ch];
    }

    std::size_t size() const { return data.size(); }
    bool same_shape(const Tensor& o) const { return h == o.h && w == o.w && c == o.c; }
    void zero() { std::fill(data.begin(), data.end(), 0.0); }

    bool operator==(const Tensor&) const = default;
};

bool tensor_finite(const Tensor& t);

}  // namespace csifb
