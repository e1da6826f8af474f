#include "csifb/tensor.hpp"

#include <cmath>

namespace csifb {

bool tensor_finite(const Tensor& t) {
    for (double v : t.data)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace csifb
