#include "csifb/grouping.hpp"

#include "csifb/errors.hpp"

namespace csifb {

std::vector<ComplexMatrix> group_subcarriers(const std::vector<ComplexMatrix>& v_list,
                                             std::size_t ng) {
    if (ng != 1 && ng != 2 && ng != 4) throw InvalidInputError("ng must be 1, 2 or 4");
    std::vector<ComplexMatrix> out;
    out.reserve((v_list.size() + ng - 1) / ng);
    for (std::size_t k = 0; k < v_list.size(); k += ng) out.push_back(v_list[k]);
    return out;
}

std::vector<ComplexMatrix> expand_groups(const std::vector<ComplexMatrix>& v_grouped,
                                         std::size_t ng, std::size_t total) {
    if (ng < 1) throw InvalidInputError("ng must be >= 1");
    if (v_grouped.size() != (total + ng - 1) / ng)
        throw FramingError("grouped sequence length inconsistent with (ng, total)");
    std::vector<ComplexMatrix> out;
    out.reserve(total);
    for (std::size_t k = 0; k < total; ++k) out.push_back(v_grouped[k / ng]);
    return out;
}

}  // namespace csifb
