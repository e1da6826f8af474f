#include "csifb/mcs.hpp"

#include "csifb/errors.hpp"

namespace csifb {

void McsTable::validate() const {
    if (entries.empty()) throw InvalidInputError("mcs table is empty");
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (!(entries[i].evm_threshold_db < entries[i - 1].evm_threshold_db))
            throw InvalidInputError("mcs thresholds must be strictly decreasing");
        if (!(entries[i].gamma > entries[i - 1].gamma))
            throw InvalidInputError("mcs gammas must be strictly increasing");
    }
}

McsTable McsTable::default_table() {
    // 802.11 allowed relative constellation error ladder.
    McsTable t;
    t.entries = {
        {-5.0, 0.5, "BPSK 1/2"},    {-10.0, 1.0, "QPSK 1/2"},  {-13.0, 1.5, "QPSK 3/4"},
        {-16.0, 2.0, "16-QAM 1/2"}, {-19.0, 3.0, "16-QAM 3/4"}, {-22.0, 4.0, "64-QAM 2/3"},
        {-25.0, 4.5, "64-QAM 3/4"}, {-27.0, 5.0, "64-QAM 5/6"},
    };
    return t;
}

double gamma_of_evm(double evm_db, const McsTable& table) {
    table.validate();
    double best = 0.0;
    for (const auto& e : table.entries)
        if (evm_db <= e.evm_threshold_db && e.gamma > best) best = e.gamma;
    return best;
}

}  // namespace csifb
