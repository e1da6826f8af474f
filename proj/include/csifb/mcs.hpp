#pragma once

#include <string>
#include <vector>

namespace csifb {

struct McsEntry {
    double evm_threshold_db;  // required constellation error, more negative = better
    double gamma;             // information bits per subcarrier
    std::string label;
};

struct McsTable {
    std::vector<McsEntry> entries;  // thresholds strictly decreasing, gamma increasing

    void validate() const;
    static McsTable default_table();
};

// Gamma of the highest-rate entry whose requirement the EVM satisfies
// (evm_db <= threshold); 0 below the weakest threshold.
double gamma_of_evm(double evm_db, const McsTable& table);

}  // namespace csifb
