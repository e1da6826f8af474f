#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "csifb/channel.hpp"
#include "csifb/efnet.hpp"
#include "csifb/mcs.hpp"
#include "csifb/metrics.hpp"
#include "csifb/throughput.hpp"

namespace csifb {

enum class SchemeKind { Standard, StandardBudget, Efnet, Perfect, FixedReference };

struct Scheme {
    SchemeKind kind = SchemeKind::Perfect;
    std::string label = "Perfect";
    QuantScheme quant = QuantScheme::type0();
    std::size_t ng = 1;                 // Standard
    uint64_t budget_bits = 0;           // StandardBudget: spend at most this
    const EfnetModel* model = nullptr;  // Efnet (non-owning)
    uint64_t fixed_overhead_bits = 0;   // FixedReference (published rows)
    double fixed_evm_db = 0;
    double fixed_rho = std::nan("");
};

Scheme scheme_standard(QuantType type, std::size_t ng);
// Standard codec truncated to a bit budget: the largest equally spaced
// subset of subcarriers whose angle payload fits is fed back, the rest
// held piecewise constant.
Scheme scheme_standard_budget(QuantType type, uint64_t budget_bits);
Scheme scheme_efnet(const EfnetModel& model);
Scheme scheme_perfect();
Scheme scheme_fixed(const std::string& label, uint64_t overhead_bits, double evm_db,
                    double rho = std::nan(""));

// Accepted spellings: T0, T1, T0G2, T1G4, T0B100, EFNet, Perfect,
// fixed:LABEL:BITS:EVM[:RHO].
Scheme parse_scheme(const std::string& text, const EfnetModel* model);

struct SchemeResult {
    std::string scheme;
    uint64_t overhead_bits = 0;
    double rho = std::nan("");
    double evm_db = 0;
    double gross_mbps = 0;
    double net_mbps = 0;
    std::size_t warnings = 0;  // skipped zero-norm vectors etc., not serialized
};

// Shared evaluation inputs: the test-set channels, the true beamformers
// derived from them once, and the metric configuration.
struct EvalContext {
    std::vector<ChannelRealization> channels;
    std::vector<std::vector<ComplexMatrix>> v_true;
    std::size_t nt = 0, nr = 0, ns = 1, n_vs = 0;
    ThroughputCfg tcfg;
    EvmCfg ecfg;
    McsTable mcs = McsTable::default_table();
    unsigned threads = 1;
};

EvalContext make_eval_context(std::vector<ChannelRealization> channels, std::size_t ns,
                              const ThroughputCfg& tcfg, const EvmCfg& ecfg, const McsTable& mcs,
                              unsigned threads);

// Runs compress -> reconstruct -> rho -> EVM -> gamma -> gross -> net for
// one scheme over the whole context.
SchemeResult evaluate_scheme(const Scheme& scheme, const EvalContext& ctx);

// Per-sample reconstruction used by both evaluation and the CBR tooling.
std::vector<ComplexMatrix> reconstruct_v_seq(const Scheme& scheme,
                                             const std::vector<ComplexMatrix>& v_true);

void write_report_csv(const std::vector<SchemeResult>& rows, const std::string& path);
std::vector<SchemeResult> read_report_csv(const std::string& path);

}  // namespace csifb
