#include "csifb/schemes.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "csifb/angle_codec.hpp"
#include "csifb/binio.hpp"
#include "csifb/givens.hpp"
#include "csifb/grouping.hpp"
#include "csifb/parallel.hpp"
#include "csifb/svd.hpp"
#include "csifb/vimage.hpp"

namespace csifb {

Scheme scheme_standard(QuantType type, std::size_t ng) {
    Scheme s;
    s.kind = SchemeKind::Standard;
    s.quant = QuantScheme::of(type);
    s.ng = ng;
    s.label = (type == QuantType::Type0 ? "T0" : "T1");
    s.label += "G" + std::to_string(ng);
    return s;
}

Scheme scheme_standard_budget(QuantType type, uint64_t budget_bits) {
    Scheme s;
    s.kind = SchemeKind::StandardBudget;
    s.quant = QuantScheme::of(type);
    s.budget_bits = budget_bits;
    s.label = (type == QuantType::Type0 ? "T0B" : "T1B") + std::to_string(budget_bits);
    return s;
}

Scheme scheme_efnet(const EfnetModel& model) {
    Scheme s;
    s.kind = SchemeKind::Efnet;
    s.model = &model;
    s.label = "EFNet";
    return s;
}

Scheme scheme_perfect() { return Scheme{}; }

Scheme scheme_fixed(const std::string& label, uint64_t overhead_bits, double evm_db, double rho) {
    Scheme s;
    s.kind = SchemeKind::FixedReference;
    s.label = label;
    s.fixed_overhead_bits = overhead_bits;
    s.fixed_evm_db = evm_db;
    s.fixed_rho = rho;
    return s;
}

Scheme parse_scheme(const std::string& text, const EfnetModel* model) {
    if (text == "Perfect" || text == "perfect") return scheme_perfect();
    if (text == "EFNet" || text == "efnet") {
        if (!model) throw ConfigError("scheme EFNet requires a model (--model)");
        return scheme_efnet(*model);
    }
    if (text.rfind("fixed:", 0) == 0) {
        std::stringstream ss(text.substr(6));
        std::string label, bits, evm, rho;
        if (!std::getline(ss, label, ':') || !std::getline(ss, bits, ':') ||
            !std::getline(ss, evm, ':'))
            throw ConfigError("fixed scheme needs fixed:LABEL:BITS:EVM[:RHO]");
        Scheme s = scheme_fixed(label, std::stoull(bits), std::stod(evm));
        if (std::getline(ss, rho, ':')) s.fixed_rho = std::stod(rho);
        return s;
    }
    if (text.size() >= 2 && text[0] == 'T' && (text[1] == '0' || text[1] == '1')) {
        const QuantType type = text[1] == '0' ? QuantType::Type0 : QuantType::Type1;
        if (text.size() == 2) return scheme_standard(type, 1);
        if (text[2] == 'G') return scheme_standard(type, std::stoul(text.substr(3)));
        if (text[2] == 'B') return scheme_standard_budget(type, std::stoull(text.substr(3)));
    }
    throw ConfigError("unknown scheme: " + text);
}

EvalContext make_eval_context(std::vector<ChannelRealization> channels, std::size_t ns,
                              const ThroughputCfg& tcfg, const EvmCfg& ecfg, const McsTable& mcs,
                              unsigned threads) {
    if (channels.empty()) throw InvalidInputError("eval context: no test channels");
    EvalContext ctx;
    ctx.nt = channels.front().h_per_subcarrier.front().cols();
    ctx.nr = channels.front().h_per_subcarrier.front().rows();
    ctx.ns = ns;
    ctx.n_vs = channels.front().h_per_subcarrier.size();
    ctx.tcfg = tcfg;
    ctx.ecfg = ecfg;
    ctx.mcs = mcs;
    ctx.threads = threads;
    ctx.channels = std::move(channels);

    ctx.v_true.resize(ctx.channels.size());
    parallel_for(ctx.channels.size(), threads, [&](std::size_t i) {
        std::vector<ComplexMatrix> vs;
        vs.reserve(ctx.n_vs);
        for (const auto& h : ctx.channels[i].h_per_subcarrier)
            vs.push_back(extract_beamforming(svd(h), ns));
        ctx.v_true[i] = std::move(vs);
    });
    return ctx;
}

namespace {

// Keep every stride-th subcarrier, quantize, reconstruct, hold piecewise
// constant. stride == ng for the standard grouped schemes.
std::vector<ComplexMatrix> standard_chain(const std::vector<ComplexMatrix>& v_true,
                                          const QuantScheme& quant, std::size_t stride) {
    const std::size_t nt = v_true.front().rows();
    const std::size_t ns = v_true.front().cols();
    std::vector<ComplexMatrix> rebuilt;
    rebuilt.reserve((v_true.size() + stride - 1) / stride);
    for (std::size_t k = 0; k < v_true.size(); k += stride) {
        GivensAngles a = givens_decompose(v_true[k]);
        GivensAngles q = dequantize_angles(quantize_angles(a, quant), quant, nt, ns);
        rebuilt.push_back(givens_reconstruct(q));
    }
    std::vector<ComplexMatrix> out;
    out.reserve(v_true.size());
    for (std::size_t k = 0; k < v_true.size(); ++k) out.push_back(rebuilt[k / stride]);
    return out;
}

std::size_t budget_stride(const Scheme& s, std::size_t nt, std::size_t ns, std::size_t n_vs) {
    const uint64_t per = s.quant.bits_per_subcarrier(nt, ns);
    const uint64_t kept = std::max<uint64_t>(1, s.budget_bits / per);
    return (n_vs + kept - 1) / kept;
}

}  // namespace

std::vector<ComplexMatrix> reconstruct_v_seq(const Scheme& scheme,
                                             const std::vector<ComplexMatrix>& v_true) {
    const std::size_t nt = v_true.front().rows();
    const std::size_t ns = v_true.front().cols();
    switch (scheme.kind) {
        case SchemeKind::Perfect:
            return v_true;
        case SchemeKind::Standard:
            return standard_chain(v_true, scheme.quant, scheme.ng);
        case SchemeKind::StandardBudget:
            return standard_chain(v_true, scheme.quant,
                                  budget_stride(scheme, nt, ns, v_true.size()));
        case SchemeKind::Efnet: {
            const EfnetModel& m = *scheme.model;
            VImage img = vimage_from_v_seq(v_true, m.scale);
            Codeword c = encoder_forward(m, img);
            Codeword cq = dequantize_codeword(quantize_codeword(c, m.config.q), m.config.q);
            VImage rec = decoder_forward(m, cq);
            return v_seq_from_vimage(rec, nt, ns);
        }
        case SchemeKind::FixedReference:
            throw InvalidInputError("fixed reference rows have no reconstruction");
    }
    throw InvalidInputError("unreachable scheme kind");
}

SchemeResult evaluate_scheme(const Scheme& scheme, const EvalContext& ctx) {
    SchemeResult res;
    res.scheme = scheme.label;

    if (scheme.kind == SchemeKind::FixedReference) {
        res.overhead_bits = scheme.fixed_overhead_bits;
        res.rho = scheme.fixed_rho;
        res.evm_db = scheme.fixed_evm_db;
        const double gamma = gamma_of_evm(res.evm_db, ctx.mcs);
        res.gross_mbps = gross_throughput(gamma, ctx.tcfg) / 1e6;
        res.net_mbps =
            gamma > 0 ? net_throughput(res.gross_mbps * 1e6, res.overhead_bits, ctx.tcfg) / 1e6
                      : 0.0;
        return res;
    }

    switch (scheme.kind) {
        case SchemeKind::Standard:
            res.overhead_bits =
                standard_overhead_bits(ctx.nt, ctx.ns, ctx.n_vs, scheme.ng, scheme.quant);
            break;
        case SchemeKind::StandardBudget: {
            const std::size_t stride = budget_stride(scheme, ctx.nt, ctx.ns, ctx.n_vs);
            const uint64_t kept = (ctx.n_vs + stride - 1) / stride;
            res.overhead_bits = kept * scheme.quant.bits_per_subcarrier(ctx.nt, ctx.ns);
            break;
        }
        case SchemeKind::Efnet:
            res.overhead_bits = scheme.model->config.feedback_bits();
            break;
        case SchemeKind::Perfect:
            res.overhead_bits = 0;
            break;
        default:
            break;
    }

    const std::size_t n = ctx.channels.size();
    std::vector<double> rho(n);
    std::vector<std::size_t> skipped(n, 0);
    std::vector<EvmAccumulator> accs(n);
    parallel_for(n, ctx.threads, [&](std::size_t i) {
        const auto vhat = reconstruct_v_seq(scheme, ctx.v_true[i]);
        rho[i] = cosine_similarity(vhat, ctx.v_true[i], &skipped[i]);
        simulate_evm_accumulate(vhat, ctx.channels[i].h_per_subcarrier, ctx.ecfg, i, accs[i]);
    });

    double rho_sum = 0;
    EvmAccumulator total;
    for (std::size_t i = 0; i < n; ++i) {
        rho_sum += rho[i];
        res.warnings += skipped[i] + accs[i].skipped;
        total.err_energy += accs[i].err_energy;
        total.sig_energy += accs[i].sig_energy;
    }
    res.rho = rho_sum / static_cast<double>(n);
    res.evm_db = total.evm_db(ctx.ecfg.floor_db);

    const double gamma = gamma_of_evm(res.evm_db, ctx.mcs);
    const double gross = gross_throughput(gamma, ctx.tcfg);
    res.gross_mbps = gross / 1e6;
    res.net_mbps = gamma > 0 ? net_throughput(gross, res.overhead_bits, ctx.tcfg) / 1e6 : 0.0;
    return res;
}

void write_report_csv(const std::vector<SchemeResult>& rows, const std::string& path) {
    std::string out = "scheme,overhead_bits,rho,evm_db,gross_mbps,net_mbps\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%llu,%.6f,%.4f,%.6g,%.6g\n", r.scheme.c_str(),
                      static_cast<unsigned long long>(r.overhead_bits), r.rho, r.evm_db,
                      r.gross_mbps, r.net_mbps);
        out += buf;
    }
    write_file_bytes(path, std::vector<uint8_t>(out.begin(), out.end()));
}

std::vector<SchemeResult> read_report_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open for reading: " + path);
    std::vector<SchemeResult> rows;
    std::string line;
    if (!std::getline(f, line) || line != "scheme,overhead_bits,rho,evm_db,gross_mbps,net_mbps")
        throw FormatError("unexpected report header in " + path);
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        SchemeResult r;
        std::string cell;
        auto next = [&](const char* what) {
            if (!std::getline(ss, cell, ','))
                throw FormatError(std::string("missing column ") + what + " in " + path);
            return cell;
        };
        r.scheme = next("scheme");
        r.overhead_bits = std::stoull(next("overhead_bits"));
        r.rho = std::stod(next("rho"));
        r.evm_db = std::stod(next("evm_db"));
        r.gross_mbps = std::stod(next("gross_mbps"));
        r.net_mbps = std::stod(next("net_mbps"));
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace csifb
