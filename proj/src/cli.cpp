#include "csifb/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "csifb/binio.hpp"
#include "csifb/cbr.hpp"
#include "csifb/dataset.hpp"
#include "csifb/efnet_train.hpp"
#include "csifb/givens.hpp"
#include "csifb/grouping.hpp"
#include "csifb/parallel.hpp"
#include "csifb/schemes.hpp"

namespace csifb {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.contains(it.key()))
            throw ConfigError("unknown config key '" + it.key() + "' in " + where);
}

template <typename T>
void get_to(const json& j, const char* key, T& out) {
    if (j.contains(key)) j.at(key).get_to(out);
}

json config_json(const RunConfig& c) {
    json j;
    j["channel"] = {{"nt", c.channel.nt},
                    {"nr", c.channel.nr},
                    {"n_fft", c.channel.n_fft},
                    {"n_vs", c.channel.n_vs},
                    {"n_taps", c.channel.n_taps},
                    {"delay_decay", c.channel.delay_decay},
                    {"seed", c.channel.seed}};
    j["dataset"] = {{"n_samples", c.n_samples}, {"ns", c.ns}};
    j["efnet"] = {{"m", c.efnet.m},
                  {"q", c.efnet.q},
                  {"conv_channels", c.efnet.conv_channels},
                  {"tau", c.efnet.tau},
                  {"lr", c.efnet.lr},
                  {"beta1", c.efnet.beta1},
                  {"beta2", c.efnet.beta2},
                  {"eps", c.efnet.eps},
                  {"lr_decay", c.efnet.lr_decay},
                  {"lr_decay_every", c.efnet.lr_decay_every},
                  {"epochs", c.efnet.epochs},
                  {"batch_size", c.efnet.batch_size},
                  {"seed", c.efnet.seed},
                  {"quantize_in_training", c.efnet.quantize_in_training},
                  {"leaky_slope", c.efnet.leaky_slope}};
    j["throughput"] = {{"n_cp", c.tput.n_cp},
                       {"sample_rate_hz", c.tput.sample_rate_hz},
                       {"packet_bytes", c.tput.packet_bytes},
                       {"t_fixed_us", c.tput.t_fixed_s * 1e6}};
    j["evm"] = {{"tx_power_dbm", c.evm.tx_power_dbm},
                {"noise_floor_dbm", c.evm.noise_floor_dbm},
                {"path_gain_db", c.evm.path_gain_db},
                {"n_symbols", c.evm.n_symbols},
                {"seed", c.evm.seed}};
    if (!c.schemes.empty()) j["schemes"] = c.schemes;
    if (!c.csv_path.empty()) j["csv"] = c.csv_path;
    json paths;
    if (!c.dataset_path.empty()) paths["dataset"] = c.dataset_path;
    if (!c.model_path.empty()) paths["model"] = c.model_path;
    if (!c.report_path.empty()) paths["report"] = c.report_path;
    if (!c.log_path.empty()) paths["log"] = c.log_path;
    if (!paths.empty()) j["paths"] = paths;
    if (c.threads != 0) j["threads"] = c.threads;
    return j;
}

void write_meta_sidecar(const RunConfig& cfg, const std::string& artifact_path,
                        const json& extra = json::object()) {
    json meta;
    meta["config"] = config_json(cfg);
    for (auto it = extra.begin(); it != extra.end(); ++it) meta[it.key()] = it.value();
    std::ofstream f(artifact_path + ".meta.json");
    if (!f) throw IoError("cannot write metadata sidecar for " + artifact_path);
    f << meta.dump(2) << '\n';
}

std::vector<ChannelRealization> test_channels(const RunConfig& cfg, const Dataset& data) {
    const auto perm = dataset_permutation(cfg.channel.seed, data.images.size());
    const std::size_t begin = data.test_begin();
    const std::size_t n_test = data.split.test;
    std::vector<ChannelRealization> out(n_test);
    if (!cfg.csv_path.empty()) {
        auto all = load_csi_csv(cfg.csv_path, cfg.channel.nr, cfg.channel.nt, data.n_vs);
        if (all.size() != data.images.size())
            throw ConfigError("CSV sample count does not match the dataset");
        for (std::size_t i = 0; i < n_test; ++i) out[i] = all[perm[begin + i]];
    } else {
        const unsigned threads = cfg.threads == 0 ? default_threads() : cfg.threads;
        parallel_for(n_test, threads, [&](std::size_t i) {
            out[i] = gen_channel(cfg.channel, perm[begin + i]);
        });
    }
    return out;
}

// The dataset must reproduce from this config; a mismatched seed or channel
// block would silently misalign the test split.
void check_dataset_consistency(const RunConfig& cfg, const Dataset& data,
                               const ChannelRealization& first_test_channel) {
    if (data.nt != cfg.channel.nt || data.nr != cfg.channel.nr || data.ns != cfg.ns ||
        data.n_vs != cfg.channel.n_vs)
        throw ConfigError("dataset dimensions disagree with the config");
    VImage rebuilt = build_vimage(first_test_channel, data.ns, data.scale);
    const Tensor& stored = data.images[data.test_begin()].data;
    for (std::size_t i = 0; i < stored.data.size(); ++i) {
        const double snapped = static_cast<double>(static_cast<float>(rebuilt.data.data[i]));
        if (std::abs(snapped - stored.data[i]) > 0)
            throw ConfigError("dataset does not reproduce from this config (seed mismatch?)");
    }
}

void print_table(const std::vector<SchemeResult>& rows, std::ostream& os) {
    os << std::left << std::setw(12) << "scheme" << std::right << std::setw(10) << "overhead"
       << std::setw(10) << "rho" << std::setw(10) << "evm_db" << std::setw(12) << "gross_mbps"
       << std::setw(10) << "net_mbps" << '\n';
    for (const auto& r : rows) {
        os << std::left << std::setw(12) << r.scheme << std::right << std::setw(10)
           << r.overhead_bits << std::setw(10) << std::fixed << std::setprecision(4) << r.rho
           << std::setw(10) << std::setprecision(2) << r.evm_db << std::setw(12)
           << std::setprecision(2) << r.gross_mbps << std::setw(10) << std::setprecision(2)
           << r.net_mbps << '\n';
        os.unsetf(std::ios::fixed);
    }
}

json mcs_json(const McsTable& t) {
    json arr = json::array();
    for (const auto& e : t.entries)
        arr.push_back({{"evm_threshold_db", e.evm_threshold_db},
                       {"gamma", e.gamma},
                       {"label", e.label}});
    return arr;
}

}  // namespace

RunConfig RunConfig::defaults() {
    RunConfig c;
    c.sync_derived();
    return c;
}

void RunConfig::sync_derived() {
    efnet.nt = channel.nt;
    efnet.ns = ns;
    efnet.n_vs = channel.n_vs;
    tput.n_vs = channel.n_vs;
    tput.n_fft = channel.n_fft;
}

void RunConfig::override_seed(uint64_t seed) {
    channel.seed = seed;
    efnet.seed = seed;
    evm.seed = seed;
}

RunConfig RunConfig::from_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config: " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    check_keys(j, {"channel", "dataset", "efnet", "throughput", "evm", "schemes", "csv", "paths",
                   "threads"},
               path);

    RunConfig c;
    try {
        if (j.contains("channel")) {
            const auto& s = j["channel"];
            check_keys(s, {"nt", "nr", "n_fft", "n_vs", "n_taps", "delay_decay", "seed"},
                       "channel");
            get_to(s, "nt", c.channel.nt);
            get_to(s, "nr", c.channel.nr);
            get_to(s, "n_fft", c.channel.n_fft);
            get_to(s, "n_vs", c.channel.n_vs);
            get_to(s, "n_taps", c.channel.n_taps);
            get_to(s, "delay_decay", c.channel.delay_decay);
            get_to(s, "seed", c.channel.seed);
        }
        if (j.contains("dataset")) {
            const auto& s = j["dataset"];
            check_keys(s, {"n_samples", "ns"}, "dataset");
            get_to(s, "n_samples", c.n_samples);
            get_to(s, "ns", c.ns);
        }
        if (j.contains("efnet")) {
            const auto& s = j["efnet"];
            check_keys(s,
                       {"m", "q", "conv_channels", "tau", "lr", "beta1", "beta2", "eps",
                        "lr_decay", "lr_decay_every", "epochs", "batch_size", "seed",
                        "quantize_in_training", "leaky_slope"},
                       "efnet");
            get_to(s, "m", c.efnet.m);
            get_to(s, "q", c.efnet.q);
            get_to(s, "conv_channels", c.efnet.conv_channels);
            get_to(s, "tau", c.efnet.tau);
            get_to(s, "lr", c.efnet.lr);
            get_to(s, "beta1", c.efnet.beta1);
            get_to(s, "beta2", c.efnet.beta2);
            get_to(s, "eps", c.efnet.eps);
            get_to(s, "lr_decay", c.efnet.lr_decay);
            get_to(s, "lr_decay_every", c.efnet.lr_decay_every);
            get_to(s, "epochs", c.efnet.epochs);
            get_to(s, "batch_size", c.efnet.batch_size);
            get_to(s, "seed", c.efnet.seed);
            get_to(s, "quantize_in_training", c.efnet.quantize_in_training);
            get_to(s, "leaky_slope", c.efnet.leaky_slope);
        }
        if (j.contains("throughput")) {
            const auto& s = j["throughput"];
            check_keys(s, {"n_cp", "sample_rate_hz", "packet_bytes", "t_fixed_us"}, "throughput");
            get_to(s, "n_cp", c.tput.n_cp);
            get_to(s, "sample_rate_hz", c.tput.sample_rate_hz);
            get_to(s, "packet_bytes", c.tput.packet_bytes);
            if (s.contains("t_fixed_us")) c.tput.t_fixed_s = s["t_fixed_us"].get<double>() * 1e-6;
        }
        if (j.contains("evm")) {
            const auto& s = j["evm"];
            check_keys(s, {"tx_power_dbm", "noise_floor_dbm", "path_gain_db", "n_symbols", "seed"},
                       "evm");
            get_to(s, "tx_power_dbm", c.evm.tx_power_dbm);
            get_to(s, "noise_floor_dbm", c.evm.noise_floor_dbm);
            get_to(s, "path_gain_db", c.evm.path_gain_db);
            get_to(s, "n_symbols", c.evm.n_symbols);
            get_to(s, "seed", c.evm.seed);
        }
        get_to(j, "schemes", c.schemes);
        get_to(j, "csv", c.csv_path);
        if (j.contains("paths")) {
            const auto& s = j["paths"];
            check_keys(s, {"dataset", "model", "report", "log"}, "paths");
            get_to(s, "dataset", c.dataset_path);
            get_to(s, "model", c.model_path);
            get_to(s, "report", c.report_path);
            get_to(s, "log", c.log_path);
        }
        get_to(j, "threads", c.threads);
    } catch (const json::exception& e) {
        throw ConfigError("config value error in " + path + ": " + e.what());
    }
    c.sync_derived();
    return c;
}

std::string RunConfig::to_json() const { return config_json(*this).dump(2); }

void RunConfig::validate() const {
    channel.validate();
    if (ns < 1 || ns > std::min(channel.nr, channel.nt))
        throw ConfigError("ns must be within 1..min(nr, nt)");
    if (efnet.nt != channel.nt || efnet.ns != ns || efnet.n_vs != channel.n_vs ||
        tput.n_vs != channel.n_vs || tput.n_fft != channel.n_fft)
        throw ConfigError("cross-field dimensions disagree (nt/ns/n_vs)");
    try {
        efnet.validate();
        tput.validate();
    } catch (const InvalidInputError& e) {
        throw ConfigError(e.what());
    }
    if (n_samples < 10) throw ConfigError("n_samples must be >= 10");
}

void cmd_gen_data(const RunConfig& cfg, const std::string& out, std::ostream& log) {
    cfg.validate();
    if (out.empty()) throw ConfigError("gen-data: no output path (--out)");
    const unsigned threads = cfg.threads == 0 ? default_threads() : cfg.threads;
    Dataset d;
    if (!cfg.csv_path.empty()) {
        auto reals = load_csi_csv(cfg.csv_path, cfg.channel.nr, cfg.channel.nt, cfg.channel.n_vs);
        d = build_dataset_from_realizations(reals, cfg.ns, cfg.channel.seed, threads);
    } else {
        d = build_dataset(cfg.channel, cfg.n_samples, cfg.ns, threads);
    }
    save_dataset(d, out);
    write_meta_sidecar(cfg, out, {{"clipped_entries", d.clipped_total}});
    log << "dataset " << out << " samples " << d.images.size() << " split " << d.split.train << "/"
        << d.split.val << "/" << d.split.test << " scale " << d.scale << '\n';
}

void cmd_train(const RunConfig& cfg, const std::string& dataset_path,
               const std::string& model_out, const std::string& log_csv,
               const TrainCliOptions& opts, std::ostream& log) {
    cfg.validate();
    if (dataset_path.empty()) throw ConfigError("train: no dataset path (--dataset)");
    if (model_out.empty()) throw ConfigError("train: no model output path (--out)");
    Dataset data = load_dataset(dataset_path);

    TrainOptions topts;
    topts.threads = cfg.threads == 0 ? default_threads() : cfg.threads;
    topts.progress = &log;
    topts.state_path = opts.state_path;
    topts.state_every = opts.state_every;
    if (!opts.resume_path.empty()) topts.resume = load_training_state(opts.resume_path);

    TrainResult res;
    try {
        res = train(cfg.efnet, data, topts);
    } catch (const NumericError&) {
        if (!log_csv.empty() && topts.resume) write_training_log_csv(topts.resume->log, log_csv);
        throw;
    }
    save_model(res.model, model_out);
    write_meta_sidecar(cfg, model_out,
                       {{"best_epoch", res.best_epoch}, {"best_val_mse", res.best_val}});
    if (!log_csv.empty()) {
        write_training_log_csv(res.log, log_csv);
        write_meta_sidecar(cfg, log_csv, {{"best_epoch", res.best_epoch}});
    }
    log << "model " << model_out << " best epoch " << res.best_epoch << " val_mse " << res.best_val
        << '\n';
}

void cmd_eval(const RunConfig& cfg, const std::string& dataset_path,
              const std::string& model_path, const std::vector<std::string>& scheme_names,
              const std::string& out_csv, const std::string& cbr_dump_path, std::ostream& log) {
    cfg.validate();
    if (cfg.ns != 1) throw ConfigError("eval: the metric chain is defined for ns = 1");
    if (dataset_path.empty()) throw ConfigError("eval: no dataset path (--dataset)");
    if (out_csv.empty()) throw ConfigError("eval: no report path (--out)");

    Dataset data = load_dataset(dataset_path);
    auto channels = test_channels(cfg, data);
    check_dataset_consistency(cfg, data, channels.front());

    EfnetModel model;
    bool have_model = false;
    if (!model_path.empty()) {
        model = load_model(model_path);
        have_model = true;
        if (model.config.nt != data.nt || model.config.ns != data.ns ||
            model.config.n_vs != data.n_vs)
            throw ConfigError("model dimensions disagree with the dataset");
        if (model.scale != data.scale)
            log << "warning: model scale " << model.scale << " differs from dataset scale "
                << data.scale << '\n';
    }

    std::vector<std::string> names = scheme_names.empty() ? cfg.schemes : scheme_names;
    if (names.empty()) {
        names = {"T0G1", "T0G2", "T0G4", "T1G1", "T1G2", "T1G4", "Perfect"};
        if (have_model) names.push_back("EFNet");
    }

    const unsigned threads = cfg.threads == 0 ? default_threads() : cfg.threads;
    EvalContext ctx = make_eval_context(std::move(channels), cfg.ns, cfg.tput, cfg.evm,
                                        McsTable::default_table(), threads);

    std::vector<SchemeResult> rows;
    std::vector<Scheme> schemes;
    for (const auto& name : names)
        schemes.push_back(parse_scheme(name, have_model ? &model : nullptr));
    for (const auto& s : schemes) {
        rows.push_back(evaluate_scheme(s, ctx));
        if (rows.back().warnings > 0)
            log << "warning: " << rows.back().warnings << " zero-norm vectors skipped for "
                << rows.back().scheme << '\n';
    }

    write_report_csv(rows, out_csv);
    write_meta_sidecar(cfg, out_csv,
                       {{"t_fixed_us", cfg.tput.t_fixed_s * 1e6},
                        {"mcs_table", mcs_json(ctx.mcs)},
                        {"test_samples", ctx.channels.size()}});
    print_table(rows, log);

    if (!cbr_dump_path.empty()) {
        std::vector<CbrFrame> frames;
        for (const auto& s : schemes) {
            if (s.kind == SchemeKind::Standard) {
                auto kept = group_subcarriers(ctx.v_true.front(), s.ng);
                std::vector<GivensAngles> angles;
                for (const auto& v : kept) angles.push_back(givens_decompose(v));
                AngleBits bits = quantize_angle_sequence(angles, s.quant);
                frames.push_back(make_cbr_frame(
                    s.quant.kind == QuantType::Type0 ? CbrSchemeId::T0 : CbrSchemeId::T1, ctx.nt,
                    ctx.ns, s.ng, ctx.n_vs, bits.bitstream, bits.length_bits));
            } else if (s.kind == SchemeKind::Efnet) {
                VImage img = vimage_from_v_seq(ctx.v_true.front(), model.scale);
                CodewordBits bits =
                    quantize_codeword(encoder_forward(model, img), model.config.q);
                frames.push_back(make_cbr_frame(CbrSchemeId::Efnet, ctx.nt, ctx.ns, 1, ctx.n_vs,
                                                bits.bitstream, bits.length_bits));
            }
        }
        write_cbr_dump(frames, cbr_dump_path);
        log << "cbr dump " << cbr_dump_path << " frames " << frames.size() << '\n';
    }
}

void cmd_compare(const std::vector<std::string>& report_paths, const std::string& out_csv,
                 std::ostream& log) {
    if (report_paths.empty()) throw ConfigError("compare: no report files given");

    std::vector<SchemeResult> merged;
    std::set<std::string> seen;
    double t_fixed_first = std::nan("");
    for (const auto& path : report_paths) {
        for (auto& row : read_report_csv(path)) {
            char key[512];
            std::snprintf(key, sizeof key, "%s|%llu|%.9g|%.9g|%.9g|%.9g", row.scheme.c_str(),
                          static_cast<unsigned long long>(row.overhead_bits), row.rho, row.evm_db,
                          row.gross_mbps, row.net_mbps);
            if (seen.insert(key).second) merged.push_back(std::move(row));
        }
        const std::string meta_path = path + ".meta.json";
        if (std::filesystem::exists(meta_path)) {
            std::ifstream f(meta_path);
            json meta;
            try {
                f >> meta;
            } catch (const json::exception&) {
                continue;
            }
            if (meta.contains("t_fixed_us")) {
                const double t = meta["t_fixed_us"].get<double>();
                if (std::isnan(t_fixed_first)) t_fixed_first = t;
                else if (std::abs(t - t_fixed_first) > 1e-9)
                    log << "warning: reports use different t_fixed (" << t_fixed_first
                        << " us vs " << t << " us)\n";
            }
        }
    }
    std::stable_sort(merged.begin(), merged.end(),
                     [](const SchemeResult& a, const SchemeResult& b) { return a.scheme < b.scheme; });

    print_table(merged, log);
    if (!out_csv.empty()) {
        std::string out = "scheme,overhead_bits,rho,net_mbps\n";
        char buf[256];
        for (const auto& r : merged) {
            std::snprintf(buf, sizeof buf, "%s,%llu,%.6f,%.6g\n", r.scheme.c_str(),
                          static_cast<unsigned long long>(r.overhead_bits), r.rho, r.net_mbps);
            out += buf;
        }
        write_file_bytes(out_csv, std::vector<uint8_t>(out.begin(), out.end()));
    }
}

}  // namespace csifb
