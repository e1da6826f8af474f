#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csifb/cli.hpp"
#include "csifb/errors.hpp"

namespace {

csifb::RunConfig load_config(const std::string& config_path, const std::string& seed_str,
                             unsigned threads) {
    csifb::RunConfig cfg = config_path.empty() ? csifb::RunConfig::defaults()
                                               : csifb::RunConfig::from_json_file(config_path);
    if (!seed_str.empty()) cfg.override_seed(std::stoull(seed_str));
    if (threads != 0) cfg.threads = threads;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wi-Fi CSI feedback workbench: 802.11 compressed beamforming baseline "
                 "and the EFNet autoencoder, with a throughput evaluation chain"};
    app.require_subcommand(1);

    std::string config_path, seed_str, out_path, model_path, dataset_path;
    unsigned threads = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--seed", seed_str, "override all seeds");
        cmd->add_option("--threads", threads, "worker threads (default: hardware)");
    };

    auto* gen = app.add_subcommand("gen-data", "generate (or ingest) a dataset file");
    add_common(gen);
    gen->add_option("--out", out_path, "dataset output path");
    std::string csv_path;
    gen->add_option("--csv", csv_path, "ingest externally captured CSI from CSV");
    std::uint64_t samples = 0;
    gen->add_option("--samples", samples, "sample count override");

    auto* train = app.add_subcommand("train", "train the autoencoder on a dataset");
    add_common(train);
    train->add_option("--dataset", dataset_path, "dataset file");
    train->add_option("--out", out_path, "model checkpoint output");
    std::string log_csv, resume_path, state_path;
    std::size_t state_every = 0, epochs = 0;
    train->add_option("--log", log_csv, "training log CSV output");
    train->add_option("--epochs", epochs, "epoch count override");
    train->add_option("--resume", resume_path, "resume from a training-state file");
    train->add_option("--save-state", state_path, "write a resumable training state");
    train->add_option("--state-every", state_every, "state snapshot period in epochs");

    auto* eval = app.add_subcommand("eval", "evaluate feedback schemes on the test split");
    add_common(eval);
    eval->add_option("--dataset", dataset_path, "dataset file");
    eval->add_option("--model", model_path, "EFNet checkpoint (enables the EFNet scheme)");
    eval->add_option("--out", out_path, "report CSV output");
    std::vector<std::string> schemes;
    eval->add_option("--scheme", schemes, "scheme to evaluate (repeatable)");
    std::string cbr_dump;
    eval->add_option("--cbr-dump", cbr_dump, "write first-sample CBR frames for inspection");

    auto* compare = app.add_subcommand("compare", "merge reports into one table");
    std::vector<std::string> reports;
    compare->add_option("reports", reports, "report CSV files")->required();
    compare->add_option("--out", out_path, "plot-ready CSV output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (compare->parsed()) {
            csifb::cmd_compare(reports, out_path, std::cout);
            return 0;
        }
        csifb::RunConfig cfg = load_config(config_path, seed_str, threads);
        if (gen->parsed()) {
            if (!csv_path.empty()) cfg.csv_path = csv_path;
            if (samples != 0) cfg.n_samples = samples;
            if (out_path.empty()) out_path = cfg.dataset_path;
            csifb::cmd_gen_data(cfg, out_path, std::cout);
        } else if (train->parsed()) {
            if (epochs != 0) cfg.efnet.epochs = epochs;
            if (dataset_path.empty()) dataset_path = cfg.dataset_path;
            if (out_path.empty()) out_path = cfg.model_path;
            if (log_csv.empty()) log_csv = cfg.log_path;
            csifb::TrainCliOptions topts{resume_path, state_path, state_every};
            csifb::cmd_train(cfg, dataset_path, out_path, log_csv, topts, std::cout);
        } else if (eval->parsed()) {
            if (dataset_path.empty()) dataset_path = cfg.dataset_path;
            if (model_path.empty()) model_path = cfg.model_path;
            if (out_path.empty()) out_path = cfg.report_path;
            csifb::cmd_eval(cfg, dataset_path, model_path, schemes, out_path, cbr_dump,
                            std::cout);
        }
        return 0;
    } catch (const csifb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const csifb::InvalidInputError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const csifb::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 3;
    } catch (const csifb::FormatError& e) {
        std::cerr << "format error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
