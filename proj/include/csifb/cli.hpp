#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "csifb/channel.hpp"
#include "csifb/efnet.hpp"
#include "csifb/metrics.hpp"
#include "csifb/throughput.hpp"

namespace csifb {

// Experiment configuration: one structured file, overridable by flags.
struct RunConfig {
    ChannelModelCfg channel;
    std::size_t n_samples = 10000;
    std::size_t ns = 1;
    EfnetConfig efnet;  // nt/ns/n_vs are kept in sync with the channel block
    ThroughputCfg tput;
    EvmCfg evm;
    std::vector<std::string> schemes;  // used when no --scheme flags are given
    std::string csv_path;              // optional externally captured CSI
    std::string dataset_path, model_path, report_path, log_path;
    unsigned threads = 0;  // 0 = hardware concurrency

    static RunConfig defaults();
    static RunConfig from_json_file(const std::string& path);
    std::string to_json() const;
    void sync_derived();  // propagate channel dims into efnet/throughput blocks
    void validate() const;
    void override_seed(uint64_t seed);
};

struct TrainCliOptions {
    std::string resume_path;
    std::string state_path;
    std::size_t state_every = 0;
};

// Command bodies. They throw (ConfigError, IoError, NumericError, ...);
// the binary maps exception types onto exit codes.
void cmd_gen_data(const RunConfig& cfg, const std::string& out, std::ostream& log);
void cmd_train(const RunConfig& cfg, const std::string& dataset_path,
               const std::string& model_out, const std::string& log_csv,
               const TrainCliOptions& opts, std::ostream& log);
void cmd_eval(const RunConfig& cfg, const std::string& dataset_path,
              const std::string& model_path, const std::vector<std::string>& scheme_names,
              const std::string& out_csv, const std::string& cbr_dump_path, std::ostream& log);
void cmd_compare(const std::vector<std::string>& report_paths, const std::string& out_csv,
                 std::ostream& log);

}  // namespace csifb
