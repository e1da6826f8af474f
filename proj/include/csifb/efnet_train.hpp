#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "csifb/dataset.hpp"
#include "csifb/efnet.hpp"

namespace csifb {

struct AdamState {
    std::vector<double> m, v;
    uint64_t t = 0;

    static AdamState zeros(std::size_t n) { return {std::vector<double>(n), std::vector<double>(n), 0}; }
};

// One bias-corrected Adam update; increments state.t.
void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state,
               const EfnetConfig& cfg);

struct TrainLogRow {
    std::size_t epoch = 0;
    double train_mse = 0, val_mse = 0, wall_seconds = 0;
};

struct TrainResult {
    EfnetModel model;  // parameters from the best-validation epoch
    std::vector<TrainLogRow> log;
    std::size_t best_epoch = 0;
    double best_val = 0;
};

// Mid-training snapshot sufficient to resume bit-exactly.
struct TrainingState {
    EfnetConfig cfg;
    double scale = 1.0;
    std::size_t next_epoch = 0;
    std::vector<double> params;
    AdamState adam;
    double best_val = 0;
    std::size_t best_epoch = 0;
    std::vector<double> best_params;
    std::vector<TrainLogRow> log;
};

struct TrainOptions {
    unsigned threads = 1;
    std::ostream* progress = nullptr;
    std::optional<TrainingState> resume;
    std::string state_path;          // when set, a resumable snapshot is written
    std::size_t state_every = 0;     // every N epochs (0 = only at the end)
};

// End-to-end MSE training on the dataset's train split, validation each
// epoch, model selected at the best validation loss. The codeword
// quantizer is outside the loop unless cfg.quantize_in_training is set
// (straight-through gradients). Throws NumericError on divergence.
TrainResult train(const EfnetConfig& cfg, const Dataset& data, const TrainOptions& opts = {});

void save_model(const EfnetModel& model, const std::string& path);
EfnetModel load_model(const std::string& path);

void save_training_state(const TrainingState& st, const std::string& path);
TrainingState load_training_state(const std::string& path);

void write_training_log_csv(const std::vector<TrainLogRow>& log, const std::string& path);

}  // namespace csifb
