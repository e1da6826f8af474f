#include "csifb/efnet_train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "csifb/binio.hpp"
#include "csifb/parallel.hpp"

namespace csifb {

namespace {
constexpr char kModelMagic[7] = {'E', 'F', 'N', 'E', 'T', '1', '\0'};
constexpr char kStateMagic[7] = {'E', 'F', 'N', 'T', 'S', '1', '\0'};
constexpr uint64_t kEpochStreamBase = 0xE000;  // + epoch index
constexpr std::size_t kGradChunks = 8;          // fixed-order reduction slots

void write_config(ByteWriter& w, const EfnetConfig& c) {
    w.u32(static_cast<uint32_t>(c.nt));
    w.u32(static_cast<uint32_t>(c.ns));
    w.u32(static_cast<uint32_t>(c.n_vs));
    w.u32(static_cast<uint32_t>(c.m));
    w.u32(c.q);
    w.u32(static_cast<uint32_t>(c.conv_channels));
    w.u32(static_cast<uint32_t>(c.tau));
    w.f64(c.lr);
    w.f64(c.beta1);
    w.f64(c.beta2);
    w.f64(c.eps);
    w.f64(c.lr_decay);
    w.u32(static_cast<uint32_t>(c.lr_decay_every));
    w.u32(static_cast<uint32_t>(c.epochs));
    w.u32(static_cast<uint32_t>(c.batch_size));
    w.u64(c.seed);
    w.u8(c.quantize_in_training ? 1 : 0);
    w.f64(c.leaky_slope);
}

EfnetConfig read_config(ByteReader& r) {
    EfnetConfig c;
    c.nt = r.u32();
    c.ns = r.u32();
    c.n_vs = r.u32();
    c.m = r.u32();
    c.q = r.u32();
    c.conv_channels = r.u32();
    c.tau = r.u32();
    c.lr = r.f64();
    c.beta1 = r.f64();
    c.beta2 = r.f64();
    c.eps = r.f64();
    c.lr_decay = r.f64();
    c.lr_decay_every = r.u32();
    c.epochs = r.u32();
    c.batch_size = r.u32();
    c.seed = r.u64();
    c.quantize_in_training = r.u8() != 0;
    c.leaky_slope = r.f64();
    return c;
}

void append_crc(ByteWriter& w, std::size_t payload_start) {
    w.u32(crc32(w.data().data() + payload_start, w.size() - payload_start));
}

void check_crc(const std::vector<uint8_t>& bytes, std::size_t payload_start, const char* what) {
    if (bytes.size() < payload_start + 4) throw FormatError("truncated payload", bytes.size());
    ByteReader tail(bytes.data() + bytes.size() - 4, 4);
    const uint32_t want = tail.u32();
    const uint32_t got = crc32(bytes.data() + payload_start, bytes.size() - payload_start - 4);
    if (want != got)
        throw FormatError(std::string("checksum mismatch in ") + what, bytes.size() - 4);
}
}  // namespace

void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state,
               const EfnetConfig& cfg) {
    if (params.size() != grads.size() || state.m.size() != params.size() ||
        state.v.size() != params.size())
        throw InvalidInputError("adam_step: size mismatch");
    ++state.t;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
}

TrainResult train(const EfnetConfig& cfg, const Dataset& data, const TrainOptions& opts) {
    cfg.validate();
    if (cfg.nt != data.nt || cfg.ns != data.ns || cfg.n_vs != data.n_vs)
        throw InvalidInputError("train: config dimensions disagree with dataset");
    if (data.split.train == 0 || data.split.val == 0)
        throw InvalidInputError("train: dataset has empty train or validation split");

    const std::size_t n_params = parameter_count(cfg);
    EfnetModel model;
    AdamState adam = AdamState::zeros(n_params);
    std::size_t first_epoch = 0;
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t best_epoch = 0;
    std::vector<double> best_params;
    std::vector<TrainLogRow> log;

    if (opts.resume) {
        const TrainingState& st = *opts.resume;
        if (parameter_count(st.cfg) != n_params || st.cfg.seed != cfg.seed)
            throw InvalidInputError("train: resume state does not match configuration");
        model.config = cfg;
        model.scale = st.scale;
        model.params = st.params;
        adam = st.adam;
        first_epoch = st.next_epoch;
        best_val = st.best_val;
        best_epoch = st.best_epoch;
        best_params = st.best_params;
        log = st.log;
    } else {
        model = init_model(cfg, data.scale);
        best_params = model.params;
    }

    const std::size_t n_train = data.split.train;
    const std::size_t n_val = data.split.val;

    std::vector<EfnetWork> works(kGradChunks);
    std::vector<std::vector<double>> gchunk(kGradChunks, std::vector<double>(n_params));
    std::vector<double> grads(n_params);
    std::vector<double> chunk_loss(kGradChunks);
    std::vector<Tensor> d_outs(kGradChunks);

    const unsigned threads = std::max(1u, opts.threads);
    const auto t0 = std::chrono::steady_clock::now();
    double wall_base = log.empty() ? 0.0 : log.back().wall_seconds;

    auto maybe_save_state = [&](std::size_t next_epoch) {
        if (opts.state_path.empty()) return;
        TrainingState st;
        st.cfg = cfg;
        st.scale = model.scale;
        st.next_epoch = next_epoch;
        st.params = model.params;
        st.adam = adam;
        st.best_val = best_val;
        st.best_epoch = best_epoch;
        st.best_params = best_params;
        st.log = log;
        save_training_state(st, opts.state_path);
    };

    for (std::size_t epoch = first_epoch; epoch < cfg.epochs; ++epoch) {
        EfnetConfig step_cfg = cfg;
        if (cfg.lr_decay_every > 0)
            step_cfg.lr =
                cfg.lr * std::pow(cfg.lr_decay, static_cast<double>(epoch / cfg.lr_decay_every));
        std::vector<std::size_t> order(n_train);
        std::iota(order.begin(), order.end(), 0);
        Rng shuffle_rng = Rng::stream(cfg.seed, kEpochStreamBase + epoch);
        shuffle_rng.shuffle(order);

        double train_loss_sum = 0;
        for (std::size_t start = 0; start < n_train; start += cfg.batch_size) {
            const std::size_t bn = std::min(cfg.batch_size, n_train - start);
            const double inv_b = 1.0 / static_cast<double>(bn);
            for (auto& g : gchunk) std::fill(g.begin(), g.end(), 0.0);
            std::fill(chunk_loss.begin(), chunk_loss.end(), 0.0);

            parallel_for(kGradChunks, threads, [&](std::size_t c) {
                const std::size_t lo = bn * c / kGradChunks;
                const std::size_t hi = bn * (c + 1) / kGradChunks;
                EfnetWork& work = works[c];
                Tensor& d_out = d_outs[c];
                for (std::size_t s = lo; s < hi; ++s) {
                    const Tensor& target = data.images[order[start + s]].data;
                    const Tensor& out =
                        efnet_forward(model, target, work, cfg.quantize_in_training);
                    if (d_out.data.size() != out.data.size()) d_out = Tensor(out.h, out.w, out.c);
                    double loss = 0;
                    for (std::size_t i = 0; i < out.data.size(); ++i) {
                        const double diff = out.data[i] - target.data[i];
                        loss += diff * diff;
                        d_out.data[i] = 2.0 * diff * inv_b;
                    }
                    chunk_loss[c] += loss;
                    efnet_backward(model, work, d_out, gchunk[c]);
                }
            });

            std::fill(grads.begin(), grads.end(), 0.0);
            for (std::size_t c = 0; c < kGradChunks; ++c) {
                train_loss_sum += chunk_loss[c];
                const auto& g = gchunk[c];
                for (std::size_t i = 0; i < n_params; ++i) grads[i] += g[i];
            }
            adam_step(model.params, grads, adam, step_cfg);
        }
        const double train_mse = train_loss_sum / static_cast<double>(n_train);

        std::vector<double> val_losses(n_val);
        parallel_for(n_val, threads, [&](std::size_t i) {
            thread_local EfnetWork vwork;
            const Tensor& target = data.images[n_train + i].data;
            const Tensor& out = efnet_forward(model, target, vwork, cfg.quantize_in_training);
            val_losses[i] = mse_loss(out, target);
        });
        const double val_mse =
            std::accumulate(val_losses.begin(), val_losses.end(), 0.0) / static_cast<double>(n_val);

        if (!std::isfinite(train_mse) || !std::isfinite(val_mse)) {
            maybe_save_state(epoch);
            throw NumericError("training diverged at epoch " + std::to_string(epoch) +
                               "; last good epoch " +
                               (log.empty() ? std::string("none")
                                            : std::to_string(log.back().epoch)));
        }

        const double wall =
            wall_base +
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        log.push_back({epoch, train_mse, val_mse, wall});
        if (opts.progress)
            (*opts.progress) << "epoch " << epoch << " train_mse " << train_mse << " val_mse "
                             << val_mse << '\n';

        if (val_mse < best_val) {
            best_val = val_mse;
            best_epoch = epoch;
            best_params = model.params;
        }
        if (opts.state_every > 0 && (epoch + 1) % opts.state_every == 0)
            maybe_save_state(epoch + 1);
    }
    maybe_save_state(cfg.epochs);

    TrainResult res;
    res.model.config = cfg;
    res.model.scale = model.scale;
    res.model.params = std::move(best_params);
    res.log = std::move(log);
    res.best_epoch = best_epoch;
    res.best_val = best_val;
    return res;
}

void save_model(const EfnetModel& model, const std::string& path) {
    ByteWriter w;
    w.magic(kModelMagic, sizeof kModelMagic);
    write_config(w, model.config);
    w.f64(model.scale);
    for (double p : model.params) w.f64(p);
    append_crc(w, sizeof kModelMagic);
    write_file_bytes(path, w.data());
}

EfnetModel load_model(const std::string& path) {
    const auto bytes = read_file_bytes(path);
    ByteReader r(bytes);
    r.expect_magic(kModelMagic, sizeof kModelMagic, "model checkpoint");
    check_crc(bytes, sizeof kModelMagic, "model checkpoint");
    EfnetModel m;
    m.config = read_config(r);
    m.config.validate();
    m.scale = r.f64();
    m.params.resize(parameter_count(m.config));
    for (auto& p : m.params) p = r.f64();
    return m;
}

void save_training_state(const TrainingState& st, const std::string& path) {
    ByteWriter w;
    w.magic(kStateMagic, sizeof kStateMagic);
    write_config(w, st.cfg);
    w.f64(st.scale);
    w.u32(static_cast<uint32_t>(st.next_epoch));
    w.u64(st.adam.t);
    for (double p : st.params) w.f64(p);
    for (double p : st.adam.m) w.f64(p);
    for (double p : st.adam.v) w.f64(p);
    w.f64(st.best_val);
    w.u32(static_cast<uint32_t>(st.best_epoch));
    for (double p : st.best_params) w.f64(p);
    w.u32(static_cast<uint32_t>(st.log.size()));
    for (const auto& row : st.log) {
        w.u32(static_cast<uint32_t>(row.epoch));
        w.f64(row.train_mse);
        w.f64(row.val_mse);
        w.f64(row.wall_seconds);
    }
    append_crc(w, sizeof kStateMagic);
    write_file_bytes(path, w.data());
}

TrainingState load_training_state(const std::string& path) {
    const auto bytes = read_file_bytes(path);
    ByteReader r(bytes);
    r.expect_magic(kStateMagic, sizeof kStateMagic, "training state");
    check_crc(bytes, sizeof kStateMagic, "training state");
    TrainingState st;
    st.cfg = read_config(r);
    st.cfg.validate();
    const std::size_t n = parameter_count(st.cfg);
    st.scale = r.f64();
    st.next_epoch = r.u32();
    st.adam.t = r.u64();
    st.params.resize(n);
    for (auto& p : st.params) p = r.f64();
    st.adam.m.resize(n);
    for (auto& p : st.adam.m) p = r.f64();
    st.adam.v.resize(n);
    for (auto& p : st.adam.v) p = r.f64();
    st.best_val = r.f64();
    st.best_epoch = r.u32();
    st.best_params.resize(n);
    for (auto& p : st.best_params) p = r.f64();
    st.log.resize(r.u32());
    for (auto& row : st.log) {
        row.epoch = r.u32();
        row.train_mse = r.f64();
        row.val_mse = r.f64();
        row.wall_seconds = r.f64();
    }
    return st;
}

void write_training_log_csv(const std::vector<TrainLogRow>& log, const std::string& path) {
    std::string out = "epoch,train_mse,val_mse,wall_seconds\n";
    char buf[128];
    for (const auto& row : log) {
        std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g,%.3f\n", row.epoch, row.train_mse,
                      row.val_mse, row.wall_seconds);
        out += buf;
    }
    write_file_bytes(path, std::vector<uint8_t>(out.begin(), out.end()));
}

}  // namespace csifb
