#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "csifb/tensor.hpp"
#include "csifb/vimage.hpp"

namespace csifb {

struct EfnetConfig {
    std::size_t nt = 3, ns = 1, n_vs = 28;
    std::size_t m = 25;              // codeword length
    unsigned q = 4;                  // quantizer bits per codeword element
    std::size_t conv_channels = 16;  // trunk feature channels
    std::size_t tau = 2;             // attention reduction factor
    double lr = 1e-3, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    double lr_decay = 1.0;           // per-period multiplier; 1 = constant lr
    std::size_t lr_decay_every = 0;  // period in epochs; 0 = constant lr
    std::size_t epochs = 500, batch_size = 200;
    uint64_t seed = 1;
    bool quantize_in_training = false;  // straight-through estimator path
    double leaky_slope = 0.3;

    std::size_t height() const { return nt * ns; }
    std::size_t width() const { return n_vs; }
    uint64_t feedback_bits() const { return static_cast<uint64_t>(m) * q; }
    void validate() const;
};

// Offsets of every parameter tensor inside the flat parameter vector, in
// serialization order.
struct ParamGroup {
    std::string name;
    std::size_t offset = 0, size = 0;
};

std::vector<ParamGroup> parameter_groups(const EfnetConfig& cfg);
std::size_t parameter_count(const EfnetConfig& cfg);

struct EfnetModel {
    EfnetConfig config;
    double scale = 1.0;  // dataset normalization factor carried with the model
    std::vector<double> params;

    std::span<const double> group(const std::string& name) const;
    std::span<double> group(const std::string& name);
};

// Seeded fan-in-scaled uniform initialization, biases zero.
EfnetModel init_model(const EfnetConfig& cfg, double scale);

struct Codeword {
    std::vector<double> values;  // length M, each in [-1, 1]
};

struct CodewordBits {
    std::vector<uint8_t> bitstream;  // M indices of q bits, MSB-first
    uint64_t length_bits = 0;
    std::size_t clipped = 0;  // inputs outside [-1, 1], clipped before indexing
};

// Uniform mid-rise quantizer on [-1, 1] with 2^q levels and midpoint
// reconstruction; |dequantize(quantize(x)) - x| <= 2^-q on the legal range.
CodewordBits quantize_codeword(const Codeword& c, unsigned q);
Codeword dequantize_codeword(const CodewordBits& bits, unsigned q);
double codeword_midpoint(uint32_t index, unsigned q);

// Cached activations for one forward pass; reused across samples.
struct EfnetWork {
    Tensor input;
    Tensor enc_pre, enc_act;
    std::vector<double> cw_pre, cw, cw_fed;
    Tensor dec_in;
    Tensor din_pre, din_act;
    struct AttentionAct {
        std::vector<double> gap, fc1_pre, fc1_act, weights;
    };
    struct BlockAct {
        Tensor in;
        Tensor conv1_pre, conv1_act, att1_out;
        Tensor conv2_pre, conv2_act, att2_out;
        AttentionAct att1, att2;
    };
    std::vector<BlockAct> blocks;
    Tensor out_pre, output;
};

// Full encoder(+optional quantizer)+decoder pass; returns work.output.
const Tensor& efnet_forward(const EfnetModel& model, const Tensor& input, EfnetWork& work,
                            bool quantize_path = false);

// Reverse-mode pass for d(loss)/d(output) = d_out; accumulates parameter
// gradients (layout of parameter_groups) into grads.
void efnet_backward(const EfnetModel& model, const EfnetWork& work, const Tensor& d_out,
                    std::vector<double>& grads);

Codeword encoder_forward(const EfnetModel& model, const VImage& v);
VImage decoder_forward(const EfnetModel& model, const Codeword& c);

// Per-sample squared error summed over all entries. The training objective
// averages this over the batch.
double mse_loss(const VImage& vhat, const VImage& v);
double mse_loss(const Tensor& vhat, const Tensor& v);

struct AttentionParams {
    std::span<const double> fc1_w, fc1_b, fc2_w, fc2_b;
};

struct RefineBlockParams {
    std::span<const double> conv1_w, conv1_b, conv2_w, conv2_b;
    AttentionParams att1, att2;
};

AttentionParams attention_params(const EfnetModel& model, std::size_t block, std::size_t which);
RefineBlockParams refine_block_params(const EfnetModel& model, std::size_t block);

// Squeeze-and-excitation reweighting: global average pool -> C/tau
// bottleneck -> sigmoid channel weights multiplied onto the input.
Tensor channel_attention(const Tensor& f, const AttentionParams& p, double leaky_slope);

// conv3x3 -> lrelu -> attention -> conv3x3 -> lrelu -> attention, plus
// identity skip.
Tensor ca_refine_block(const Tensor& f, const RefineBlockParams& p, double leaky_slope);

}  // namespace csifb
