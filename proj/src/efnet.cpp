#include "csifb/efnet.hpp"

#include <algorithm>
#include <cmath>

#include "csifb/binio.hpp"
#include "csifb/rng.hpp"

namespace csifb {

namespace {

// ------------------------------------------------------------------ layout

struct Layout {
    std::size_t h, w, cc, cr, m;
    std::size_t enc_conv_w, enc_conv_b;
    std::size_t enc_fc_w, enc_fc_b;
    std::size_t dec_fc_w, dec_fc_b;
    std::size_t dec_conv_in_w, dec_conv_in_b;
    struct Block {
        std::size_t conv1_w, conv1_b, att1_fc1_w, att1_fc1_b, att1_fc2_w, att1_fc2_b;
        std::size_t conv2_w, conv2_b, att2_fc1_w, att2_fc1_b, att2_fc2_w, att2_fc2_b;
    };
    Block blk[4];
    std::size_t dec_conv_out_w, dec_conv_out_b;
    std::size_t total;

    static Layout make(const EfnetConfig& cfg) {
        Layout L{};
        L.h = cfg.height();
        L.w = cfg.width();
        L.cc = cfg.conv_channels;
        L.cr = cfg.conv_channels / cfg.tau;
        L.m = cfg.m;
        std::size_t at = 0;
        auto take = [&](std::size_t n) {
            std::size_t o = at;
            at += n;
            return o;
        };
        L.enc_conv_w = take(3 * 5 * 2 * L.cc);
        L.enc_conv_b = take(L.cc);
        L.enc_fc_w = take(L.m * (L.cc * L.h * L.w));
        L.enc_fc_b = take(L.m);
        L.dec_fc_w = take((L.h * L.w * 2) * L.m);
        L.dec_fc_b = take(L.h * L.w * 2);
        L.dec_conv_in_w = take(3 * 3 * 2 * L.cc);
        L.dec_conv_in_b = take(L.cc);
        for (auto& b : L.blk) {
            b.conv1_w = take(3 * 3 * L.cc * L.cc);
            b.conv1_b = take(L.cc);
            b.att1_fc1_w = take(L.cr * L.cc);
            b.att1_fc1_b = take(L.cr);
            b.att1_fc2_w = take(L.cc * L.cr);
            b.att1_fc2_b = take(L.cc);
            b.conv2_w = take(3 * 3 * L.cc * L.cc);
            b.conv2_b = take(L.cc);
            b.att2_fc1_w = take(L.cr * L.cc);
            b.att2_fc1_b = take(L.cr);
            b.att2_fc2_w = take(L.cc * L.cr);
            b.att2_fc2_b = take(L.cc);
        }
        L.dec_conv_out_w = take(3 * 3 * L.cc * 2);
        L.dec_conv_out_b = take(2);
        L.total = at;
        return L;
    }
};

// -------------------------------------------------------------- primitives

void ensure(Tensor& t, std::size_t h, std::size_t w, std::size_t c) {
    if (t.h != h || t.w != w || t.c != c) t = Tensor(h, w, c);
}

void ensure(std::vector<double>& v, std::size_t n) {
    if (v.size() != n) v.assign(n, 0.0);
}

// Same-size zero-padded convolution, kernel layout (kh, kw, cin, cout)
// with cout contiguous.
void conv2d(const Tensor& in, const double* w, const double* b, std::size_t kh, std::size_t kw,
            std::size_t cout, Tensor& out) {
    const std::size_t H = in.h, W = in.w, cin = in.c;
    const std::size_t ph = kh / 2, pw = kw / 2;
    ensure(out, H, W, cout);
    for (std::size_t y = 0; y < H; ++y) {
        for (std::size_t x = 0; x < W; ++x) {
            double* o = &out.at(y, x, 0);
            for (std::size_t oc = 0; oc < cout; ++oc) o[oc] = b[oc];
            for (std::size_t dy = 0; dy < kh; ++dy) {
                const std::size_t iy = y + dy - ph;
                if (iy >= H) continue;  // unsigned wrap covers y + dy < ph
                for (std::size_t dx = 0; dx < kw; ++dx) {
                    const std::size_t ix = x + dx - pw;
                    if (ix >= W) continue;
                    const double* irow = &in.at(iy, ix, 0);
                    const double* wrow = w + (dy * kw + dx) * cin * cout;
                    for (std::size_t ic = 0; ic < cin; ++ic) {
                        const double a = irow[ic];
                        const double* wr = wrow + ic * cout;
                        for (std::size_t oc = 0; oc < cout; ++oc) o[oc] += a * wr[oc];
                    }
                }
            }
        }
    }
}

// din, when non-null, is accumulated into (not overwritten).
void conv2d_backward(const Tensor& in, const double* w, std::size_t kh, std::size_t kw,
                     std::size_t cout, const Tensor& dout, double* dw, double* db, Tensor* din) {
    const std::size_t H = in.h, W = in.w, cin = in.c;
    const std::size_t ph = kh / 2, pw = kw / 2;
    for (std::size_t y = 0; y < H; ++y) {
        for (std::size_t x = 0; x < W; ++x) {
            const double* dor = &dout.at(y, x, 0);
            for (std::size_t oc = 0; oc < cout; ++oc) db[oc] += dor[oc];
            for (std::size_t dy = 0; dy < kh; ++dy) {
                const std::size_t iy = y + dy - ph;
                if (iy >= H) continue;
                for (std::size_t dx = 0; dx < kw; ++dx) {
                    const std::size_t ix = x + dx - pw;
                    if (ix >= W) continue;
                    const double* irow = &in.at(iy, ix, 0);
                    double* dirow = din ? &din->at(iy, ix, 0) : nullptr;
                    const std::size_t base = (dy * kw + dx) * cin * cout;
                    for (std::size_t ic = 0; ic < cin; ++ic) {
                        const double a = irow[ic];
                        const double* wr = w + base + ic * cout;
                        double* dwr = dw + base + ic * cout;
                        double acc = 0;
                        for (std::size_t oc = 0; oc < cout; ++oc) {
                            dwr[oc] += a * dor[oc];
                            acc += wr[oc] * dor[oc];
                        }
                        if (dirow) dirow[ic] += acc;
                    }
                }
            }
        }
    }
}

void fc(const double* w, const double* b, const double* x, std::size_t nin, std::size_t nout,
        double* y) {
    for (std::size_t o = 0; o < nout; ++o) {
        const double* wr = w + o * nin;
        double acc = b[o];
        for (std::size_t i = 0; i < nin; ++i) acc += wr[i] * x[i];
        y[o] = acc;
    }
}

// dx, when non-null, is accumulated into.
void fc_backward(const double* w, const double* x, const double* dy, std::size_t nin,
                 std::size_t nout, double* dw, double* db, double* dx) {
    for (std::size_t o = 0; o < nout; ++o) {
        const double d = dy[o];
        db[o] += d;
        const double* wr = w + o * nin;
        double* dwr = dw + o * nin;
        for (std::size_t i = 0; i < nin; ++i) dwr[i] += d * x[i];
        if (dx)
            for (std::size_t i = 0; i < nin; ++i) dx[i] += wr[i] * d;
    }
}

void leaky_relu(const Tensor& pre, double slope, Tensor& out) {
    ensure(out, pre.h, pre.w, pre.c);
    for (std::size_t i = 0; i < pre.data.size(); ++i) {
        const double v = pre.data[i];
        out.data[i] = v > 0 ? v : slope * v;
    }
}

void leaky_relu_backward_inplace(const Tensor& pre, double slope, Tensor& d) {
    for (std::size_t i = 0; i < pre.data.size(); ++i)
        if (pre.data[i] <= 0) d.data[i] *= slope;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void attention_forward(const Tensor& f, const double* fc1_w, const double* fc1_b,
                       const double* fc2_w, const double* fc2_b, std::size_t cr, double slope,
                       EfnetWork::AttentionAct& act, Tensor& out) {
    const std::size_t C = f.c, n = f.h * f.w;
    ensure(act.gap, C);
    ensure(act.fc1_pre, cr);
    ensure(act.fc1_act, cr);
    ensure(act.weights, C);
    std::fill(act.gap.begin(), act.gap.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < C; ++c) act.gap[c] += f.data[i * C + c];
    for (auto& g : act.gap) g /= static_cast<double>(n);

    fc(fc1_w, fc1_b, act.gap.data(), C, cr, act.fc1_pre.data());
    for (std::size_t j = 0; j < cr; ++j) {
        const double v = act.fc1_pre[j];
        act.fc1_act[j] = v > 0 ? v : slope * v;
    }
    fc(fc2_w, fc2_b, act.fc1_act.data(), cr, C, act.weights.data());
    for (auto& wgt : act.weights) wgt = sigmoid(wgt);

    ensure(out, f.h, f.w, C);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < C; ++c) out.data[i * C + c] = f.data[i * C + c] * act.weights[c];
}

// df is accumulated into.
void attention_backward(const Tensor& f, const EfnetWork::AttentionAct& act, const double* fc1_w,
                        const double* fc2_w, std::size_t cr, double slope, const Tensor& d_out,
                        double* d_fc1_w, double* d_fc1_b, double* d_fc2_w, double* d_fc2_b,
                        Tensor& df) {
    const std::size_t C = f.c, n = f.h * f.w;
    std::vector<double> dwgt(C, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < C; ++c) {
            const double d = d_out.data[i * C + c];
            dwgt[c] += d * f.data[i * C + c];
            df.data[i * C + c] += d * act.weights[c];
        }

    // sigmoid
    std::vector<double> dp2(C);
    for (std::size_t c = 0; c < C; ++c) dp2[c] = dwgt[c] * act.weights[c] * (1.0 - act.weights[c]);

    std::vector<double> dz1(cr, 0.0);
    fc_backward(fc2_w, act.fc1_act.data(), dp2.data(), cr, C, d_fc2_w, d_fc2_b, dz1.data());
    for (std::size_t j = 0; j < cr; ++j)
        if (act.fc1_pre[j] <= 0) dz1[j] *= slope;

    std::vector<double> dg(C, 0.0);
    fc_backward(fc1_w, act.gap.data(), dz1.data(), C, cr, d_fc1_w, d_fc1_b, dg.data());

    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < C; ++c) df.data[i * C + c] += dg[c] * inv_n;
}

}  // namespace

// ----------------------------------------------------------------- config

void EfnetConfig::validate() const {
    if (nt < 1 || ns < 1 || n_vs < 1) throw InvalidInputError("efnet cfg: dims must be >= 1");
    if (m < 1) throw InvalidInputError("efnet cfg: codeword length must be >= 1");
    if (q < 1 || q > 24) throw InvalidInputError("efnet cfg: q must be in 1..24");
    if (tau < 1 || conv_channels % tau != 0)
        throw InvalidInputError("efnet cfg: tau must divide conv_channels");
    if (batch_size < 1 || epochs < 1)
        throw InvalidInputError("efnet cfg: epochs and batch_size must be >= 1");
    if (!(leaky_slope > 0.0 && leaky_slope < 1.0))
        throw InvalidInputError("efnet cfg: leaky slope must be in (0, 1)");
    if (!(lr > 0) || !(eps > 0) || beta1 < 0 || beta1 >= 1 || beta2 < 0 || beta2 >= 1)
        throw InvalidInputError("efnet cfg: bad optimizer hyperparameters");
    if (!(lr_decay > 0.0 && lr_decay <= 1.0))
        throw InvalidInputError("efnet cfg: lr_decay must be in (0, 1]");
}

std::vector<ParamGroup> parameter_groups(const EfnetConfig& cfg) {
    const Layout L = Layout::make(cfg);
    std::vector<ParamGroup> g;
    auto add = [&](const std::string& name, std::size_t off, std::size_t size) {
        g.push_back({name, off, size});
    };
    add("enc_conv_w", L.enc_conv_w, 3 * 5 * 2 * L.cc);
    add("enc_conv_b", L.enc_conv_b, L.cc);
    add("enc_fc_w", L.enc_fc_w, L.m * L.cc * L.h * L.w);
    add("enc_fc_b", L.enc_fc_b, L.m);
    add("dec_fc_w", L.dec_fc_w, L.h * L.w * 2 * L.m);
    add("dec_fc_b", L.dec_fc_b, L.h * L.w * 2);
    add("dec_conv_in_w", L.dec_conv_in_w, 3 * 3 * 2 * L.cc);
    add("dec_conv_in_b", L.dec_conv_in_b, L.cc);
    for (int b = 0; b < 4; ++b) {
        const auto& bl = L.blk[b];
        const std::string p = "block" + std::to_string(b) + "_";
        add(p + "conv1_w", bl.conv1_w, 3 * 3 * L.cc * L.cc);
        add(p + "conv1_b", bl.conv1_b, L.cc);
        add(p + "att1_fc1_w", bl.att1_fc1_w, L.cr * L.cc);
        add(p + "att1_fc1_b", bl.att1_fc1_b, L.cr);
        add(p + "att1_fc2_w", bl.att1_fc2_w, L.cc * L.cr);
        add(p + "att1_fc2_b", bl.att1_fc2_b, L.cc);
        add(p + "conv2_w", bl.conv2_w, 3 * 3 * L.cc * L.cc);
        add(p + "conv2_b", bl.conv2_b, L.cc);
        add(p + "att2_fc1_w", bl.att2_fc1_w, L.cr * L.cc);
        add(p + "att2_fc1_b", bl.att2_fc1_b, L.cr);
        add(p + "att2_fc2_w", bl.att2_fc2_w, L.cc * L.cr);
        add(p + "att2_fc2_b", bl.att2_fc2_b, L.cc);
    }
    add("dec_conv_out_w", L.dec_conv_out_w, 3 * 3 * L.cc * 2);
    add("dec_conv_out_b", L.dec_conv_out_b, 2);
    return g;
}

std::size_t parameter_count(const EfnetConfig& cfg) { return Layout::make(cfg).total; }

std::span<const double> EfnetModel::group(const std::string& name) const {
    for (const auto& g : parameter_groups(config))
        if (g.name == name) return {params.data() + g.offset, g.size};
    throw InvalidInputError("unknown parameter group: " + name);
}

std::span<double> EfnetModel::group(const std::string& name) {
    for (const auto& g : parameter_groups(config))
        if (g.name == name) return {params.data() + g.offset, g.size};
    throw InvalidInputError("unknown parameter group: " + name);
}

EfnetModel init_model(const EfnetConfig& cfg, double scale) {
    cfg.validate();
    EfnetModel model;
    model.config = cfg;
    model.scale = scale;
    model.params.assign(parameter_count(cfg), 0.0);

    const std::size_t hw = cfg.height() * cfg.width();
    Rng rng = Rng::stream(cfg.seed, 0xEF);
    for (const auto& g : parameter_groups(cfg)) {
        if (g.name.ends_with("_b")) continue;  // biases stay zero
        std::size_t fan_in = 0;
        if (g.name == "enc_conv_w") fan_in = 3 * 5 * 2;
        else if (g.name == "enc_fc_w") fan_in = cfg.conv_channels * hw;
        else if (g.name == "dec_fc_w") fan_in = cfg.m;
        else if (g.name == "dec_conv_in_w") fan_in = 3 * 3 * 2;
        else if (g.name == "dec_conv_out_w") fan_in = 3 * 3 * cfg.conv_channels;
        else if (g.name.ends_with("fc1_w")) fan_in = cfg.conv_channels;
        else if (g.name.ends_with("fc2_w")) fan_in = cfg.conv_channels / cfg.tau;
        else fan_in = 3 * 3 * cfg.conv_channels;  // block convs
        const double limit = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (std::size_t i = 0; i < g.size; ++i)
            model.params[g.offset + i] = rng.uniform(-limit, limit);
    }
    return model;
}

// -------------------------------------------------------------- quantizer

double codeword_midpoint(uint32_t index, unsigned q) {
    const double step = 2.0 / static_cast<double>(1u << q);
    return -1.0 + (static_cast<double>(index) + 0.5) * step;
}

CodewordBits quantize_codeword(const Codeword& c, unsigned q) {
    if (q < 1 || q > 24) throw InvalidInputError("quantize_codeword: q must be in 1..24");
    CodewordBits out;
    BitWriter w;
    const double step = 2.0 / static_cast<double>(1u << q);
    for (double v : c.values) {
        if (v < -1.0 || v > 1.0) {
            ++out.clipped;
            v = std::clamp(v, -1.0, 1.0);
        }
        auto idx = static_cast<long>(std::floor((v + 1.0) / step));
        idx = std::clamp(idx, 0l, static_cast<long>((1u << q) - 1));
        w.put(static_cast<uint32_t>(idx), q);
    }
    out.bitstream = w.bytes();
    out.length_bits = w.bit_length();
    return out;
}

Codeword dequantize_codeword(const CodewordBits& bits, unsigned q) {
    if (bits.length_bits % q != 0)
        throw FramingError("codeword bitstream length is not a multiple of q");
    BitReader r(bits.bitstream, bits.length_bits);
    Codeword c;
    c.values.reserve(bits.length_bits / q);
    for (uint64_t i = 0; i < bits.length_bits / q; ++i)
        c.values.push_back(codeword_midpoint(r.get(q), q));
    return c;
}

// ---------------------------------------------------------------- forward

const Tensor& efnet_forward(const EfnetModel& model, const Tensor& input, EfnetWork& work,
                            bool quantize_path) {
    const EfnetConfig& cfg = model.config;
    const Layout L = Layout::make(cfg);
    if (input.h != L.h || input.w != L.w || input.c != 2)
        throw InvalidInputError("efnet_forward: input shape mismatch");
    const double* P = model.params.data();

    work.input = input;
    conv2d(input, P + L.enc_conv_w, P + L.enc_conv_b, 3, 5, L.cc, work.enc_pre);
    leaky_relu(work.enc_pre, cfg.leaky_slope, work.enc_act);

    ensure(work.cw_pre, L.m);
    ensure(work.cw, L.m);
    fc(P + L.enc_fc_w, P + L.enc_fc_b, work.enc_act.data.data(), L.cc * L.h * L.w, L.m,
       work.cw_pre.data());
    for (std::size_t i = 0; i < L.m; ++i) work.cw[i] = std::tanh(work.cw_pre[i]);

    work.cw_fed = work.cw;
    if (quantize_path) {
        Codeword c{work.cw};
        work.cw_fed = dequantize_codeword(quantize_codeword(c, cfg.q), cfg.q).values;
    }

    ensure(work.dec_in, L.h, L.w, 2);
    fc(P + L.dec_fc_w, P + L.dec_fc_b, work.cw_fed.data(), L.m, L.h * L.w * 2,
       work.dec_in.data.data());

    conv2d(work.dec_in, P + L.dec_conv_in_w, P + L.dec_conv_in_b, 3, 3, L.cc, work.din_pre);
    leaky_relu(work.din_pre, cfg.leaky_slope, work.din_act);

    work.blocks.resize(4);
    const Tensor* cur = &work.din_act;
    for (int b = 0; b < 4; ++b) {
        auto& blk = work.blocks[b];
        const auto& bl = L.blk[b];
        blk.in = *cur;
        conv2d(blk.in, P + bl.conv1_w, P + bl.conv1_b, 3, 3, L.cc, blk.conv1_pre);
        leaky_relu(blk.conv1_pre, cfg.leaky_slope, blk.conv1_act);
        attention_forward(blk.conv1_act, P + bl.att1_fc1_w, P + bl.att1_fc1_b, P + bl.att1_fc2_w,
                          P + bl.att1_fc2_b, L.cr, cfg.leaky_slope, blk.att1, blk.att1_out);
        conv2d(blk.att1_out, P + bl.conv2_w, P + bl.conv2_b, 3, 3, L.cc, blk.conv2_pre);
        leaky_relu(blk.conv2_pre, cfg.leaky_slope, blk.conv2_act);
        attention_forward(blk.conv2_act, P + bl.att2_fc1_w, P + bl.att2_fc1_b, P + bl.att2_fc2_w,
                          P + bl.att2_fc2_b, L.cr, cfg.leaky_slope, blk.att2, blk.att2_out);
        // skip connection; att2_out now holds the block output
        for (std::size_t i = 0; i < blk.att2_out.data.size(); ++i)
            blk.att2_out.data[i] += blk.in.data[i];
        cur = &blk.att2_out;
    }

    conv2d(*cur, P + L.dec_conv_out_w, P + L.dec_conv_out_b, 3, 3, 2, work.out_pre);
    ensure(work.output, L.h, L.w, 2);
    for (std::size_t i = 0; i < work.out_pre.data.size(); ++i)
        work.output.data[i] = std::tanh(work.out_pre.data[i]);
    return work.output;
}

// --------------------------------------------------------------- backward

void efnet_backward(const EfnetModel& model, const EfnetWork& work, const Tensor& d_out,
                    std::vector<double>& grads) {
    const EfnetConfig& cfg = model.config;
    const Layout L = Layout::make(cfg);
    const double* P = model.params.data();
    double* G = grads.data();
    if (grads.size() != L.total) throw InvalidInputError("efnet_backward: bad gradient size");

    Tensor d_small(L.h, L.w, 2);
    for (std::size_t i = 0; i < d_small.data.size(); ++i) {
        const double o = work.output.data[i];
        d_small.data[i] = d_out.data[i] * (1.0 - o * o);
    }

    Tensor d_cur(L.h, L.w, L.cc);
    conv2d_backward(work.blocks[3].att2_out, P + L.dec_conv_out_w, 3, 3, 2, d_small,
                    G + L.dec_conv_out_w, G + L.dec_conv_out_b, &d_cur);

    Tensor d_t1(L.h, L.w, L.cc), d_t2(L.h, L.w, L.cc);
    for (int b = 3; b >= 0; --b) {
        const auto& blk = work.blocks[b];
        const auto& bl = L.blk[b];
        // d_cur holds the block-output gradient; the skip path passes it
        // straight to the block input, the refine path is chained below.
        d_t1.zero();
        attention_backward(blk.conv2_act, blk.att2, P + bl.att2_fc1_w, P + bl.att2_fc2_w, L.cr,
                           cfg.leaky_slope, d_cur, G + bl.att2_fc1_w, G + bl.att2_fc1_b,
                           G + bl.att2_fc2_w, G + bl.att2_fc2_b, d_t1);
        leaky_relu_backward_inplace(blk.conv2_pre, cfg.leaky_slope, d_t1);
        d_t2.zero();
        conv2d_backward(blk.att1_out, P + bl.conv2_w, 3, 3, L.cc, d_t1, G + bl.conv2_w,
                        G + bl.conv2_b, &d_t2);
        d_t1.zero();
        attention_backward(blk.conv1_act, blk.att1, P + bl.att1_fc1_w, P + bl.att1_fc2_w, L.cr,
                           cfg.leaky_slope, d_t2, G + bl.att1_fc1_w, G + bl.att1_fc1_b,
                           G + bl.att1_fc2_w, G + bl.att1_fc2_b, d_t1);
        leaky_relu_backward_inplace(blk.conv1_pre, cfg.leaky_slope, d_t1);
        conv2d_backward(blk.in, P + bl.conv1_w, 3, 3, L.cc, d_t1, G + bl.conv1_w, G + bl.conv1_b,
                        &d_cur);
    }

    leaky_relu_backward_inplace(work.din_pre, cfg.leaky_slope, d_cur);
    Tensor d_dec_in(L.h, L.w, 2);
    conv2d_backward(work.dec_in, P + L.dec_conv_in_w, 3, 3, L.cc, d_cur, G + L.dec_conv_in_w,
                    G + L.dec_conv_in_b, &d_dec_in);

    std::vector<double> d_cw(L.m, 0.0);
    fc_backward(P + L.dec_fc_w, work.cw_fed.data(), d_dec_in.data.data(), L.m, L.h * L.w * 2,
                G + L.dec_fc_w, G + L.dec_fc_b, d_cw.data());

    // The quantizer, when in the path, is treated as identity
    // (straight-through); then tanh.
    for (std::size_t i = 0; i < L.m; ++i) d_cw[i] *= 1.0 - work.cw[i] * work.cw[i];

    std::vector<double> d_enc(L.cc * L.h * L.w, 0.0);
    fc_backward(P + L.enc_fc_w, work.enc_act.data.data(), d_cw.data(), L.cc * L.h * L.w, L.m,
                G + L.enc_fc_w, G + L.enc_fc_b, d_enc.data());

    Tensor d_enc_t(L.h, L.w, L.cc);
    d_enc_t.data = std::move(d_enc);
    leaky_relu_backward_inplace(work.enc_pre, cfg.leaky_slope, d_enc_t);
    conv2d_backward(work.input, P + L.enc_conv_w, 3, 5, L.cc, d_enc_t, G + L.enc_conv_w,
                    G + L.enc_conv_b, nullptr);
}

// ------------------------------------------------------------- public ops

Codeword encoder_forward(const EfnetModel& model, const VImage& v) {
    const EfnetConfig& cfg = model.config;
    const Layout L = Layout::make(cfg);
    if (v.data.h != L.h || v.data.w != L.w || v.data.c != 2)
        throw InvalidInputError("encoder_forward: image shape mismatch");
    const double* P = model.params.data();

    EfnetWork w;
    conv2d(v.data, P + L.enc_conv_w, P + L.enc_conv_b, 3, 5, L.cc, w.enc_pre);
    leaky_relu(w.enc_pre, cfg.leaky_slope, w.enc_act);
    Codeword c;
    c.values.resize(L.m);
    fc(P + L.enc_fc_w, P + L.enc_fc_b, w.enc_act.data.data(), L.cc * L.h * L.w, L.m,
       c.values.data());
    for (auto& v2 : c.values) v2 = std::tanh(v2);
    return c;
}

VImage decoder_forward(const EfnetModel& model, const Codeword& c) {
    const EfnetConfig& cfg = model.config;
    const Layout L = Layout::make(cfg);
    if (c.values.size() != L.m) throw InvalidInputError("decoder_forward: codeword length");
    const double* P = model.params.data();

    EfnetWork w;
    ensure(w.dec_in, L.h, L.w, 2);
    fc(P + L.dec_fc_w, P + L.dec_fc_b, c.values.data(), L.m, L.h * L.w * 2, w.dec_in.data.data());
    conv2d(w.dec_in, P + L.dec_conv_in_w, P + L.dec_conv_in_b, 3, 3, L.cc, w.din_pre);
    leaky_relu(w.din_pre, cfg.leaky_slope, w.din_act);

    w.blocks.resize(4);
    const Tensor* cur = &w.din_act;
    for (int b = 0; b < 4; ++b) {
        auto& blk = w.blocks[b];
        const auto& bl = L.blk[b];
        blk.in = *cur;
        conv2d(blk.in, P + bl.conv1_w, P + bl.conv1_b, 3, 3, L.cc, blk.conv1_pre);
        leaky_relu(blk.conv1_pre, cfg.leaky_slope, blk.conv1_act);
        attention_forward(blk.conv1_act, P + bl.att1_fc1_w, P + bl.att1_fc1_b, P + bl.att1_fc2_w,
                          P + bl.att1_fc2_b, L.cr, cfg.leaky_slope, blk.att1, blk.att1_out);
        conv2d(blk.att1_out, P + bl.conv2_w, P + bl.conv2_b, 3, 3, L.cc, blk.conv2_pre);
        leaky_relu(blk.conv2_pre, cfg.leaky_slope, blk.conv2_act);
        attention_forward(blk.conv2_act, P + bl.att2_fc1_w, P + bl.att2_fc1_b, P + bl.att2_fc2_w,
                          P + bl.att2_fc2_b, L.cr, cfg.leaky_slope, blk.att2, blk.att2_out);
        for (std::size_t i = 0; i < blk.att2_out.data.size(); ++i)
            blk.att2_out.data[i] += blk.in.data[i];
        cur = &blk.att2_out;
    }

    conv2d(*cur, P + L.dec_conv_out_w, P + L.dec_conv_out_b, 3, 3, 2, w.out_pre);
    VImage out;
    out.scale = model.scale;
    out.data = Tensor(L.h, L.w, 2);
    for (std::size_t i = 0; i < w.out_pre.data.size(); ++i)
        out.data.data[i] = std::tanh(w.out_pre.data[i]);
    return out;
}

double mse_loss(const Tensor& vhat, const Tensor& v) {
    if (!vhat.same_shape(v)) throw InvalidInputError("mse_loss: shape mismatch");
    double acc = 0;
    for (std::size_t i = 0; i < v.data.size(); ++i) {
        const double d = vhat.data[i] - v.data[i];
        acc += d * d;
    }
    return acc;
}

double mse_loss(const VImage& vhat, const VImage& v) { return mse_loss(vhat.data, v.data); }

AttentionParams attention_params(const EfnetModel& model, std::size_t block, std::size_t which) {
    const std::string p = "block" + std::to_string(block) + "_att" + std::to_string(which) + "_";
    return {model.group(p + "fc1_w"), model.group(p + "fc1_b"), model.group(p + "fc2_w"),
            model.group(p + "fc2_b")};
}

RefineBlockParams refine_block_params(const EfnetModel& model, std::size_t block) {
    const std::string p = "block" + std::to_string(block) + "_";
    return {model.group(p + "conv1_w"), model.group(p + "conv1_b"), model.group(p + "conv2_w"),
            model.group(p + "conv2_b"), attention_params(model, block, 1),
            attention_params(model, block, 2)};
}

Tensor channel_attention(const Tensor& f, const AttentionParams& p, double leaky_slope) {
    const std::size_t cr = p.fc1_b.size();
    if (p.fc1_w.size() != cr * f.c || p.fc2_w.size() != f.c * cr || p.fc2_b.size() != f.c)
        throw InvalidInputError("channel_attention: parameter shapes do not match channels");
    EfnetWork::AttentionAct act;
    Tensor out;
    attention_forward(f, p.fc1_w.data(), p.fc1_b.data(), p.fc2_w.data(), p.fc2_b.data(), cr,
                      leaky_slope, act, out);
    return out;
}

Tensor ca_refine_block(const Tensor& f, const RefineBlockParams& p, double leaky_slope) {
    const std::size_t cc = f.c;
    Tensor pre1, act1, a1, pre2, act2, a2;
    conv2d(f, p.conv1_w.data(), p.conv1_b.data(), 3, 3, cc, pre1);
    leaky_relu(pre1, leaky_slope, act1);
    a1 = channel_attention(act1, p.att1, leaky_slope);
    conv2d(a1, p.conv2_w.data(), p.conv2_b.data(), 3, 3, cc, pre2);
    leaky_relu(pre2, leaky_slope, act2);
    a2 = channel_attention(act2, p.att2, leaky_slope);
    for (std::size_t i = 0; i < a2.data.size(); ++i) a2.data[i] += f.data[i];
    return a2;
}

}  // namespace csifb
