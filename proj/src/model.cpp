#include "imbalml/model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>

#include <nlohmann/json.hpp>

#include "imbalml/rng.hpp"

namespace imbalml {

using nlohmann::json;

namespace {
constexpr double kLayerNormEps = 1e-5;
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); }

double gelu_deriv(double x) {
    const double phi_cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
    const double phi_pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
    return phi_cdf + x * phi_pdf;
}
} // namespace

void ModelConfig::validate() const {
    if (vocab_size < 4) throw ArgumentError("model config: vocab_size must cover the special tokens");
    if (embed_dim < 1 || feedforward_dim < 1 || num_heads < 1 || num_classes < 1)
        throw ArgumentError("model config: dimensions must be >= 1");
    if (max_len < 2) throw ArgumentError("model config: max_len must be >= 2");
    if (embed_dim % num_heads != 0)
        throw ArgumentError("model config: embed_dim must be divisible by num_heads");
    if (dropout_rate < 0.0 || dropout_rate >= 1.0)
        throw ArgumentError("model config: dropout_rate must lie in [0, 1)");
}

void to_json(json& j, const ModelConfig& config) {
    j = json{{"vocab_size", config.vocab_size},
             {"embed_dim", config.embed_dim},
             {"num_heads", config.num_heads},
             {"num_layers", config.num_layers},
             {"feedforward_dim", config.feedforward_dim},
             {"max_len", config.max_len},
             {"num_classes", config.num_classes},
             {"dropout_rate", config.dropout_rate},
             {"pooling", config.pooling == Pooling::kCls ? "cls" : "mean"}};
}

void from_json(const json& j, ModelConfig& config) {
    j.at("vocab_size").get_to(config.vocab_size);
    j.at("embed_dim").get_to(config.embed_dim);
    j.at("num_heads").get_to(config.num_heads);
    j.at("num_layers").get_to(config.num_layers);
    j.at("feedforward_dim").get_to(config.feedforward_dim);
    j.at("max_len").get_to(config.max_len);
    j.at("num_classes").get_to(config.num_classes);
    j.at("dropout_rate").get_to(config.dropout_rate);
    const auto pooling = j.value("pooling", "cls");
    if (pooling == "cls") config.pooling = Pooling::kCls;
    else if (pooling == "mean") config.pooling = Pooling::kMean;
    else throw SchemaError("model config: unknown pooling '" + std::string(pooling) + "'");
}

namespace {

ModelParams make_structure(const ModelConfig& config) {
    config.validate();
    ModelParams p;
    p.config = config;
    const auto d = config.embed_dim;
    p.token_embedding = Matrix(config.vocab_size, d);
    p.position_embedding = Matrix(config.max_len, d);
    p.layers.resize(config.num_layers);
    for (auto& layer : p.layers) {
        layer.wq = layer.wk = layer.wv = layer.wo = Matrix(d, d);
        layer.bq = layer.bk = layer.bv = layer.bo = Matrix(1, d);
        layer.ln1_scale = layer.ln1_offset = Matrix(1, d);
        layer.ff_w1 = Matrix(d, config.feedforward_dim);
        layer.ff_b1 = Matrix(1, config.feedforward_dim);
        layer.ff_w2 = Matrix(config.feedforward_dim, d);
        layer.ff_b2 = Matrix(1, d);
        layer.ln2_scale = layer.ln2_offset = Matrix(1, d);
    }
    p.head_weight = Matrix(d, config.num_classes);
    p.head_bias = Matrix(1, config.num_classes);
    return p;
}

void fill_normal(Matrix& m, Rng& rng, double std_dev) {
    double* p = m.data();
    for (std::size_t i = 0; i < m.size(); ++i) p[i] = rng.normal() * std_dev;
}

void fill_xavier(Matrix& m, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    double* p = m.data();
    for (std::size_t i = 0; i < m.size(); ++i) p[i] = rng.uniform(-limit, limit);
}

void fill_const(Matrix& m, double v) {
    double* p = m.data();
    for (std::size_t i = 0; i < m.size(); ++i) p[i] = v;
}

// y = x * w + b, bias broadcast across rows
Matrix linear(const Matrix& x, const Matrix& w, const Matrix& b) {
    Matrix y = matmul(x, w);
    for (std::size_t r = 0; r < y.rows(); ++r) {
        double* row = y.row(r);
        const double* bias = b.row(0);
        for (std::size_t c = 0; c < y.cols(); ++c) row[c] += bias[c];
    }
    return y;
}

Matrix colsum(const Matrix& m) {
    Matrix s(1, m.cols());
    double* out = s.row(0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double* row = m.row(r);
        for (std::size_t c = 0; c < m.cols(); ++c) out[c] += row[c];
    }
    return s;
}

Matrix dropout_multipliers(std::size_t rows, std::size_t cols, std::uint64_t seed,
                           std::uint64_t site, double rate) {
    Matrix m(rows, cols);
    const double keep_scale = 1.0 / (1.0 - rate);
    double* p = m.data();
    for (std::size_t i = 0; i < m.size(); ++i)
        p[i] = stateless_keep(seed, site, i, rate) ? keep_scale : 0.0;
    return m;
}

struct LayerNormOut {
    Matrix out;
    LayerNormTrace trace;
};

LayerNormOut layer_norm(const Matrix& x, const Matrix& scale, const Matrix& offset) {
    const std::size_t n = x.cols();
    LayerNormOut result;
    result.out = Matrix(x.rows(), n);
    result.trace.xhat = Matrix(x.rows(), n);
    result.trace.inv_std.resize(x.rows());
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const double* row = x.row(r);
        double mean = 0.0;
        for (std::size_t c = 0; c < n; ++c) mean += row[c];
        mean *= inv_n;
        double var = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            const double dev = row[c] - mean;
            var += dev * dev;
        }
        var *= inv_n;
        const double inv_std = 1.0 / std::sqrt(var + kLayerNormEps);
        result.trace.inv_std[r] = inv_std;
        double* xhat = result.trace.xhat.row(r);
        double* out = result.out.row(r);
        const double* s = scale.row(0);
        const double* o = offset.row(0);
        for (std::size_t c = 0; c < n; ++c) {
            xhat[c] = (row[c] - mean) * inv_std;
            out[c] = s[c] * xhat[c] + o[c];
        }
    }
    return result;
}

// returns dx; accumulates parameter gradients
Matrix layer_norm_backward(const Matrix& dy, const LayerNormTrace& trace, const Matrix& scale,
                           Matrix& gscale, Matrix& goffset) {
    const std::size_t n = dy.cols();
    Matrix dx(dy.rows(), n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t r = 0; r < dy.rows(); ++r) {
        const double* grow = dy.row(r);
        const double* xhat = trace.xhat.row(r);
        const double* s = scale.row(0);
        double* gs = gscale.row(0);
        double* go = goffset.row(0);
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            const double dxhat = grow[c] * s[c];
            m1 += dxhat;
            m2 += dxhat * xhat[c];
            gs[c] += grow[c] * xhat[c];
            go[c] += grow[c];
        }
        m1 *= inv_n;
        m2 *= inv_n;
        const double inv_std = trace.inv_std[r];
        double* out = dx.row(r);
        for (std::size_t c = 0; c < n; ++c) {
            const double dxhat = grow[c] * s[c];
            out[c] = inv_std * (dxhat - m1 - xhat[c] * m2);
        }
    }
    return dx;
}

} // namespace

ModelParams init_params(const ModelConfig& config, std::uint64_t seed) {
    ModelParams p = make_structure(config);
    Rng rng(seed);
    fill_normal(p.token_embedding, rng, 0.02);
    fill_normal(p.position_embedding, rng, 0.02);
    for (auto& layer : p.layers) {
        fill_xavier(layer.wq, rng);
        fill_xavier(layer.wk, rng);
        fill_xavier(layer.wv, rng);
        fill_xavier(layer.wo, rng);
        fill_xavier(layer.ff_w1, rng);
        fill_xavier(layer.ff_w2, rng);
        fill_const(layer.ln1_scale, 1.0);
        fill_const(layer.ln2_scale, 1.0);
        // biases and layer-norm offsets stay zero
    }
    fill_xavier(p.head_weight, rng);
    return p;
}

ParamGradients zeros_like(const ModelParams& params) { return make_structure(params.config); }

std::uint64_t params_fingerprint(const ModelParams& params) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    const auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 0x100000001b3ull;
    };
    visit_tensors(const_cast<ModelParams&>(params), [&](const std::string&, Matrix& m) {
        mix(m.rows());
        mix(m.cols());
        const std::size_t stride = std::max<std::size_t>(1, m.size() / 8);
        for (std::size_t i = 0; i < m.size(); i += stride)
            mix(std::bit_cast<std::uint64_t>(m.data()[i]));
        if (m.size() > 0) mix(std::bit_cast<std::uint64_t>(m.data()[m.size() - 1]));
    });
    return h;
}

ForwardResult forward(const ModelParams& params, const EncodedBatch& batch, bool train_mode,
                      std::uint64_t dropout_seed) {
    const ModelConfig& config = params.config;
    config.validate();
    if (batch.max_len != config.max_len)
        throw ContractError("forward: batch max_len != model max_len");
    if (batch.ids.size() != batch.batch * batch.max_len ||
        batch.mask.size() != batch.ids.size())
        throw ContractError("forward: ragged batch buffers");
    for (const auto id : batch.ids)
        if (id < 0 || static_cast<std::size_t>(id) >= config.vocab_size)
            throw ContractError("forward: token id outside vocabulary");

    const std::size_t b = batch.batch, t_len = config.max_len, d = config.embed_dim;
    const std::size_t heads = config.num_heads, hd = d / heads;
    const std::size_t rows = b * t_len;
    const double attn_scale = 1.0 / std::sqrt(static_cast<double>(hd));
    const bool dropping = train_mode && config.dropout_rate > 0.0;

    ForwardTrace trace;
    trace.config = config;
    trace.params_fingerprint = params_fingerprint(params);
    trace.batch = b;
    trace.ids = batch.ids;
    trace.mask = batch.mask;
    trace.train_mode = train_mode;

    for (std::size_t i = 0; i < b; ++i)
        if (batch.mask[i * t_len] == 0)
            throw ContractError("forward: position 0 must be an unmasked CLS slot");

    Matrix x(rows, d);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* tok = params.token_embedding.row(static_cast<std::size_t>(batch.ids[r]));
        const double* pos = params.position_embedding.row(r % t_len);
        double* out = x.row(r);
        for (std::size_t c = 0; c < d; ++c) out[c] = tok[c] + pos[c];
    }
    if (dropping) {
        trace.emb_drop = dropout_multipliers(rows, d, dropout_seed, 0, config.dropout_rate);
        x = hadamard(x, trace.emb_drop);
    }
    trace.embedded = x;

    trace.layers.resize(config.num_layers);
    for (std::size_t l = 0; l < config.num_layers; ++l) {
        LayerTrace& lt = trace.layers[l];
        const LayerParams& lp = params.layers[l];
        lt.input = x;
        lt.q = linear(x, lp.wq, lp.bq);
        lt.k = linear(x, lp.wk, lp.bk);
        lt.v = linear(x, lp.wv, lp.bv);

        lt.attn_probs.assign(b * heads, Matrix(t_len, t_len));
        lt.ctx = Matrix(rows, d);
        std::vector<double> scores(t_len);
        for (std::size_t i = 0; i < b; ++i) {
            const std::size_t base = i * t_len;
            for (std::size_t h = 0; h < heads; ++h) {
                Matrix& probs = lt.attn_probs[i * heads + h];
                const std::size_t off = h * hd;
                for (std::size_t qp = 0; qp < t_len; ++qp) {
                    const double* qrow = lt.q.row(base + qp) + off;
                    double maxv = -std::numeric_limits<double>::infinity();
                    for (std::size_t kp = 0; kp < t_len; ++kp) {
                        if (batch.mask[base + kp] == 0) {
                            scores[kp] = -std::numeric_limits<double>::infinity();
                            continue;
                        }
                        const double* krow = lt.k.row(base + kp) + off;
                        double s = 0.0;
                        for (std::size_t c = 0; c < hd; ++c) s += qrow[c] * krow[c];
                        s *= attn_scale;
                        scores[kp] = s;
                        if (s > maxv) maxv = s;
                    }
                    double denom = 0.0;
                    double* prow = probs.row(qp);
                    for (std::size_t kp = 0; kp < t_len; ++kp) {
                        const double e = std::exp(scores[kp] - maxv);
                        prow[kp] = e;
                        denom += e;
                    }
                    const double inv = 1.0 / denom;
                    double* crow = lt.ctx.row(base + qp) + off;
                    for (std::size_t kp = 0; kp < t_len; ++kp) {
                        prow[kp] *= inv;
                        if (prow[kp] == 0.0) continue;
                        const double* vrow = lt.v.row(base + kp) + off;
                        for (std::size_t c = 0; c < hd; ++c) crow[c] += prow[kp] * vrow[c];
                    }
                }
            }
        }

        Matrix attn_out = linear(lt.ctx, lp.wo, lp.bo);
        if (dropping) {
            lt.attn_drop =
                dropout_multipliers(rows, d, dropout_seed, 1 + 2 * l, config.dropout_rate);
            attn_out = hadamard(attn_out, lt.attn_drop);
        }
        lt.attn_out = attn_out;

        Matrix res1 = x;
        add_inplace(res1, attn_out);
        auto ln1 = layer_norm(res1, lp.ln1_scale, lp.ln1_offset);
        lt.ln1 = std::move(ln1.trace);
        lt.ln1_out = std::move(ln1.out);

        lt.ff_pre = linear(lt.ln1_out, lp.ff_w1, lp.ff_b1);
        lt.ff_act = lt.ff_pre;
        {
            double* p = lt.ff_act.data();
            for (std::size_t idx = 0; idx < lt.ff_act.size(); ++idx) p[idx] = gelu(p[idx]);
        }
        Matrix ff_out = linear(lt.ff_act, lp.ff_w2, lp.ff_b2);
        if (dropping) {
            lt.ff_drop =
                dropout_multipliers(rows, d, dropout_seed, 2 + 2 * l, config.dropout_rate);
            ff_out = hadamard(ff_out, lt.ff_drop);
        }
        lt.ff_out = ff_out;

        Matrix res2 = lt.ln1_out;
        add_inplace(res2, ff_out);
        auto ln2 = layer_norm(res2, lp.ln2_scale, lp.ln2_offset);
        lt.ln2 = std::move(ln2.trace);
        lt.ln2_out = std::move(ln2.out);
        x = lt.ln2_out;
    }

    trace.pooled = Matrix(b, d);
    for (std::size_t i = 0; i < b; ++i) {
        if (config.pooling == Pooling::kCls) {
            const double* src = x.row(i * t_len);
            double* dst = trace.pooled.row(i);
            std::memcpy(dst, src, d * sizeof(double));
        } else {
            double count = 0.0;
            double* dst = trace.pooled.row(i);
            for (std::size_t tp = 0; tp < t_len; ++tp) {
                if (batch.mask[i * t_len + tp] == 0) continue;
                const double* src = x.row(i * t_len + tp);
                for (std::size_t c = 0; c < d; ++c) dst[c] += src[c];
                count += 1.0;
            }
            for (std::size_t c = 0; c < d; ++c) dst[c] /= count;
        }
    }

    ForwardResult result;
    result.logits = linear(trace.pooled, params.head_weight, params.head_bias);
    result.trace = std::move(trace);
    return result;
}

Matrix forward_logits(const ModelParams& params, const EncodedBatch& batch) {
    return forward(params, batch, false, 0).logits;
}

ParamGradients backward(const ModelParams& params, const ForwardTrace& trace,
                        const Matrix& dlogits) {
    const ModelConfig& config = params.config;
    if (trace.config != config) throw ContractError("backward: trace built for a different config");
    if (trace.params_fingerprint != params_fingerprint(params))
        throw ContractError("backward: stale trace, parameters changed since forward");
    if (params.layers.size() != trace.layers.size())
        throw ContractError("backward: trace layer count mismatch");
    const std::size_t b = trace.batch, t_len = config.max_len, d = config.embed_dim;
    const std::size_t heads = config.num_heads, hd = d / heads;
    const std::size_t rows = b * t_len;
    const double attn_scale = 1.0 / std::sqrt(static_cast<double>(hd));
    dlogits.check_shape(b, config.num_classes, "backward logits gradient");
    if (!dlogits.all_finite()) throw ContractError("backward: non-finite logit gradient");

    ParamGradients grads = zeros_like(params);

    // classification head
    Matrix dpooled = matmul_nt(dlogits, params.head_weight);
    add_matmul_tn(grads.head_weight, trace.pooled, dlogits);
    grads.head_bias = colsum(dlogits);

    Matrix dx(rows, d);
    for (std::size_t i = 0; i < b; ++i) {
        if (config.pooling == Pooling::kCls) {
            double* dst = dx.row(i * t_len);
            const double* src = dpooled.row(i);
            for (std::size_t c = 0; c < d; ++c) dst[c] += src[c];
        } else {
            double count = 0.0;
            for (std::size_t tp = 0; tp < t_len; ++tp) count += trace.mask[i * t_len + tp] != 0;
            const double inv = 1.0 / count;
            const double* src = dpooled.row(i);
            for (std::size_t tp = 0; tp < t_len; ++tp) {
                if (trace.mask[i * t_len + tp] == 0) continue;
                double* dst = dx.row(i * t_len + tp);
                for (std::size_t c = 0; c < d; ++c) dst[c] += src[c] * inv;
            }
        }
    }

    for (std::size_t l = config.num_layers; l-- > 0;) {
        const LayerTrace& lt = trace.layers[l];
        const LayerParams& lp = params.layers[l];
        LayerParams& gl = grads.layers[l];

        // layer norm 2 over res2 = ln1_out + ff_out
        Matrix dres2 = layer_norm_backward(dx, lt.ln2, lp.ln2_scale, gl.ln2_scale, gl.ln2_offset);
        Matrix dff_out = dres2;
        if (!lt.ff_drop.empty()) dff_out = hadamard(dff_out, lt.ff_drop);

        // ff_out = gelu(ln1_out * w1 + b1) * w2 + b2
        Matrix dff_act = matmul_nt(dff_out, lp.ff_w2);
        add_matmul_tn(gl.ff_w2, lt.ff_act, dff_out);
        gl.ff_b2 = colsum(dff_out);

        Matrix dff_pre = std::move(dff_act);
        {
            double* p = dff_pre.data();
            const double* pre = lt.ff_pre.data();
            for (std::size_t idx = 0; idx < dff_pre.size(); ++idx) p[idx] *= gelu_deriv(pre[idx]);
        }
        Matrix dln1_out = dres2; // residual branch
        add_inplace(dln1_out, matmul_nt(dff_pre, lp.ff_w1));
        add_matmul_tn(gl.ff_w1, lt.ln1_out, dff_pre);
        gl.ff_b1 = colsum(dff_pre);

        // layer norm 1 over res1 = input + attn_out
        Matrix dres1 =
            layer_norm_backward(dln1_out, lt.ln1, lp.ln1_scale, gl.ln1_scale, gl.ln1_offset);
        Matrix dattn_out = dres1;
        if (!lt.attn_drop.empty()) dattn_out = hadamard(dattn_out, lt.attn_drop);

        Matrix dctx = matmul_nt(dattn_out, lp.wo);
        add_matmul_tn(gl.wo, lt.ctx, dattn_out);
        gl.bo = colsum(dattn_out);

        Matrix dq(rows, d), dk(rows, d), dv(rows, d);
        std::vector<double> da(t_len), ds(t_len);
        for (std::size_t i = 0; i < b; ++i) {
            const std::size_t base = i * t_len;
            for (std::size_t h = 0; h < heads; ++h) {
                const Matrix& probs = lt.attn_probs[i * heads + h];
                const std::size_t off = h * hd;
                for (std::size_t qp = 0; qp < t_len; ++qp) {
                    const double* dcrow = dctx.row(base + qp) + off;
                    const double* prow = probs.row(qp);
                    // dA = dctx_h V_h^T and dV_h += A^T dctx_h
                    double inner = 0.0;
                    for (std::size_t kp = 0; kp < t_len; ++kp) {
                        if (prow[kp] == 0.0) {
                            da[kp] = 0.0;
                            continue;
                        }
                        const double* vrow = lt.v.row(base + kp) + off;
                        double s = 0.0;
                        for (std::size_t c = 0; c < hd; ++c) s += dcrow[c] * vrow[c];
                        da[kp] = s;
                        inner += s * prow[kp];
                        double* dvrow = dv.row(base + kp) + off;
                        for (std::size_t c = 0; c < hd; ++c) dvrow[c] += prow[kp] * dcrow[c];
                    }
                    // softmax backward, then score gradients into q and k
                    double* dqrow = dq.row(base + qp) + off;
                    const double* qrow = lt.q.row(base + qp) + off;
                    for (std::size_t kp = 0; kp < t_len; ++kp) {
                        ds[kp] = prow[kp] * (da[kp] - inner);
                        if (ds[kp] == 0.0) continue;
                        const double g = ds[kp] * attn_scale;
                        const double* krow = lt.k.row(base + kp) + off;
                        double* dkrow = dk.row(base + kp) + off;
                        for (std::size_t c = 0; c < hd; ++c) {
                            dqrow[c] += g * krow[c];
                            dkrow[c] += g * qrow[c];
                        }
                    }
                }
            }
        }

        Matrix dinput = dres1; // residual branch
        add_inplace(dinput, matmul_nt(dq, lp.wq));
        add_inplace(dinput, matmul_nt(dk, lp.wk));
        add_inplace(dinput, matmul_nt(dv, lp.wv));
        add_matmul_tn(gl.wq, lt.input, dq);
        add_matmul_tn(gl.wk, lt.input, dk);
        add_matmul_tn(gl.wv, lt.input, dv);
        gl.bq = colsum(dq);
        gl.bk = colsum(dk);
        gl.bv = colsum(dv);

        dx = std::move(dinput);
    }

    if (!trace.emb_drop.empty()) dx = hadamard(dx, trace.emb_drop);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* src = dx.row(r);
        double* tok = grads.token_embedding.row(static_cast<std::size_t>(trace.ids[r]));
        double* pos = grads.position_embedding.row(r % t_len);
        for (std::size_t c = 0; c < d; ++c) {
            tok[c] += src[c];
            pos[c] += src[c];
        }
    }
    return grads;
}

namespace {

constexpr char kMagic[8] = {'I', 'M', 'L', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kCheckpointVersion = 1;

void put_u64(std::ostream& out, std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(buf, 8);
}

void put_u32(std::ostream& out, std::uint32_t v) {
    char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(buf, 4);
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
    return v;
}

} // namespace

void save_checkpoint(const ModelParams& params, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write checkpoint: " + path.string());
    out.write(kMagic, 8);
    put_u32(out, kCheckpointVersion);

    const json config_json = params.config;
    const std::string config_str = config_json.dump();
    put_u64(out, config_str.size());
    out.write(config_str.data(), static_cast<std::streamsize>(config_str.size()));

    std::uint64_t count = 0;
    visit_tensors(const_cast<ModelParams&>(params), [&](const std::string&, Matrix&) { ++count; });
    put_u64(out, count);
    visit_tensors(const_cast<ModelParams&>(params), [&](const std::string& name, Matrix& m) {
        put_u64(out, name.size());
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        put_u64(out, m.rows());
        put_u64(out, m.cols());
        for (std::size_t i = 0; i < m.size(); ++i)
            put_u64(out, std::bit_cast<std::uint64_t>(m.data()[i]));
    });
    if (!out) throw Error("checkpoint write failed: " + path.string());

    std::ofstream sidecar(path.string() + ".json");
    sidecar << config_json.dump(2) << '\n';
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open checkpoint: " + path.string());
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw SchemaError("not a checkpoint file: " + path.string());
    const auto version = get_u32(in);
    if (version != kCheckpointVersion)
        throw SchemaError("unsupported checkpoint version " + std::to_string(version));

    const auto config_len = get_u64(in);
    std::string config_str(config_len, '\0');
    in.read(config_str.data(), static_cast<std::streamsize>(config_len));
    ModelConfig config;
    try {
        config = json::parse(config_str).get<ModelConfig>();
    } catch (const json::exception& e) {
        throw SchemaError(std::string("checkpoint config header: ") + e.what());
    }

    ModelParams params = make_structure(config);
    std::map<std::string, Matrix*> slots;
    visit_tensors(params, [&](const std::string& name, Matrix& m) { slots[name] = &m; });

    const auto count = get_u64(in);
    if (count != slots.size())
        throw SchemaError("checkpoint tensor count does not match its config header");
    for (std::uint64_t k = 0; k < count; ++k) {
        const auto name_len = get_u64(in);
        std::string name(name_len, '\0');
        in.read(name.data(), static_cast<std::streamsize>(name_len));
        const auto rows = get_u64(in);
        const auto cols = get_u64(in);
        const auto it = slots.find(name);
        if (it == slots.end()) throw SchemaError("checkpoint: unknown tensor '" + name + "'");
        if (it->second->rows() != rows || it->second->cols() != cols)
            throw SchemaError("checkpoint: tensor '" + name + "' shape does not match config");
        for (std::size_t i = 0; i < it->second->size(); ++i)
            it->second->data()[i] = std::bit_cast<double>(get_u64(in));
        slots.erase(it);
    }
    if (!in) throw ParseError("checkpoint truncated: " + path.string());
    if (!slots.empty()) throw SchemaError("checkpoint missing tensor '" + slots.begin()->first + "'");
    bool finite = true;
    visit_tensors(params, [&](const std::string&, Matrix& m) { finite &= m.all_finite(); });
    if (!finite) throw SchemaError("checkpoint contains non-finite values: " + path.string());
    return params;
}

} // namespace imbalml
