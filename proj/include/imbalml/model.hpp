#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "imbalml/encoding.hpp"
#include "imbalml/matrix.hpp"

namespace imbalml {

enum class Pooling { kCls, kMean };

struct ModelConfig {
    std::size_t vocab_size = 0;
    std::size_t embed_dim = 64;
    std::size_t num_heads = 4;
    std::size_t num_layers = 2;
    std::size_t feedforward_dim = 128;
    std::size_t max_len = 64;
    std::size_t num_classes = 5;
    double dropout_rate = 0.1;
    Pooling pooling = Pooling::kCls;

    void validate() const;

    bool operator==(const ModelConfig& other) const = default;
};

void to_json(nlohmann::json& j, const ModelConfig& config);
void from_json(const nlohmann::json& j, ModelConfig& config);

struct LayerParams {
    Matrix wq, wk, wv, wo;        // embed_dim x embed_dim
    Matrix bq, bk, bv, bo;        // 1 x embed_dim
    Matrix ln1_scale, ln1_offset; // 1 x embed_dim
    Matrix ff_w1;                 // embed_dim x feedforward_dim
    Matrix ff_b1;                 // 1 x feedforward_dim
    Matrix ff_w2;                 // feedforward_dim x embed_dim
    Matrix ff_b2;                 // 1 x embed_dim
    Matrix ln2_scale, ln2_offset; // 1 x embed_dim

    bool operator==(const LayerParams& other) const = default;
};

// Every learnable tensor of the encoder plus the classification head.
struct ModelParams {
    ModelConfig config;
    Matrix token_embedding;    // vocab_size x embed_dim
    Matrix position_embedding; // max_len x embed_dim (learned)
    std::vector<LayerParams> layers;
    Matrix head_weight; // embed_dim x num_classes
    Matrix head_bias;   // 1 x num_classes

    bool operator==(const ModelParams& other) const = default;
};

// Gradients carry one tensor per parameter tensor with identical shapes.
using ParamGradients = ModelParams;

ModelParams init_params(const ModelConfig& config, std::uint64_t seed);
ParamGradients zeros_like(const ModelParams& params);

// Applies fn(name, tensor) to every learnable tensor in a fixed order.
template <typename Params, typename Fn>
void visit_tensors(Params& params, Fn&& fn) {
    fn("token_embedding", params.token_embedding);
    fn("position_embedding", params.position_embedding);
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        auto& layer = params.layers[l];
        const std::string prefix = "layer" + std::to_string(l) + ".";
        fn(prefix + "wq", layer.wq);
        fn(prefix + "bq", layer.bq);
        fn(prefix + "wk", layer.wk);
        fn(prefix + "bk", layer.bk);
        fn(prefix + "wv", layer.wv);
        fn(prefix + "bv", layer.bv);
        fn(prefix + "wo", layer.wo);
        fn(prefix + "bo", layer.bo);
        fn(prefix + "ln1_scale", layer.ln1_scale);
        fn(prefix + "ln1_offset", layer.ln1_offset);
        fn(prefix + "ff_w1", layer.ff_w1);
        fn(prefix + "ff_b1", layer.ff_b1);
        fn(prefix + "ff_w2", layer.ff_w2);
        fn(prefix + "ff_b2", layer.ff_b2);
        fn(prefix + "ln2_scale", layer.ln2_scale);
        fn(prefix + "ln2_offset", layer.ln2_offset);
    }
    fn("head_weight", params.head_weight);
    fn("head_bias", params.head_bias);
}

struct LayerNormTrace {
    Matrix xhat;                 // normalized pre-scale activations
    std::vector<double> inv_std; // one per row
};

struct LayerTrace {
    Matrix input;   // (batch*max_len) x embed_dim
    Matrix q, k, v; // projected, same shape as input
    std::vector<Matrix> attn_probs; // batch*num_heads entries, max_len x max_len
    Matrix ctx;       // heads re-concatenated
    Matrix attn_out;  // after output projection and dropout
    Matrix attn_drop; // dropout multipliers; empty means identity
    LayerNormTrace ln1;
    Matrix ln1_out;
    Matrix ff_pre; // (batch*max_len) x feedforward_dim
    Matrix ff_act;
    Matrix ff_out; // after second projection and dropout
    Matrix ff_drop;
    LayerNormTrace ln2;
    Matrix ln2_out;
};

// Activations retained by forward for the exact backward pass.
struct ForwardTrace {
    ModelConfig config;
    std::uint64_t params_fingerprint = 0; // ties the trace to the exact parameters
    std::size_t batch = 0;
    std::vector<std::int32_t> ids;
    std::vector<std::uint8_t> mask;
    Matrix embedded; // input to the first layer (after dropout)
    Matrix emb_drop;
    std::vector<LayerTrace> layers;
    Matrix pooled; // batch x embed_dim
    bool train_mode = false;
};

std::uint64_t params_fingerprint(const ModelParams& params);

struct ForwardResult {
    Matrix logits; // batch x num_classes
    ForwardTrace trace;
};

// Masked multi-head self-attention encoder: PAD keys score -inf before the
// softmax, each sublayer is residual + layer norm, the head reads the CLS
// position (or the masked mean). Dropout fires only in train mode and is
// fully determined by the seed.
ForwardResult forward(const ModelParams& params, const EncodedBatch& batch, bool train_mode,
                      std::uint64_t dropout_seed);

// Eval-mode logits without keeping the trace alive.
Matrix forward_logits(const ModelParams& params, const EncodedBatch& batch);

// Exact gradients of the scalar loss whose logit gradient is dlogits.
ParamGradients backward(const ModelParams& params, const ForwardTrace& trace, const Matrix& dlogits);

// Versioned binary container (config header + named little-endian tensors)
// plus a JSON sidecar of the config at <path>.json.
void save_checkpoint(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_checkpoint(const std::filesystem::path& path);

} // namespace imbalml
