#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "imbalml/model.hpp"
#include "imbalml/rng.hpp"

using namespace imbalml;

namespace {

ModelConfig tiny_config() {
    ModelConfig config;
    config.vocab_size = 13;
    config.embed_dim = 8;
    config.num_heads = 2;
    config.num_layers = 1;
    config.feedforward_dim = 16;
    config.max_len = 6;
    config.num_classes = 3;
    config.dropout_rate = 0.0;
    return config;
}

EncodedBatch batch_of(const std::vector<std::vector<std::int32_t>>& token_rows,
                      std::size_t max_len) {
    EncodedBatch batch;
    batch.batch = token_rows.size();
    batch.max_len = max_len;
    for (const auto& tokens : token_rows) {
        batch.ids.push_back(Vocabulary::kCls);
        batch.mask.push_back(1);
        for (std::size_t t = 0; t + 1 < max_len; ++t) {
            if (t < tokens.size()) {
                batch.ids.push_back(tokens[t]);
                batch.mask.push_back(1);
            } else {
                batch.ids.push_back(Vocabulary::kPad);
                batch.mask.push_back(0);
            }
        }
    }
    return batch;
}

} // namespace

TEST_SUITE_BEGIN("model");

TEST_CASE("config validation") {
    ModelConfig config = tiny_config();
    config.embed_dim = 9; // not divisible by 2 heads
    CHECK_THROWS_AS(config.validate(), ArgumentError);
    config = tiny_config();
    config.dropout_rate = 1.0;
    CHECK_THROWS_AS(config.validate(), ArgumentError);
    config = tiny_config();
    config.num_layers = 0; // degenerate encoder is allowed
    CHECK_NOTHROW(config.validate());
}

TEST_CASE("init is deterministic with identity layer norms and zero head bias") {
    const auto config = tiny_config();
    const auto a = init_params(config, 123);
    const auto b = init_params(config, 123);
    CHECK(a == b);
    const auto c = init_params(config, 124);
    CHECK_FALSE(a == c);

    for (const auto& layer : a.layers) {
        for (std::size_t i = 0; i < layer.ln1_scale.size(); ++i) {
            CHECK(layer.ln1_scale.data()[i] == 1.0);
            CHECK(layer.ln1_offset.data()[i] == 0.0);
            CHECK(layer.ln2_scale.data()[i] == 1.0);
            CHECK(layer.ln2_offset.data()[i] == 0.0);
        }
        for (std::size_t i = 0; i < layer.bq.size(); ++i) CHECK(layer.bq.data()[i] == 0.0);
    }
    for (std::size_t i = 0; i < a.head_bias.size(); ++i) CHECK(a.head_bias.data()[i] == 0.0);
}

TEST_CASE("eval forward is deterministic") {
    const auto params = init_params(tiny_config(), 7);
    const auto batch = batch_of({{3, 4, 5}, {6, 7, 8, 9, 10}}, 6);
    const auto a = forward(params, batch, false, 0);
    const auto b = forward(params, batch, false, 99);
    CHECK(a.logits == b.logits);
}

TEST_CASE("token ids under PAD positions cannot influence the logits") {
    const auto params = init_params(tiny_config(), 7);
    auto batch = batch_of({{3, 4}}, 6);
    const auto base = forward(params, batch, false, 0);
    // rewrite token ids in the masked tail
    for (std::size_t t = 0; t < 6; ++t)
        if (batch.mask[t] == 0) batch.ids[t] = 11;
    const auto poked = forward(params, batch, false, 0);
    CHECK(base.logits == poked.logits);
}

TEST_CASE("mean pooling also ignores PAD positions") {
    auto config = tiny_config();
    config.pooling = Pooling::kMean;
    const auto params = init_params(config, 7);
    auto batch = batch_of({{3, 4}}, 6);
    const auto base = forward(params, batch, false, 0);
    for (std::size_t t = 0; t < 6; ++t)
        if (batch.mask[t] == 0) batch.ids[t] = 12;
    const auto poked = forward(params, batch, false, 0);
    CHECK(base.logits == poked.logits);
}

TEST_CASE("a row inside a larger batch gets the same logits") {
    const auto params = init_params(tiny_config(), 11);
    const std::vector<std::int32_t> row = {5, 6, 7};
    std::vector<std::vector<std::int32_t>> rows(8, std::vector<std::int32_t>{3});
    rows[5] = row;
    const auto single = forward(params, batch_of({row}, 6), false, 0);
    const auto batched = forward(params, batch_of(rows, 6), false, 0);
    for (std::size_t j = 0; j < 3; ++j) CHECK(batched.logits(5, j) == single.logits(0, j));
}

TEST_CASE("eval forward is permutation-equivariant across batch rows") {
    const auto params = init_params(tiny_config(), 15);
    const std::vector<std::vector<std::int32_t>> rows = {{3, 4}, {5, 6, 7}, {8}, {9, 10, 11, 3}};
    const auto straight = forward(params, batch_of(rows, 6), false, 0);
    const std::vector<std::size_t> perm = {2, 0, 3, 1};
    std::vector<std::vector<std::int32_t>> permuted;
    for (const auto p : perm) permuted.push_back(rows[p]);
    const auto shuffled = forward(params, batch_of(permuted, 6), false, 0);
    for (std::size_t i = 0; i < perm.size(); ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(shuffled.logits(i, j) == straight.logits(perm[i], j));
}

TEST_CASE("zero-layer config reduces to a closed-form head over the embedding") {
    auto config = tiny_config();
    config.num_layers = 0;
    const auto params = init_params(config, 5);
    const auto batch = batch_of({{4, 5}}, 6);
    const auto result = forward(params, batch, false, 0);

    // logits = head(token_emb[CLS] + pos_emb[0])
    for (std::size_t j = 0; j < config.num_classes; ++j) {
        double expected = params.head_bias(0, j);
        for (std::size_t c = 0; c < config.embed_dim; ++c) {
            const double pooled = params.token_embedding(Vocabulary::kCls, c) +
                                  params.position_embedding(0, c);
            expected += pooled * params.head_weight(c, j);
        }
        CHECK(result.logits(0, j) == doctest::Approx(expected).epsilon(1e-15));
    }
}

TEST_CASE("attention rows are probability vectors over unmasked positions") {
    const auto params = init_params(tiny_config(), 21);
    const auto batch = batch_of({{3, 4, 5}, {6}}, 6);
    const auto result = forward(params, batch, false, 0);
    const auto& layer = result.trace.layers[0];
    for (std::size_t i = 0; i < batch.batch; ++i) {
        for (std::size_t h = 0; h < 2; ++h) {
            const auto& probs = layer.attn_probs[i * 2 + h];
            for (std::size_t q = 0; q < 6; ++q) {
                double sum = 0.0;
                for (std::size_t k = 0; k < 6; ++k) {
                    CHECK(probs(q, k) >= 0.0);
                    if (batch.mask[i * 6 + k] == 0) CHECK(probs(q, k) == 0.0);
                    sum += probs(q, k);
                }
                CHECK(std::abs(sum - 1.0) < 1e-12);
            }
        }
    }
}

TEST_CASE("train mode with dropout 0 equals eval mode exactly") {
    const auto params = init_params(tiny_config(), 3);
    const auto batch = batch_of({{3, 4, 5, 6}}, 6);
    const auto eval = forward(params, batch, false, 0);
    const auto train = forward(params, batch, true, 42);
    CHECK(eval.logits == train.logits);
}

TEST_CASE("dropout is seeded and only active in train mode") {
    auto config = tiny_config();
    config.dropout_rate = 0.3;
    const auto params = init_params(config, 3);
    const auto batch = batch_of({{3, 4, 5, 6}}, 6);
    const auto a = forward(params, batch, true, 42);
    const auto b = forward(params, batch, true, 42);
    const auto c = forward(params, batch, true, 43);
    CHECK(a.logits == b.logits);
    CHECK_FALSE(a.logits == c.logits);
    const auto eval_a = forward(params, batch, false, 42);
    const auto eval_b = forward(params, batch, false, 43);
    CHECK(eval_a.logits == eval_b.logits);
}

TEST_CASE("forward contract errors") {
    const auto params = init_params(tiny_config(), 3);
    auto wrong_len = batch_of({{3}}, 5);
    CHECK_THROWS_AS(forward(params, wrong_len, false, 0), ContractError);
    auto bad_id = batch_of({{99}}, 6);
    CHECK_THROWS_AS(forward(params, bad_id, false, 0), ContractError);
}

TEST_CASE("backward rejects a trace from another config") {
    const auto params = init_params(tiny_config(), 3);
    auto other_config = tiny_config();
    other_config.num_heads = 1;
    const auto other = init_params(other_config, 3);
    const auto batch = batch_of({{3, 4}}, 6);
    const auto result = forward(other, batch, false, 0);
    Matrix dlogits(1, 3, 0.1);
    CHECK_THROWS_AS(backward(params, result.trace, dlogits), ContractError);
}

TEST_CASE("backward rejects a stale trace after the parameters moved") {
    auto params = init_params(tiny_config(), 3);
    const auto batch = batch_of({{3, 4, 5}}, 6);
    auto result = forward(params, batch, false, 0);
    params.head_weight(0, 0) += 0.25;
    Matrix dlogits(1, 3, 0.1);
    CHECK_THROWS_WITH_AS(backward(params, result.trace, dlogits), doctest::Contains("stale"),
                         ContractError);
}

TEST_CASE("zero logit gradient produces exactly zero parameter gradients") {
    const auto params = init_params(tiny_config(), 9);
    const auto batch = batch_of({{3, 4, 5}}, 6);
    auto result = forward(params, batch, false, 0);
    const Matrix dlogits(1, 3, 0.0);
    auto grads = backward(params, result.trace, dlogits);
    visit_tensors(grads, [&](const std::string&, Matrix& m) {
        for (std::size_t i = 0; i < m.size(); ++i) CHECK(m.data()[i] == 0.0);
    });
}

TEST_CASE("head bias gradient is the column sum of the logit gradient") {
    const auto params = init_params(tiny_config(), 9);
    const auto batch = batch_of({{3, 4}, {5, 6, 7}}, 6);
    auto result = forward(params, batch, false, 0);
    Rng rng(61);
    Matrix dlogits(2, 3);
    for (std::size_t i = 0; i < dlogits.size(); ++i) dlogits.data()[i] = rng.uniform(-1.0, 1.0);
    const auto grads = backward(params, result.trace, dlogits);
    for (std::size_t j = 0; j < 3; ++j)
        CHECK(grads.head_bias(0, j) ==
              doctest::Approx(dlogits(0, j) + dlogits(1, j)).epsilon(1e-15));
}

TEST_CASE("checkpoint round trip") {
    const auto params = init_params(tiny_config(), 77);
    const auto dir = std::filesystem::temp_directory_path() / "imbalml_model_tests";
    std::filesystem::create_directories(dir);
    const auto path = dir / "model.bin";
    save_checkpoint(params, path);
    CHECK(std::filesystem::exists(path.string() + ".json"));
    const auto loaded = load_checkpoint(path);
    CHECK(loaded == params);

    SUBCASE("garbage file is a schema error") {
        const auto bad = dir / "bad.bin";
        std::ofstream out(bad, std::ios::binary);
        out << "definitely not a checkpoint";
        out.close();
        CHECK_THROWS_AS(load_checkpoint(bad), SchemaError);
    }
}

TEST_SUITE_END();
