#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "imbalml/encoding.hpp"
#include "imbalml/inference.hpp"
#include "imbalml/model.hpp"
#include "imbalml/objective.hpp"

namespace imbalml {

struct TrainConfig {
    double learning_rate = 2.45e-5; // shipped default profile from tuning
    int batch_size = 8;
    int num_epochs = 3;
    double weight_decay = 0.01;
    double warmup_fraction = 0.1;
    int early_stop_patience = 0; // 0 disables early stopping
    bool use_class_weights = false;
    double smoothing_epsilon = 0.0;
    std::uint64_t seed = 42;

    void validate() const;

    bool operator==(const TrainConfig& other) const = default;
};

void to_json(nlohmann::json& j, const TrainConfig& config);
void from_json(const nlohmann::json& j, TrainConfig& config);

struct OptimizerState {
    ParamGradients m; // first moments
    ParamGradients v; // second moments
    long long step = 0;
};

OptimizerState make_optimizer_state(const ModelParams& params);

// Decoupled weight decay: the shrink eta_t * lambda * theta uses the
// pre-update parameter value and is applied independently of the adaptive
// update. beta1 = 0.9, beta2 = 0.999, eps = 1e-8.
void adamw_step(ModelParams& params, const ParamGradients& grads, OptimizerState& state,
                double lr_t, double weight_decay);

// Linear ramp 0 -> lr0 over the warmup steps, then linear decay to 0 at
// total_steps.
double linear_schedule(long long step, long long total_steps, double warmup_fraction, double lr0);

struct EpochStats {
    double train_loss = 0.0;
    double dev_macro_f1 = 0.0;
    double learning_rate = 0.0;

    bool operator==(const EpochStats& other) const = default;
};

struct TrainHistory {
    std::vector<EpochStats> epochs;
    int best_epoch = -1; // index into epochs
    double best_dev_macro_f1 = 0.0;
    bool aborted = false;
    std::string abort_reason;

    bool operator==(const TrainHistory& other) const = default;
};

struct TrainResult {
    ModelParams best_params;
    TrainHistory history;
};

// Returning false stops training after the current epoch (used for pruning).
using EpochCallback = std::function<bool(int epoch, const EpochStats&)>;

// Seeded mini-batch SGD epoch loop with AdamW and the linear schedule; the
// best checkpoint is retained by dev Macro F1 (ties keep the earlier epoch).
TrainResult train(const ModelParams& initial, const EncodedDataset& train_data,
                  const EncodedDataset& dev_data, const TrainConfig& config,
                  const std::optional<ClassWeights>& weights,
                  const EpochCallback& on_epoch = nullptr);

double evaluate_macro_f1(const ModelParams& params, const EncodedDataset& data,
                         const PredictionPolicy& policy = {});

struct SearchSpace {
    double lr_min = 1e-5; // log-uniform range
    double lr_max = 1e-4;
    std::vector<int> batch_sizes = {4, 8, 16};
    std::vector<int> epoch_choices = {3, 4, 5};
};

enum class TrialStatus { kCompleted, kPruned };

struct TrialRecord {
    int trial_id = 0;
    TrainConfig config;
    double dev_macro_f1 = 0.0;
    TrialStatus status = TrialStatus::kCompleted;
    int pruned_epoch = -1; // 1-based epoch at which pruning fired
};

struct TuneResult {
    TrainConfig best_config;
    std::vector<TrialRecord> trials;
    bool all_pruned = false;
};

// Seeded random search with median pruning after the first epoch: a trial is
// pruned when its epoch-1 dev Macro F1 falls below the running median of the
// earlier trials' epoch-1 scores. Results are identical for any max_threads;
// parallel workers trade the pruning compute savings for wall time.
TuneResult tune(const SearchSpace& space, int budget, const ModelConfig& model_config,
                const EncodedDataset& train_data, const EncodedDataset& dev_data,
                const TrainConfig& base, std::uint64_t seed, int max_threads = 1);

} // namespace imbalml
