#include "imbalml/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "imbalml/metrics.hpp"
#include "imbalml/rng.hpp"

namespace imbalml {

using nlohmann::json;

namespace {
constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;
constexpr std::size_t kEvalBatch = 64;
} // namespace

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ArgumentError("train config: learning_rate must be > 0");
    if (batch_size < 1) throw ArgumentError("train config: batch_size must be >= 1");
    if (num_epochs < 1) throw ArgumentError("train config: num_epochs must be >= 1");
    if (early_stop_patience < 0) throw ArgumentError("train config: patience must be >= 0");
    if (weight_decay < 0.0) throw ArgumentError("train config: weight_decay must be >= 0");
    if (warmup_fraction < 0.0 || warmup_fraction >= 1.0)
        throw ArgumentError("train config: warmup_fraction must lie in [0, 1)");
    if (smoothing_epsilon < 0.0 || smoothing_epsilon >= 1.0)
        throw ArgumentError("train config: smoothing epsilon must lie in [0, 1)");
}

void to_json(json& j, const TrainConfig& config) {
    j = json{{"learning_rate", config.learning_rate},
             {"batch_size", config.batch_size},
             {"num_epochs", config.num_epochs},
             {"weight_decay", config.weight_decay},
             {"warmup_fraction", config.warmup_fraction},
             {"early_stop_patience", config.early_stop_patience},
             {"use_class_weights", config.use_class_weights},
             {"smoothing_epsilon", config.smoothing_epsilon},
             {"seed", config.seed}};
}

void from_json(const json& j, TrainConfig& config) {
    config = TrainConfig{};
    if (j.contains("learning_rate")) j.at("learning_rate").get_to(config.learning_rate);
    if (j.contains("batch_size")) j.at("batch_size").get_to(config.batch_size);
    if (j.contains("num_epochs")) j.at("num_epochs").get_to(config.num_epochs);
    if (j.contains("weight_decay")) j.at("weight_decay").get_to(config.weight_decay);
    if (j.contains("warmup_fraction")) j.at("warmup_fraction").get_to(config.warmup_fraction);
    if (j.contains("early_stop_patience"))
        j.at("early_stop_patience").get_to(config.early_stop_patience);
    if (j.contains("use_class_weights")) j.at("use_class_weights").get_to(config.use_class_weights);
    if (j.contains("smoothing_epsilon")) j.at("smoothing_epsilon").get_to(config.smoothing_epsilon);
    if (j.contains("seed")) j.at("seed").get_to(config.seed);
}

OptimizerState make_optimizer_state(const ModelParams& params) {
    return {zeros_like(params), zeros_like(params), 0};
}

void adamw_step(ModelParams& params, const ParamGradients& grads, OptimizerState& state,
                double lr_t, double weight_decay) {
    state.step += 1;
    const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(state.step));

    std::vector<Matrix*> theta, m, v;
    std::vector<const Matrix*> g;
    std::vector<std::string> names;
    visit_tensors(params, [&](const std::string& n, Matrix& t) {
        names.push_back(n);
        theta.push_back(&t);
    });
    visit_tensors(const_cast<ParamGradients&>(grads),
                  [&](const std::string&, Matrix& t) { g.push_back(&t); });
    visit_tensors(state.m, [&](const std::string&, Matrix& t) { m.push_back(&t); });
    visit_tensors(state.v, [&](const std::string&, Matrix& t) { v.push_back(&t); });
    if (theta.size() != g.size() || theta.size() != m.size() || theta.size() != v.size())
        throw ContractError("adamw_step: gradient/state structure mismatch");

    for (std::size_t k = 0; k < theta.size(); ++k) {
        if (theta[k]->size() != g[k]->size())
            throw ContractError("adamw_step: tensor '" + names[k] + "' shape mismatch");
        if (!g[k]->all_finite())
            throw Error("adamw_step: non-finite gradient in '" + names[k] +
                        "'; training aborted");
        double* tp = theta[k]->data();
        double* mp = m[k]->data();
        double* vp = v[k]->data();
        const double* gp = g[k]->data();
        for (std::size_t i = 0; i < theta[k]->size(); ++i) {
            mp[i] = kBeta1 * mp[i] + (1.0 - kBeta1) * gp[i];
            vp[i] = kBeta2 * vp[i] + (1.0 - kBeta2) * gp[i] * gp[i];
            const double mhat = mp[i] / bc1;
            const double vhat = vp[i] / bc2;
            const double old = tp[i];
            tp[i] = old - lr_t * mhat / (std::sqrt(vhat) + kAdamEps) -
                    lr_t * weight_decay * old;
        }
    }
}

double linear_schedule(long long step, long long total_steps, double warmup_fraction, double lr0) {
    if (total_steps < 1) throw ArgumentError("linear_schedule: total_steps must be >= 1");
    if (warmup_fraction < 0.0 || warmup_fraction >= 1.0)
        throw ArgumentError("linear_schedule: warmup_fraction must lie in [0, 1)");
    if (step < 0) throw ArgumentError("linear_schedule: negative step");
    if (step >= total_steps) return 0.0;
    const double total = static_cast<double>(total_steps);
    const double warmup = warmup_fraction * total;
    const double s = static_cast<double>(step);
    if (s < warmup) return lr0 * s / warmup;
    return lr0 * (total - s) / (total - warmup);
}

double evaluate_macro_f1(const ModelParams& params, const EncodedDataset& data,
                         const PredictionPolicy& policy) {
    const std::size_t n = data.size();
    if (n == 0) throw ArgumentError("evaluate_macro_f1: empty dataset");
    LabelMatrix pred(n, data.labels.cols);
    for (std::size_t start = 0; start < n; start += kEvalBatch) {
        const std::size_t end = std::min(n, start + kEvalBatch);
        std::vector<std::size_t> rows(end - start);
        for (std::size_t i = start; i < end; ++i) rows[i - start] = i;
        const Matrix logits = forward_logits(params, data.slice(rows));
        const auto assigned = predict(logits, policy).assigned;
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < pred.cols; ++j) pred(start + i, j) = assigned(i, j);
    }
    const auto counts = confusion_counts(pred, data.labels);
    std::vector<double> f1s(counts.num_classes());
    for (std::size_t j = 0; j < f1s.size(); ++j)
        f1s[j] = f1_from_counts(counts.tp[j], counts.fp[j], counts.fn[j]);
    return macro_f1(f1s);
}

TrainResult train(const ModelParams& initial, const EncodedDataset& train_data,
                  const EncodedDataset& dev_data, const TrainConfig& config,
                  const std::optional<ClassWeights>& weights, const EpochCallback& on_epoch) {
    config.validate();
    if (train_data.size() == 0 || dev_data.size() == 0)
        throw ArgumentError("train: encoded datasets must be nonempty");
    if (weights && weights->w.size() != train_data.labels.cols)
        throw ContractError("train: class weight length != class count");

    ModelParams params = initial;
    OptimizerState state = make_optimizer_state(params);
    const std::size_t n = train_data.size();
    const std::size_t batch_size = static_cast<std::size_t>(config.batch_size);
    const long long steps_per_epoch =
        static_cast<long long>((n + batch_size - 1) / batch_size);
    const long long total_steps = steps_per_epoch * config.num_epochs;

    Rng shuffle_rng(derive_seed(config.seed, "shuffle"));
    const std::uint64_t dropout_root = derive_seed(config.seed, "dropout");
    const SmoothingConfig smoothing{config.smoothing_epsilon};

    TrainResult result;
    result.best_params = params;
    TrainHistory& history = result.history;
    double best_f1 = -1.0;
    int best_epoch = -1;
    int epochs_since_improve = 0;
    long long global_step = 0;

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    for (int epoch = 0; epoch < config.num_epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double loss_sum = 0.0;
        long long batches = 0;
        double last_lr = 0.0;
        bool nan_abort = false;
        for (std::size_t start = 0; start < n; start += batch_size) {
            const std::size_t end = std::min(n, start + batch_size);
            const std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(start),
                                                order.begin() + static_cast<std::ptrdiff_t>(end));
            const EncodedBatch batch = train_data.slice(rows);
            const LabelMatrix batch_labels = train_data.label_slice(rows);
            const Matrix targets = smooth_labels(batch_labels, smoothing);

            const double lr_t =
                linear_schedule(global_step, total_steps, config.warmup_fraction,
                                config.learning_rate);
            const std::uint64_t batch_seed =
                derive_seed(dropout_root, "step" + std::to_string(global_step));
            auto fwd = forward(params, batch, /*train_mode=*/true, batch_seed);
            const Matrix probs = predict_probs(fwd.logits);
            LossResult loss = weights && config.use_class_weights
                                  ? weighted_bce_loss(probs, targets, *weights)
                                  : bce_loss(probs, targets);
            if (!std::isfinite(loss.loss)) {
                history.aborted = true;
                history.abort_reason = "non-finite loss at step " + std::to_string(global_step);
                nan_abort = true;
                break;
            }
            try {
                const ParamGradients grads = backward(params, fwd.trace, loss.dlogits);
                adamw_step(params, grads, state, lr_t, config.weight_decay);
            } catch (const Error& e) {
                history.aborted = true;
                history.abort_reason = e.what();
                nan_abort = true;
                break;
            }
            loss_sum += loss.loss;
            ++batches;
            ++global_step;
            last_lr = lr_t;
        }
        if (nan_abort) break;

        EpochStats stats;
        stats.train_loss = batches > 0 ? loss_sum / static_cast<double>(batches) : 0.0;
        stats.dev_macro_f1 = evaluate_macro_f1(params, dev_data);
        stats.learning_rate = last_lr;
        history.epochs.push_back(stats);

        if (stats.dev_macro_f1 > best_f1) {
            best_f1 = stats.dev_macro_f1;
            best_epoch = epoch;
            result.best_params = params;
            epochs_since_improve = 0;
        } else {
            ++epochs_since_improve;
        }
        if (on_epoch && !on_epoch(epoch, stats)) break;
        if (config.early_stop_patience > 0 && epochs_since_improve >= config.early_stop_patience)
            break;
    }

    history.best_epoch = best_epoch;
    history.best_dev_macro_f1 = best_epoch >= 0 ? best_f1 : 0.0;
    return result;
}

namespace {

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

TrainConfig sample_trial_config(const SearchSpace& space, const TrainConfig& base, Rng& rng,
                                std::uint64_t seed, int trial_id) {
    TrainConfig config = base;
    config.learning_rate = std::exp(rng.uniform(std::log(space.lr_min), std::log(space.lr_max)));
    config.batch_size = space.batch_sizes[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(space.batch_sizes.size()) - 1))];
    config.num_epochs = space.epoch_choices[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(space.epoch_choices.size()) - 1))];
    config.seed = derive_seed(seed, "trial" + std::to_string(trial_id));
    return config;
}

} // namespace

TuneResult tune(const SearchSpace& space, int budget, const ModelConfig& model_config,
                const EncodedDataset& train_data, const EncodedDataset& dev_data,
                const TrainConfig& base, std::uint64_t seed, int max_threads) {
    if (budget < 1) throw ArgumentError("tune: budget must be >= 1");
    if (!(space.lr_min > 0.0) || space.lr_min > space.lr_max)
        throw ArgumentError("tune: bad learning-rate range");
    if (space.batch_sizes.empty() || space.epoch_choices.empty())
        throw ArgumentError("tune: empty choice set");

    Rng rng(derive_seed(seed, "tune"));
    std::vector<TrainConfig> configs;
    configs.reserve(static_cast<std::size_t>(budget));
    for (int k = 0; k < budget; ++k)
        configs.push_back(sample_trial_config(space, base, rng, seed, k));

    TuneResult result;
    result.trials.resize(static_cast<std::size_t>(budget));

    const auto init_for = [&](const TrainConfig& config) {
        return init_params(model_config, derive_seed(config.seed, "init"));
    };

    if (max_threads <= 1) {
        std::vector<double> epoch1_scores;
        for (int k = 0; k < budget; ++k) {
            const TrainConfig& config = configs[static_cast<std::size_t>(k)];
            double epoch1 = 0.0;
            bool pruned = false;
            const auto gate = [&](int epoch, const EpochStats& stats) {
                if (epoch != 0) return true;
                epoch1 = stats.dev_macro_f1;
                if (!epoch1_scores.empty() && epoch1 < median_of(epoch1_scores)) pruned = true;
                return !pruned;
            };
            const auto run = train(init_for(config), train_data, dev_data, config, std::nullopt, gate);
            TrialRecord& record = result.trials[static_cast<std::size_t>(k)];
            record.trial_id = k;
            record.config = config;
            if (pruned) {
                record.status = TrialStatus::kPruned;
                record.pruned_epoch = 1;
                record.dev_macro_f1 = epoch1;
            } else {
                record.status = TrialStatus::kCompleted;
                record.dev_macro_f1 = run.history.best_dev_macro_f1;
            }
            epoch1_scores.push_back(epoch1);
        }
    } else {
        // Run every trial to completion in parallel, then apply the same
        // prefix-median rule; records come out identical to the sequential path.
        std::vector<double> epoch1_scores(static_cast<std::size_t>(budget));
        std::vector<double> final_scores(static_cast<std::size_t>(budget));
        std::atomic<int> next{0};
        std::mutex failure_mutex;
        std::exception_ptr failure;
        const auto worker = [&] {
            for (;;) {
                const int k = next.fetch_add(1);
                if (k >= budget) return;
                try {
                    const TrainConfig& config = configs[static_cast<std::size_t>(k)];
                    const auto run =
                        train(init_for(config), train_data, dev_data, config, std::nullopt);
                    epoch1_scores[static_cast<std::size_t>(k)] =
                        run.history.epochs.empty() ? 0.0 : run.history.epochs.front().dev_macro_f1;
                    final_scores[static_cast<std::size_t>(k)] = run.history.best_dev_macro_f1;
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        const int n_threads = std::min(max_threads, budget);
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);

        std::vector<double> prior;
        for (int k = 0; k < budget; ++k) {
            TrialRecord& record = result.trials[static_cast<std::size_t>(k)];
            record.trial_id = k;
            record.config = configs[static_cast<std::size_t>(k)];
            const double epoch1 = epoch1_scores[static_cast<std::size_t>(k)];
            if (!prior.empty() && epoch1 < median_of(prior)) {
                record.status = TrialStatus::kPruned;
                record.pruned_epoch = 1;
                record.dev_macro_f1 = epoch1;
            } else {
                record.status = TrialStatus::kCompleted;
                record.dev_macro_f1 = final_scores[static_cast<std::size_t>(k)];
            }
            prior.push_back(epoch1);
        }
    }

    result.all_pruned = std::none_of(result.trials.begin(), result.trials.end(),
                                     [](const TrialRecord& r) { return r.status == TrialStatus::kCompleted; });
    const auto best = std::max_element(
        result.trials.begin(), result.trials.end(),
        [](const TrialRecord& a, const TrialRecord& b) { return a.dev_macro_f1 < b.dev_macro_f1; });
    result.best_config = best->config;
    return result;
}

} // namespace imbalml
