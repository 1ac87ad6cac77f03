#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "imbalml/corpus.hpp"
#include "imbalml/inference.hpp"
#include "imbalml/metrics.hpp"
#include "imbalml/model.hpp"
#include "imbalml/trainer.hpp"

namespace imbalml {

struct DatasetSpec {
    std::string path;                         // empty when synthetic
    DataFormat format = DataFormat::kCsv;
    std::vector<std::string> classes;         // defaults to the emotion set
    std::optional<SyntheticConfig> synthetic; // in-memory corpus when set
    double train_fraction = 0.7;
    bool stratified = false;
};

struct EncodingSpec {
    std::size_t max_len = 64;
    std::size_t max_vocab = 20000;
    std::size_t min_freq = 1;
    bool lowercase = true;
};

// One JSON document describing a full experiment; every command consumes it.
struct ExperimentConfig {
    DatasetSpec data;
    EncodingSpec encoding;
    ModelConfig model; // vocab_size is filled in from the built vocabulary
    TrainConfig train;
    PredictionPolicy policy;
    bool floor_zero_frequencies = false;
    std::uint64_t seed = 42;
    std::string output_dir = "runs";
};

void to_json(nlohmann::json& j, const ExperimentConfig& config);
void from_json(const nlohmann::json& j, ExperimentConfig& config);

// Loads the config file and applies `key.path=value` overrides.
ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                        const std::vector<std::string>& overrides);

// Deterministic artifact directory name for a config+command pair.
std::string run_id_for(const ExperimentConfig& config, const std::string& command);

struct TrainOutcome {
    std::filesystem::path run_dir;
    MetricsReport dev_report;
    TrainHistory history;
    nlohmann::json summary; // the five-metric row, exactly as written to disk
};

TrainOutcome run_train(const ExperimentConfig& config, std::ostream& log);

MetricsReport run_eval(const std::filesystem::path& checkpoint,
                       const std::filesystem::path& vocab_path,
                       const std::filesystem::path& data_path, DataFormat format,
                       const LabelSpace& space, const PredictionPolicy& policy,
                       std::ostream& log);

// Class names resolve from the explicit list, else the manifest next to the
// checkpoint, else the default emotion set (or generic names when C differs).
void run_predict(const std::filesystem::path& checkpoint, const std::filesystem::path& vocab_path,
                 const std::filesystem::path& texts_path, const PredictionPolicy& policy,
                 const std::filesystem::path& out_path,
                 const std::vector<std::string>& class_names = {});

// Report computed from a stored predictions file against a truth dataset.
MetricsReport report_from_predictions(const std::filesystem::path& predictions_path,
                                      const std::filesystem::path& truth_path, DataFormat format,
                                      const LabelSpace& space);

struct TuneOutcome {
    std::filesystem::path run_dir;
    TuneResult result;
};

TuneOutcome run_tune(const ExperimentConfig& config, int trials, int max_threads,
                     std::ostream& log);

std::string render_tuning_table(const TuneResult& result);

// Loads either a real dataset file or the configured synthetic corpus.
Dataset resolve_dataset(const ExperimentConfig& config);

int env_thread_cap(); // IMBALML_THREADS, defaults to 1

} // namespace imbalml
