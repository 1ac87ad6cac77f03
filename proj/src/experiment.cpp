#include "imbalml/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "imbalml/rng.hpp"

namespace imbalml {

using nlohmann::json;

namespace {

DataFormat format_from_string(const std::string& s) {
    if (s == "csv") return DataFormat::kCsv;
    if (s == "jsonl") return DataFormat::kJsonl;
    throw ArgumentError("unknown dataset format '" + s + "' (expected csv or jsonl)");
}

std::string format_to_string(DataFormat f) { return f == DataFormat::kCsv ? "csv" : "jsonl"; }

json synthetic_to_json(const SyntheticConfig& s) {
    json j{{"n", s.n},
           {"classes", s.class_names},
           {"prevalence", s.prevalence},
           {"noise_rate", s.noise_rate},
           {"noise_vocab_size", s.noise_vocab_size},
           {"noise_slots", s.noise_slots}};
    if (!s.cue_tokens.empty()) j["cue_tokens"] = s.cue_tokens;
    return j;
}

SyntheticConfig synthetic_from_json(const json& j) {
    SyntheticConfig s;
    if (j.contains("n")) j.at("n").get_to(s.n);
    if (j.contains("classes")) j.at("classes").get_to(s.class_names);
    if (j.contains("prevalence")) j.at("prevalence").get_to(s.prevalence);
    if (j.contains("cue_tokens")) j.at("cue_tokens").get_to(s.cue_tokens);
    if (j.contains("noise_rate")) j.at("noise_rate").get_to(s.noise_rate);
    if (j.contains("noise_vocab_size")) j.at("noise_vocab_size").get_to(s.noise_vocab_size);
    if (j.contains("noise_slots")) j.at("noise_slots").get_to(s.noise_slots);
    return s;
}

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write file: " + path.string());
    out << content;
}

json policy_to_json(const PredictionPolicy& p) {
    return json{{"tau", p.tau}, {"fallback", p.fallback}};
}

PredictionPolicy policy_from_json(const json& j) {
    PredictionPolicy p;
    if (j.contains("tau")) j.at("tau").get_to(p.tau);
    if (j.contains("fallback")) j.at("fallback").get_to(p.fallback);
    return p;
}

} // namespace

void to_json(json& j, const ExperimentConfig& config) {
    json data{{"format", format_to_string(config.data.format)},
              {"classes", config.data.classes},
              {"train_fraction", config.data.train_fraction},
              {"stratified", config.data.stratified}};
    if (!config.data.path.empty()) data["path"] = config.data.path;
    if (config.data.synthetic) data["synthetic"] = synthetic_to_json(*config.data.synthetic);
    j = json{{"data", data},
             {"encoding",
              {{"max_len", config.encoding.max_len},
               {"max_vocab", config.encoding.max_vocab},
               {"min_freq", config.encoding.min_freq},
               {"lowercase", config.encoding.lowercase}}},
             {"model", config.model},
             {"train", config.train},
             {"policy", policy_to_json(config.policy)},
             {"floor_zero_frequencies", config.floor_zero_frequencies},
             {"seed", config.seed},
             {"output_dir", config.output_dir}};
}

void from_json(const json& j, ExperimentConfig& config) {
    config = ExperimentConfig{};
    config.data.classes = LabelSpace::default_emotions().names();
    config.model.dropout_rate = 0.1;
    if (j.contains("data")) {
        const auto& data = j.at("data");
        if (data.contains("path")) data.at("path").get_to(config.data.path);
        if (data.contains("format"))
            config.data.format = format_from_string(data.at("format").get<std::string>());
        if (data.contains("classes")) data.at("classes").get_to(config.data.classes);
        if (data.contains("synthetic"))
            config.data.synthetic = synthetic_from_json(data.at("synthetic"));
        if (data.contains("train_fraction")) data.at("train_fraction").get_to(config.data.train_fraction);
        if (data.contains("stratified")) data.at("stratified").get_to(config.data.stratified);
    }
    if (j.contains("encoding")) {
        const auto& enc = j.at("encoding");
        if (enc.contains("max_len")) enc.at("max_len").get_to(config.encoding.max_len);
        if (enc.contains("max_vocab")) enc.at("max_vocab").get_to(config.encoding.max_vocab);
        if (enc.contains("min_freq")) enc.at("min_freq").get_to(config.encoding.min_freq);
        if (enc.contains("lowercase")) enc.at("lowercase").get_to(config.encoding.lowercase);
    }
    if (j.contains("model")) {
        // vocab_size is a runtime artifact of the built vocabulary
        json m = j.at("model");
        if (!m.contains("vocab_size")) m["vocab_size"] = 4;
        ModelConfig defaults;
        if (!m.contains("embed_dim")) m["embed_dim"] = defaults.embed_dim;
        if (!m.contains("num_heads")) m["num_heads"] = defaults.num_heads;
        if (!m.contains("num_layers")) m["num_layers"] = defaults.num_layers;
        if (!m.contains("feedforward_dim")) m["feedforward_dim"] = defaults.feedforward_dim;
        if (!m.contains("max_len")) m["max_len"] = defaults.max_len;
        if (!m.contains("num_classes")) m["num_classes"] = defaults.num_classes;
        if (!m.contains("dropout_rate")) m["dropout_rate"] = 0.1;
        m.get_to(config.model);
    } else {
        config.model.vocab_size = 4;
    }
    if (j.contains("train")) j.at("train").get_to(config.train);
    if (j.contains("policy")) config.policy = policy_from_json(j.at("policy"));
    if (j.contains("floor_zero_frequencies"))
        j.at("floor_zero_frequencies").get_to(config.floor_zero_frequencies);
    if (j.contains("seed")) j.at("seed").get_to(config.seed);
    if (j.contains("output_dir")) j.at("output_dir").get_to(config.output_dir);
}

namespace {

json parse_override_value(const std::string& raw) {
    // try JSON first so numbers/bools/arrays work; fall back to a string
    try {
        return json::parse(raw);
    } catch (const json::parse_error&) {
        return json(raw);
    }
}

void apply_override(json& doc, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ArgumentError("override '" + spec + "' must look like key.path=value");
    std::string path = spec.substr(0, eq);
    const std::string value = spec.substr(eq + 1);
    std::replace(path.begin(), path.end(), '.', '/');
    doc[json::json_pointer("/" + path)] = parse_override_value(value);
}

} // namespace

ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                        const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open config file: " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("config file " + path.string() + ": " + e.what());
    }
    for (const auto& spec : overrides) apply_override(doc, spec);
    try {
        return doc.get<ExperimentConfig>();
    } catch (const json::exception& e) {
        throw SchemaError("config file " + path.string() + ": " + e.what());
    }
}

std::string run_id_for(const ExperimentConfig& config, const std::string& command) {
    const json j = config;
    const std::string canonical = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char c : canonical) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    std::ostringstream out;
    out << command << '-' << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

Dataset resolve_dataset(const ExperimentConfig& config) {
    if (config.data.synthetic) {
        SyntheticConfig synth = *config.data.synthetic;
        if (synth.class_names.empty()) synth.class_names = config.data.classes;
        return generate_synthetic(synth, derive_seed(config.seed, "synth"));
    }
    if (config.data.path.empty())
        throw ArgumentError("config needs either data.path or data.synthetic");
    if (!std::filesystem::exists(config.data.path))
        throw ArgumentError("dataset path does not exist: " + config.data.path);
    return load_dataset(config.data.path, config.data.format, LabelSpace(config.data.classes));
}

namespace {

struct EncodedSplits {
    Vocabulary vocab;
    EncodedDataset train;
    EncodedDataset dev;
    LabelFrequencies train_freq;
};

EncodedSplits prepare_splits(const ExperimentConfig& config, const Dataset& data) {
    auto [train_set, dev_set] = split_train_dev(data, config.data.train_fraction,
                                                derive_seed(config.seed, "split"),
                                                config.data.stratified);
    if (dev_set.size() == 0)
        throw ArgumentError("train_fraction leaves no development records; lower it");
    EncodedSplits out{Vocabulary::build(train_set, config.encoding.max_vocab,
                                        config.encoding.min_freq, config.encoding.lowercase),
                      {}, {}, {}};
    out.train = encode_dataset(train_set, out.vocab, config.encoding.max_len);
    out.dev = encode_dataset(dev_set, out.vocab, config.encoding.max_len);
    out.train_freq = label_frequencies(train_set);
    return out;
}

json history_to_json(const TrainHistory& history) {
    json epochs = json::array();
    for (const auto& e : history.epochs)
        epochs.push_back({{"train_loss", e.train_loss},
                          {"dev_macro_f1", e.dev_macro_f1},
                          {"learning_rate", e.learning_rate}});
    json j{{"epochs", epochs},
           {"best_epoch", history.best_epoch},
           {"best_dev_macro_f1", history.best_dev_macro_f1},
           {"aborted", history.aborted}};
    if (history.aborted) j["abort_reason"] = history.abort_reason;
    return j;
}

json summary_from_report(const MetricsReport& report) {
    json summary;
    summary["micro_f1"] = report.micro.f1;
    summary["macro_f1"] = report.macro.f1;
    if (report.roc_auc) summary["roc_auc"] = *report.roc_auc;
    else summary["roc_auc"] = nullptr;
    summary["accuracy"] = report.subset_accuracy;
    summary["jaccard"] = report.jaccard;
    return summary;
}

MetricsReport evaluate_full_report(const ModelParams& params, const EncodedDataset& data,
                                   const PredictionPolicy& policy, const LabelSpace& space) {
    const std::size_t n = data.size();
    LabelMatrix pred(n, data.labels.cols);
    Matrix probs(n, data.labels.cols);
    constexpr std::size_t kChunk = 64;
    for (std::size_t start = 0; start < n; start += kChunk) {
        const std::size_t end = std::min(n, start + kChunk);
        std::vector<std::size_t> rows(end - start);
        for (std::size_t i = start; i < end; ++i) rows[i - start] = i;
        const Matrix logits = forward_logits(params, data.slice(rows));
        const auto set = predict(logits, policy);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (std::size_t j = 0; j < pred.cols; ++j) {
                pred(start + i, j) = set.assigned(i, j);
                probs(start + i, j) = set.probs(i, j);
            }
        }
    }
    return classification_report(pred, data.labels, probs, space);
}

} // namespace

TrainOutcome run_train(const ExperimentConfig& config, std::ostream& log) {
    config.train.validate();
    const Dataset data = resolve_dataset(config);
    const LabelSpace space = data.space();
    const auto splits = prepare_splits(config, data);

    ModelConfig model_config = config.model;
    model_config.vocab_size = splits.vocab.size();
    model_config.max_len = config.encoding.max_len;
    model_config.num_classes = space.size();
    model_config.validate();

    std::optional<ClassWeights> weights;
    if (config.train.use_class_weights)
        weights = compute_class_weights(splits.train_freq, config.floor_zero_frequencies);

    TrainConfig train_config = config.train;
    train_config.seed = derive_seed(config.seed, "train");

    const ModelParams initial = init_params(model_config, derive_seed(config.seed, "init"));
    log << "training on " << splits.train.size() << " records, validating on "
        << splits.dev.size() << " (vocab " << splits.vocab.size() << ")\n";
    const TrainResult trained = train(initial, splits.train, splits.dev, train_config, weights);
    if (trained.history.aborted)
        log << "warning: training aborted (" << trained.history.abort_reason
            << "); keeping last good checkpoint\n";

    const MetricsReport report =
        evaluate_full_report(trained.best_params, splits.dev, config.policy, space);

    const std::string run_id = run_id_for(config, "train");
    const std::filesystem::path run_dir = std::filesystem::path(config.output_dir) / run_id;
    std::filesystem::create_directories(run_dir);

    save_checkpoint(trained.best_params, run_dir / "checkpoint.bin");
    splits.vocab.save(run_dir / "vocab.tsv");
    write_text_file(run_dir / "report.txt", report.to_text());
    write_text_file(run_dir / "report.json", report.to_json().dump(2) + "\n");

    const json summary = summary_from_report(report);
    json manifest;
    manifest["run_id"] = run_id;
    manifest["command"] = "train";
    manifest["variant"] = config.train.use_class_weights ? "+w" : "base";
    manifest["timestamp"] = iso_timestamp();
    manifest["config"] = config;
    manifest["component_seeds"] = {{"split", derive_seed(config.seed, "split")},
                                   {"synth", derive_seed(config.seed, "synth")},
                                   {"init", derive_seed(config.seed, "init")},
                                   {"train", derive_seed(config.seed, "train")}};
    if (weights) manifest["class_weights"] = weights->w;
    else manifest["class_weights"] = nullptr;
    manifest["history"] = history_to_json(trained.history);
    manifest["summary"] = summary;
    manifest["artifacts"] = {{"checkpoint", "checkpoint.bin"},
                             {"vocab", "vocab.tsv"},
                             {"report_json", "report.json"},
                             {"report_text", "report.txt"}};
    write_text_file(run_dir / "manifest.json", manifest.dump(2) + "\n");

    log << report.to_text();
    {
        std::ostringstream row;
        row << std::fixed << std::setprecision(4) << "MicroF1 " << report.micro.f1 << "  MacroF1 "
            << report.macro.f1 << "  ROC-AUC ";
        if (report.roc_auc) row << *report.roc_auc;
        else row << "n/a";
        row << "  Acc " << report.subset_accuracy << "  Jaccard " << report.jaccard;
        log << row.str() << '\n';
    }
    log << "summary " << summary.dump() << '\n';
    log << "artifacts in " << run_dir.string() << '\n';

    return {run_dir, report, trained.history, summary};
}

namespace {

Vocabulary load_vocab_for(const std::filesystem::path& checkpoint,
                          const std::filesystem::path& vocab_path) {
    if (!vocab_path.empty()) return Vocabulary::load(vocab_path);
    const auto sibling = checkpoint.parent_path() / "vocab.tsv";
    if (!std::filesystem::exists(sibling))
        throw ArgumentError("no vocabulary found next to checkpoint; pass --vocab");
    return Vocabulary::load(sibling);
}

} // namespace

MetricsReport run_eval(const std::filesystem::path& checkpoint,
                       const std::filesystem::path& vocab_path,
                       const std::filesystem::path& data_path, DataFormat format,
                       const LabelSpace& space, const PredictionPolicy& policy,
                       std::ostream& log) {
    const ModelParams params = load_checkpoint(checkpoint);
    if (params.config.num_classes != space.size())
        throw SchemaError("checkpoint expects " + std::to_string(params.config.num_classes) +
                          " classes but the dataset declares " + std::to_string(space.size()));
    const Vocabulary vocab = load_vocab_for(checkpoint, vocab_path);
    if (vocab.size() != params.config.vocab_size)
        throw SchemaError("vocabulary size does not match the checkpoint config");
    const Dataset data = load_dataset(data_path, format, space);
    const EncodedDataset encoded = encode_dataset(data, vocab, params.config.max_len);
    const MetricsReport report =
        evaluate_full_report(params, encoded, policy, space);
    log << report.to_text();
    return report;
}

namespace {

LabelSpace space_for_checkpoint(const std::filesystem::path& checkpoint, std::size_t num_classes,
                                const std::vector<std::string>& explicit_names) {
    if (!explicit_names.empty()) {
        LabelSpace space(explicit_names);
        if (space.size() != num_classes)
            throw SchemaError("checkpoint expects " + std::to_string(num_classes) +
                              " classes but " + std::to_string(space.size()) + " names were given");
        return space;
    }
    const auto manifest_path = checkpoint.parent_path() / "manifest.json";
    if (std::filesystem::exists(manifest_path)) {
        std::ifstream in(manifest_path);
        json doc;
        in >> doc;
        const auto names =
            doc.at("config").at("data").at("classes").get<std::vector<std::string>>();
        if (names.size() == num_classes) return LabelSpace(names);
    }
    if (num_classes == LabelSpace::default_emotions().size()) return LabelSpace::default_emotions();
    std::vector<std::string> generic;
    for (std::size_t j = 0; j < num_classes; ++j) generic.push_back("class" + std::to_string(j));
    return LabelSpace(generic);
}

} // namespace

void run_predict(const std::filesystem::path& checkpoint, const std::filesystem::path& vocab_path,
                 const std::filesystem::path& texts_path, const PredictionPolicy& policy,
                 const std::filesystem::path& out_path,
                 const std::vector<std::string>& class_names) {
    const ModelParams params = load_checkpoint(checkpoint);
    const Vocabulary vocab = load_vocab_for(checkpoint, vocab_path);
    std::ifstream in(texts_path);
    if (!in) throw ArgumentError("cannot open texts file: " + texts_path.string());
    std::vector<std::string> texts;
    std::string line;
    while (std::getline(in, line)) texts.push_back(line);

    const LabelSpace space =
        space_for_checkpoint(checkpoint, params.config.num_classes, class_names);

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write predictions file: " + out_path.string());
    constexpr std::size_t kChunk = 64;
    for (std::size_t start = 0; start < texts.size(); start += kChunk) {
        const std::size_t end = std::min(texts.size(), start + kChunk);
        const std::vector<std::string> chunk(texts.begin() + static_cast<std::ptrdiff_t>(start),
                                             texts.begin() + static_cast<std::ptrdiff_t>(end));
        const EncodedBatch batch = encode_batch(chunk, vocab, params.config.max_len);
        const Matrix logits = forward_logits(params, batch);
        const auto set = predict(logits, policy);
        for (std::size_t i = 0; i < chunk.size(); ++i) {
            json row;
            row["id"] = std::to_string(start + i);
            std::vector<double> probs(set.probs.cols());
            std::vector<std::string> labels;
            for (std::size_t j = 0; j < set.probs.cols(); ++j) {
                probs[j] = set.probs(i, j);
                if (set.assigned(i, j)) labels.push_back(space.names()[j]);
            }
            row["probs"] = probs;
            row["labels"] = labels;
            out << row.dump() << '\n';
        }
    }
}

MetricsReport report_from_predictions(const std::filesystem::path& predictions_path,
                                      const std::filesystem::path& truth_path, DataFormat format,
                                      const LabelSpace& space) {
    const Dataset truth = load_dataset(truth_path, format, space);
    std::ifstream in(predictions_path);
    if (!in) throw ArgumentError("cannot open predictions file: " + predictions_path.string());

    struct Row {
        std::vector<double> probs;
        std::vector<std::uint8_t> assigned;
    };
    std::map<std::string, Row> rows;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError("predictions line " + std::to_string(line_number) + ": " + e.what());
        }
        Row row;
        row.probs = obj.at("probs").get<std::vector<double>>();
        if (row.probs.size() != space.size())
            throw SchemaError("predictions line " + std::to_string(line_number) +
                              ": expected " + std::to_string(space.size()) + " probabilities");
        row.assigned.assign(space.size(), 0);
        for (const auto& name : obj.at("labels").get<std::vector<std::string>>()) {
            const auto idx = space.index_of(name);
            if (!idx)
                throw SchemaError("predictions line " + std::to_string(line_number) +
                                  ": unknown label '" + name + "'");
            row.assigned[*idx] = 1;
        }
        rows[obj.at("id").get<std::string>()] = std::move(row);
    }

    LabelMatrix pred(truth.size(), space.size());
    Matrix probs(truth.size(), space.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const auto& rec = truth.records()[i];
        const auto it = rows.find(rec.id);
        if (it == rows.end())
            throw SchemaError("predictions file lacks a row for id '" + rec.id + "'");
        for (std::size_t j = 0; j < space.size(); ++j) {
            pred(i, j) = it->second.assigned[j];
            probs(i, j) = it->second.probs[j];
        }
    }
    return classification_report(pred, truth.label_matrix(), probs, space);
}

std::string render_tuning_table(const TuneResult& result) {
    std::vector<const TrialRecord*> order;
    for (const auto& t : result.trials) order.push_back(&t);
    std::stable_sort(order.begin(), order.end(), [](const TrialRecord* a, const TrialRecord* b) {
        return a->dev_macro_f1 > b->dev_macro_f1;
    });
    std::ostringstream out;
    out << std::setw(6) << "trial" << std::setw(12) << "eta" << std::setw(12) << "batch size"
        << std::setw(8) << "epochs" << std::setw(10) << "MacroF1" << std::setw(11) << "status"
        << '\n';
    for (const auto* t : order) {
        out << std::setw(6) << t->trial_id << std::setw(12) << std::scientific
            << std::setprecision(2) << t->config.learning_rate << std::defaultfloat
            << std::setw(12) << t->config.batch_size << std::setw(8) << t->config.num_epochs
            << std::setw(10) << std::fixed << std::setprecision(4) << t->dev_macro_f1
            << std::defaultfloat << std::setw(11)
            << (t->status == TrialStatus::kCompleted ? "completed" : "pruned") << '\n';
    }
    return out.str();
}

TuneOutcome run_tune(const ExperimentConfig& config, int trials, int max_threads,
                     std::ostream& log) {
    const Dataset data = resolve_dataset(config);
    const auto splits = prepare_splits(config, data);

    ModelConfig model_config = config.model;
    model_config.vocab_size = splits.vocab.size();
    model_config.max_len = config.encoding.max_len;
    model_config.num_classes = data.space().size();
    model_config.validate();

    const SearchSpace space; // the default ranges are the documented search space
    const TuneResult result = tune(space, trials, model_config, splits.train, splits.dev,
                                   config.train, derive_seed(config.seed, "tune"), max_threads);

    const std::string run_id = run_id_for(config, "tune");
    const std::filesystem::path run_dir = std::filesystem::path(config.output_dir) / run_id;
    std::filesystem::create_directories(run_dir);

    json trials_json = json::array();
    for (const auto& t : result.trials) {
        json row{{"trial", t.trial_id},
                 {"learning_rate", t.config.learning_rate},
                 {"batch_size", t.config.batch_size},
                 {"num_epochs", t.config.num_epochs},
                 {"dev_macro_f1", t.dev_macro_f1},
                 {"status", t.status == TrialStatus::kCompleted ? "completed" : "pruned"}};
        if (t.status == TrialStatus::kPruned) row["pruned_epoch"] = t.pruned_epoch;
        trials_json.push_back(row);
    }
    json report{{"trials", trials_json},
                {"best", result.best_config},
                {"all_pruned", result.all_pruned},
                {"timestamp", iso_timestamp()}};
    write_text_file(run_dir / "tuning_report.json", report.dump(2) + "\n");

    const std::string table = render_tuning_table(result);
    write_text_file(run_dir / "tuning_report.txt", table);

    // a full config profile directly consumable by the train command
    ExperimentConfig best = config;
    best.train = result.best_config;
    const json best_json = best;
    write_text_file(run_dir / "best_config.json", best_json.dump(2) + "\n");

    if (result.all_pruned) log << "warning: every trial was pruned; best is the top pruned trial\n";
    log << table;
    log << "artifacts in " << run_dir.string() << '\n';
    return {run_dir, result};
}

int env_thread_cap() {
    const char* raw = std::getenv("IMBALML_THREADS");
    if (raw == nullptr || *raw == '\0') return 1;
    char* end = nullptr;
    const long v = std::strtol(raw, &end, 10);
    if (end == raw || *end != '\0' || v < 1)
        throw ArgumentError("IMBALML_THREADS must be a positive integer");
    return static_cast<int>(v);
}

} // namespace imbalml
