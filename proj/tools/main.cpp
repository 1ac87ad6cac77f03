#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "imbalml/experiment.hpp"
#include "imbalml/rng.hpp"

using namespace imbalml;
using nlohmann::json;

namespace {

DataFormat parse_format(const std::string& s) {
    if (s == "csv") return DataFormat::kCsv;
    if (s == "jsonl") return DataFormat::kJsonl;
    throw ArgumentError("unknown format '" + s + "' (expected csv or jsonl)");
}

LabelSpace space_from_flag(const std::vector<std::string>& classes) {
    if (classes.empty()) return LabelSpace::default_emotions();
    return LabelSpace(classes);
}

// Rewrites leftover `--a.b.c value` / `--a.b.c=value` args as key.path=value
// override specs.
std::vector<std::string> overrides_from_extras(const std::vector<std::string>& extras) {
    std::vector<std::string> overrides;
    for (std::size_t i = 0; i < extras.size(); ++i) {
        std::string arg = extras[i];
        if (arg.rfind("--", 0) != 0)
            throw ArgumentError("unexpected argument '" + arg + "' (overrides look like --key.path value)");
        arg = arg.substr(2);
        if (arg.find('=') != std::string::npos) {
            overrides.push_back(arg);
            continue;
        }
        if (i + 1 >= extras.size())
            throw ArgumentError("override '--" + arg + "' is missing its value");
        overrides.push_back(arg + "=" + extras[++i]);
    }
    return overrides;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write file: " + path.string());
    out << j.dump(2) << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted-loss pipeline for imbalanced multi-label emotion detection"};
    app.require_subcommand(1);

    std::string config_path, checkpoint, vocab_path, data_path, pred_path, texts_path, out_path;
    std::string format_name = "csv";
    std::vector<std::string> classes;
    double tau = 0.5;
    bool no_fallback = false;
    bool use_class_weights = false;
    std::uint64_t seed_flag = 0;
    bool seed_given = false;
    int trials = 10;
    std::string json_out;

    auto* cmd_train = app.add_subcommand("train", "Train a model from an experiment config");
    cmd_train->add_option("--config", config_path, "experiment config JSON")->required();
    cmd_train->add_flag("--use-class-weights", use_class_weights, "enable the weighted loss");
    cmd_train->add_option("--seed", seed_flag, "override the top-level seed")
        ->each([&](const std::string&) { seed_given = true; });
    cmd_train->add_option("--out", out_path, "override the output directory");
    cmd_train->allow_extras();

    auto* cmd_eval = app.add_subcommand("eval", "Evaluate a checkpoint on a labelled dataset");
    cmd_eval->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
    cmd_eval->add_option("--data", data_path, "labelled dataset")->required();
    cmd_eval->add_option("--format", format_name, "csv or jsonl");
    cmd_eval->add_option("--classes", classes, "class names (default: emotion set)")->delimiter(',');
    cmd_eval->add_option("--vocab", vocab_path, "vocabulary file (default: next to checkpoint)");
    cmd_eval->add_option("--tau", tau, "assignment threshold");
    cmd_eval->add_flag("--no-fallback", no_fallback, "disable the argmax fallback");
    cmd_eval->add_option("--json", json_out, "also write the JSON report here");

    auto* cmd_predict = app.add_subcommand("predict", "Predict labels for raw texts");
    cmd_predict->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
    cmd_predict->add_option("--texts", texts_path, "file with one text per line")->required();
    cmd_predict->add_option("--out", out_path, "output predictions JSONL")->required();
    cmd_predict->add_option("--vocab", vocab_path, "vocabulary file (default: next to checkpoint)");
    cmd_predict->add_option("--classes", classes, "class names (default: from the run manifest)")
        ->delimiter(',');
    cmd_predict->add_option("--tau", tau, "assignment threshold");
    cmd_predict->add_flag("--no-fallback", no_fallback, "disable the argmax fallback");

    auto* cmd_tune = app.add_subcommand("tune", "Random-search hyperparameters with pruning");
    cmd_tune->add_option("--config", config_path, "experiment config JSON")->required();
    cmd_tune->add_option("--trials", trials, "trial budget");
    cmd_tune->add_option("--seed", seed_flag, "override the top-level seed")
        ->each([&](const std::string&) { seed_given = true; });
    cmd_tune->add_option("--out", out_path, "override the output directory");
    cmd_tune->allow_extras();

    auto* cmd_synth = app.add_subcommand("synth", "Generate a synthetic imbalanced corpus");
    cmd_synth->add_option("--config", config_path, "generator config JSON")->required();
    cmd_synth->add_option("--out", out_path, "output dataset file")->required();
    cmd_synth->add_option("--format", format_name, "csv or jsonl");
    cmd_synth->add_option("--seed", seed_flag, "generator seed")
        ->each([&](const std::string&) { seed_given = true; });

    auto* cmd_stats = app.add_subcommand("stats", "Per-class label distribution of a dataset");
    cmd_stats->add_option("--data", data_path, "dataset file")->required();
    cmd_stats->add_option("--format", format_name, "csv or jsonl");
    cmd_stats->add_option("--classes", classes, "class names (default: emotion set)")->delimiter(',');
    cmd_stats->add_option("--out", out_path, "write plot-ready class,count CSV here");

    auto* cmd_report = app.add_subcommand("report", "Classification report from stored predictions");
    cmd_report->add_option("--pred", pred_path, "predictions JSONL")->required();
    cmd_report->add_option("--data", data_path, "truth dataset")->required();
    cmd_report->add_option("--format", format_name, "csv or jsonl");
    cmd_report->add_option("--classes", classes, "class names (default: emotion set)")->delimiter(',');
    cmd_report->add_option("--json", json_out, "also write the JSON report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }

    try {
        if (*cmd_train) {
            auto overrides = overrides_from_extras(cmd_train->remaining());
            if (use_class_weights) overrides.push_back("train.use_class_weights=true");
            if (seed_given) overrides.push_back("seed=" + std::to_string(seed_flag));
            if (!out_path.empty()) overrides.push_back("output_dir=" + out_path);
            const auto config = load_experiment_config(config_path, overrides);
            run_train(config, std::cout);
        } else if (*cmd_eval) {
            const PredictionPolicy policy{tau, !no_fallback};
            const auto report = run_eval(checkpoint, vocab_path, data_path,
                                         parse_format(format_name), space_from_flag(classes),
                                         policy, std::cout);
            if (!json_out.empty()) write_json_file(json_out, report.to_json());
        } else if (*cmd_predict) {
            const PredictionPolicy policy{tau, !no_fallback};
            run_predict(checkpoint, vocab_path, texts_path, policy, out_path, classes);
        } else if (*cmd_tune) {
            auto overrides = overrides_from_extras(cmd_tune->remaining());
            if (seed_given) overrides.push_back("seed=" + std::to_string(seed_flag));
            if (!out_path.empty()) overrides.push_back("output_dir=" + out_path);
            const auto config = load_experiment_config(config_path, overrides);
            run_tune(config, trials, env_thread_cap(), std::cout);
        } else if (*cmd_synth) {
            std::ifstream in(config_path);
            if (!in) throw ArgumentError("cannot open config file: " + config_path);
            json doc = json::parse(in);
            SyntheticConfig synth;
            if (doc.contains("n")) doc.at("n").get_to(synth.n);
            if (doc.contains("classes")) doc.at("classes").get_to(synth.class_names);
            if (doc.contains("prevalence")) doc.at("prevalence").get_to(synth.prevalence);
            if (doc.contains("cue_tokens")) doc.at("cue_tokens").get_to(synth.cue_tokens);
            if (doc.contains("noise_rate")) doc.at("noise_rate").get_to(synth.noise_rate);
            if (doc.contains("noise_vocab_size"))
                doc.at("noise_vocab_size").get_to(synth.noise_vocab_size);
            if (doc.contains("noise_slots")) doc.at("noise_slots").get_to(synth.noise_slots);
            const auto data = generate_synthetic(synth, seed_given ? seed_flag : 42);
            save_dataset(data, out_path, parse_format(format_name));
            std::cout << "wrote " << data.size() << " records to " << out_path << '\n';
        } else if (*cmd_stats) {
            const auto space = space_from_flag(classes);
            const auto data = load_dataset(data_path, parse_format(format_name), space);
            const auto freq = label_frequencies(data);
            std::cout << "class,count,fraction\n";
            for (std::size_t j = 0; j < space.size(); ++j) {
                const double frac =
                    freq.total == 0 ? 0.0
                                    : static_cast<double>(freq.counts[j]) /
                                          static_cast<double>(freq.total);
                std::cout << space.names()[j] << ',' << freq.counts[j] << ',' << frac << '\n';
            }
            std::cout << "total," << freq.total << ",1\n";
            if (!out_path.empty()) {
                std::ofstream out(out_path, std::ios::binary);
                if (!out) throw ArgumentError("cannot write file: " + out_path);
                out << "class,count\n";
                for (std::size_t j = 0; j < space.size(); ++j)
                    out << space.names()[j] << ',' << freq.counts[j] << '\n';
            }
        } else if (*cmd_report) {
            const auto report = report_from_predictions(pred_path, data_path,
                                                        parse_format(format_name),
                                                        space_from_flag(classes));
            std::cout << report.to_text();
            if (!json_out.empty()) write_json_file(json_out, report.to_json());
        }
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const EmptyDatasetError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
