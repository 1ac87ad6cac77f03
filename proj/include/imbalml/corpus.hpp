#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "imbalml/errors.hpp"
#include "imbalml/matrix.hpp"

namespace imbalml {

// Ordered set of class names. Column j of every label matrix belongs to
// names()[j].
class LabelSpace {
public:
    explicit LabelSpace(std::vector<std::string> names);

    static LabelSpace default_emotions(); // anger, fear, joy, sadness, surprise

    const std::vector<std::string>& names() const { return names_; }
    std::size_t size() const { return names_.size(); }
    std::optional<std::size_t> index_of(const std::string& name) const;

    bool operator==(const LabelSpace& other) const = default;

private:
    std::vector<std::string> names_;
};

struct Record {
    std::string id;
    std::string text;
    std::vector<std::uint8_t> labels; // length C, entries in {0,1}

    bool operator==(const Record& other) const = default;
};

class Dataset {
public:
    Dataset(LabelSpace space, std::vector<Record> records);

    const LabelSpace& space() const { return space_; }
    const std::vector<Record>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }

    LabelMatrix label_matrix() const;

    bool operator==(const Dataset& other) const = default;

private:
    LabelSpace space_;
    std::vector<Record> records_;
};

struct LabelFrequencies {
    std::vector<long long> counts; // positives per class
    long long total = 0;           // record count N
};

enum class DataFormat { kCsv, kJsonl };

// CSV header must be exactly `id,text,<class names...>`; JSONL objects must
// carry `id`, `text` and one 0/1 field per class.
Dataset load_dataset(const std::filesystem::path& path, DataFormat format, const LabelSpace& space);
void save_dataset(const Dataset& data, const std::filesystem::path& path, DataFormat format);

// Seeded shuffle then prefix split. Train size is floor(N * fraction), which
// reproduces the usual truncating percent split (2768 at 0.70 -> 1937/831).
std::pair<Dataset, Dataset> split_train_dev(const Dataset& data, double train_fraction,
                                            std::uint64_t seed, bool stratified = false);

LabelFrequencies label_frequencies(const Dataset& data);

struct SyntheticConfig {
    std::size_t n = 1000;
    std::vector<std::string> class_names;           // defaults to the emotion set
    std::vector<double> prevalence;                 // per-class positive rate in [0,1]
    std::vector<std::vector<std::string>> cue_tokens; // per-class cue vocabulary; defaulted from names
    double noise_rate = 0.3;                        // chance each of the noise slots emits a filler token
    std::size_t noise_vocab_size = 40;
    std::size_t noise_slots = 8;
};

// Labels are sampled first (per-class Bernoulli), then the text is assembled
// from one cue token per positive class plus noise tokens.
Dataset generate_synthetic(const SyntheticConfig& config, std::uint64_t seed);

} // namespace imbalml
