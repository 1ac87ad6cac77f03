#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "imbalml/corpus.hpp"
#include "imbalml/matrix.hpp"

namespace imbalml {

// Columnwise confusion tallies; support_j = TP_j + FN_j.
struct ConfusionCounts {
    std::vector<long long> tp, fp, fn, tn;

    std::size_t num_classes() const { return tp.size(); }
    long long support(std::size_t j) const { return tp[j] + fn[j]; }
};

ConfusionCounts confusion_counts(const LabelMatrix& pred, const LabelMatrix& truth);

// F1 = TP / (TP + (FP + FN)/2); zero when the class saw no activity.
double f1_from_counts(long long tp, long long fp, long long fn);
double precision_from_counts(long long tp, long long fp);
double recall_from_counts(long long tp, long long fn);

double micro_f1(const ConfusionCounts& counts);
double macro_f1(const std::vector<double>& per_class_f1);
double weighted_f1(const std::vector<double>& per_class_f1, const std::vector<long long>& supports);
double sample_f1(const LabelMatrix& pred, const LabelMatrix& truth);

// Per-class Mann-Whitney AUC with tied scores counted 1/2, macro-averaged
// over classes that have at least one positive and one negative.
struct RocAucResult {
    double macro = 0.0;
    std::vector<double> per_class;   // NaN for skipped classes
    std::vector<bool> evaluable;
};
RocAucResult roc_auc_per_class(const Matrix& scores, const LabelMatrix& truth);
double roc_auc(const Matrix& scores, const LabelMatrix& truth); // throws when no class is evaluable

double subset_accuracy(const LabelMatrix& pred, const LabelMatrix& truth);
double jaccard_score(const LabelMatrix& pred, const LabelMatrix& truth);

struct ReportRow {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    long long support = 0;

    bool operator==(const ReportRow& other) const = default;
};

// Mirrors the sklearn classification-report layout: one row per class plus
// micro/macro/weighted/samples aggregates, with the ranking metrics appended.
struct MetricsReport {
    static constexpr int kSchemaVersion = 1;

    std::vector<std::string> class_names;
    std::vector<ReportRow> per_class;
    ReportRow micro, macro, weighted, samples;
    std::optional<double> roc_auc; // absent when no class was evaluable
    double subset_accuracy = 0.0;
    double jaccard = 0.0;

    nlohmann::json to_json() const;
    static MetricsReport from_json(const nlohmann::json& j);
    std::string to_text() const; // 4-decimal fixed-width rendering

    bool operator==(const MetricsReport& other) const = default;
};

MetricsReport classification_report(const LabelMatrix& pred, const LabelMatrix& truth,
                                    const Matrix& probs, const LabelSpace& space);

} // namespace imbalml
