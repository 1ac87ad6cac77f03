#include "imbalml/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace imbalml {

using nlohmann::json;

ConfusionCounts confusion_counts(const LabelMatrix& pred, const LabelMatrix& truth) {
    if (pred.rows != truth.rows || pred.cols != truth.cols)
        throw ContractError("confusion_counts: shape mismatch");
    ConfusionCounts counts;
    counts.tp.assign(pred.cols, 0);
    counts.fp.assign(pred.cols, 0);
    counts.fn.assign(pred.cols, 0);
    counts.tn.assign(pred.cols, 0);
    for (std::size_t i = 0; i < pred.rows; ++i) {
        for (std::size_t j = 0; j < pred.cols; ++j) {
            const bool p = pred(i, j) != 0;
            const bool t = truth(i, j) != 0;
            if (p && t) ++counts.tp[j];
            else if (p && !t) ++counts.fp[j];
            else if (!p && t) ++counts.fn[j];
            else ++counts.tn[j];
        }
    }
    return counts;
}

double f1_from_counts(long long tp, long long fp, long long fn) {
    const double denom = static_cast<double>(tp) + 0.5 * static_cast<double>(fp + fn);
    if (denom == 0.0) return 0.0;
    return static_cast<double>(tp) / denom;
}

double precision_from_counts(long long tp, long long fp) {
    return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double recall_from_counts(long long tp, long long fn) {
    return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double micro_f1(const ConfusionCounts& counts) {
    long long tp = 0, fp = 0, fn = 0;
    for (std::size_t j = 0; j < counts.num_classes(); ++j) {
        tp += counts.tp[j];
        fp += counts.fp[j];
        fn += counts.fn[j];
    }
    return f1_from_counts(tp, fp, fn);
}

double macro_f1(const std::vector<double>& per_class_f1) {
    if (per_class_f1.empty()) throw ArgumentError("macro_f1: empty class list");
    return std::accumulate(per_class_f1.begin(), per_class_f1.end(), 0.0) /
           static_cast<double>(per_class_f1.size());
}

double weighted_f1(const std::vector<double>& per_class_f1, const std::vector<long long>& supports) {
    if (per_class_f1.size() != supports.size())
        throw ContractError("weighted_f1: class count mismatch");
    long long total = 0;
    double sum = 0.0;
    for (std::size_t j = 0; j < supports.size(); ++j) {
        total += supports[j];
        sum += static_cast<double>(supports[j]) * per_class_f1[j];
    }
    if (total == 0) throw ArgumentError("weighted_f1: zero total support");
    return sum / static_cast<double>(total);
}

namespace {

struct RowStats {
    double precision, recall, f1;
};

// Per-row precision/recall/F1 with the empty-set conventions: an empty
// prediction against an empty truth scores 1 on all three.
RowStats row_stats(const LabelMatrix& pred, const LabelMatrix& truth, std::size_t i) {
    long long tp = 0, np = 0, nt = 0;
    for (std::size_t j = 0; j < pred.cols; ++j) {
        const bool p = pred(i, j) != 0;
        const bool t = truth(i, j) != 0;
        np += p;
        nt += t;
        tp += p && t;
    }
    RowStats s{};
    s.precision = np == 0 ? (nt == 0 ? 1.0 : 0.0) : static_cast<double>(tp) / static_cast<double>(np);
    s.recall = nt == 0 ? (np == 0 ? 1.0 : 0.0) : static_cast<double>(tp) / static_cast<double>(nt);
    if (np == 0 && nt == 0) s.f1 = 1.0;
    else s.f1 = f1_from_counts(tp, np - tp, nt - tp);
    return s;
}

void require_same_shape(const LabelMatrix& pred, const LabelMatrix& truth, const char* what) {
    if (pred.rows != truth.rows || pred.cols != truth.cols)
        throw ContractError(std::string(what) + ": shape mismatch");
    if (pred.rows == 0) throw ArgumentError(std::string(what) + ": empty input");
}

} // namespace

double sample_f1(const LabelMatrix& pred, const LabelMatrix& truth) {
    require_same_shape(pred, truth, "sample_f1");
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.rows; ++i) sum += row_stats(pred, truth, i).f1;
    return sum / static_cast<double>(pred.rows);
}

RocAucResult roc_auc_per_class(const Matrix& scores, const LabelMatrix& truth) {
    if (scores.rows() != truth.rows || scores.cols() != truth.cols)
        throw ContractError("roc_auc: shape mismatch");
    const std::size_t n = truth.rows, c = truth.cols;
    RocAucResult result;
    result.per_class.assign(c, std::numeric_limits<double>::quiet_NaN());
    result.evaluable.assign(c, false);

    std::vector<std::size_t> order(n);
    std::vector<double> rank(n);
    double total = 0.0;
    std::size_t evaluable = 0;
    for (std::size_t j = 0; j < c; ++j) {
        long long positives = 0;
        for (std::size_t i = 0; i < n; ++i) positives += truth(i, j) != 0;
        const long long negatives = static_cast<long long>(n) - positives;
        if (positives == 0 || negatives == 0) continue;

        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return scores(a, j) < scores(b, j); });
        // average ranks across tied scores (1-based)
        std::size_t i = 0;
        while (i < n) {
            std::size_t k = i;
            while (k + 1 < n && scores(order[k + 1], j) == scores(order[i], j)) ++k;
            const double avg = 0.5 * static_cast<double>(i + k) + 1.0;
            for (std::size_t t = i; t <= k; ++t) rank[order[t]] = avg;
            i = k + 1;
        }
        double rank_sum = 0.0;
        for (std::size_t r = 0; r < n; ++r)
            if (truth(r, j) != 0) rank_sum += rank[r];
        const double u = rank_sum - 0.5 * static_cast<double>(positives) *
                                        (static_cast<double>(positives) + 1.0);
        const double auc = u / (static_cast<double>(positives) * static_cast<double>(negatives));
        result.per_class[j] = auc;
        result.evaluable[j] = true;
        total += auc;
        ++evaluable;
    }
    if (evaluable > 0) result.macro = total / static_cast<double>(evaluable);
    else result.macro = std::numeric_limits<double>::quiet_NaN();
    return result;
}

double roc_auc(const Matrix& scores, const LabelMatrix& truth) {
    const auto result = roc_auc_per_class(scores, truth);
    if (std::none_of(result.evaluable.begin(), result.evaluable.end(), [](bool b) { return b; }))
        throw UndefinedMetricError("roc_auc: no class has both positives and negatives");
    return result.macro;
}

double subset_accuracy(const LabelMatrix& pred, const LabelMatrix& truth) {
    require_same_shape(pred, truth, "subset_accuracy");
    std::size_t exact = 0;
    for (std::size_t i = 0; i < pred.rows; ++i) {
        bool equal = true;
        for (std::size_t j = 0; j < pred.cols && equal; ++j)
            equal = (pred(i, j) != 0) == (truth(i, j) != 0);
        exact += equal;
    }
    return static_cast<double>(exact) / static_cast<double>(pred.rows);
}

double jaccard_score(const LabelMatrix& pred, const LabelMatrix& truth) {
    require_same_shape(pred, truth, "jaccard_score");
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.rows; ++i) {
        long long inter = 0, uni = 0;
        for (std::size_t j = 0; j < pred.cols; ++j) {
            const bool p = pred(i, j) != 0;
            const bool t = truth(i, j) != 0;
            inter += p && t;
            uni += p || t;
        }
        sum += uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
    }
    return sum / static_cast<double>(pred.rows);
}

MetricsReport classification_report(const LabelMatrix& pred, const LabelMatrix& truth,
                                    const Matrix& probs, const LabelSpace& space) {
    require_same_shape(pred, truth, "classification_report");
    if (truth.cols != space.size())
        throw ContractError("classification_report: class count != label space");

    const auto counts = confusion_counts(pred, truth);
    MetricsReport report;
    report.class_names = space.names();

    long long tp_sum = 0, fp_sum = 0, fn_sum = 0, support_sum = 0;
    double macro_p = 0.0, macro_r = 0.0, macro_f = 0.0;
    double weighted_p = 0.0, weighted_r = 0.0, weighted_f = 0.0;
    for (std::size_t j = 0; j < space.size(); ++j) {
        ReportRow row;
        row.precision = precision_from_counts(counts.tp[j], counts.fp[j]);
        row.recall = recall_from_counts(counts.tp[j], counts.fn[j]);
        row.f1 = f1_from_counts(counts.tp[j], counts.fp[j], counts.fn[j]);
        row.support = counts.support(j);
        report.per_class.push_back(row);

        tp_sum += counts.tp[j];
        fp_sum += counts.fp[j];
        fn_sum += counts.fn[j];
        support_sum += row.support;
        macro_p += row.precision;
        macro_r += row.recall;
        macro_f += row.f1;
        weighted_p += static_cast<double>(row.support) * row.precision;
        weighted_r += static_cast<double>(row.support) * row.recall;
        weighted_f += static_cast<double>(row.support) * row.f1;
    }

    const double c = static_cast<double>(space.size());
    report.micro = {precision_from_counts(tp_sum, fp_sum), recall_from_counts(tp_sum, fn_sum),
                    f1_from_counts(tp_sum, fp_sum, fn_sum), support_sum};
    report.macro = {macro_p / c, macro_r / c, macro_f / c, support_sum};
    if (support_sum > 0)
        report.weighted = {weighted_p / static_cast<double>(support_sum),
                           weighted_r / static_cast<double>(support_sum),
                           weighted_f / static_cast<double>(support_sum), support_sum};
    else
        report.weighted = {0.0, 0.0, 0.0, 0};

    double sp = 0.0, sr = 0.0, sf = 0.0;
    for (std::size_t i = 0; i < pred.rows; ++i) {
        const auto s = row_stats(pred, truth, i);
        sp += s.precision;
        sr += s.recall;
        sf += s.f1;
    }
    const double rows = static_cast<double>(pred.rows);
    report.samples = {sp / rows, sr / rows, sf / rows, support_sum};

    if (!probs.empty()) {
        probs.check_shape(truth.rows, truth.cols, "classification_report probabilities");
        const auto auc = roc_auc_per_class(probs, truth);
        if (std::any_of(auc.evaluable.begin(), auc.evaluable.end(), [](bool b) { return b; }))
            report.roc_auc = auc.macro;
    }
    report.subset_accuracy = subset_accuracy(pred, truth);
    report.jaccard = jaccard_score(pred, truth);
    return report;
}

namespace {

json row_to_json(const ReportRow& row) {
    return json{{"precision", row.precision},
                {"recall", row.recall},
                {"f1-score", row.f1},
                {"support", row.support}};
}

ReportRow row_from_json(const json& j) {
    return {j.at("precision").get<double>(), j.at("recall").get<double>(),
            j.at("f1-score").get<double>(), j.at("support").get<long long>()};
}

} // namespace

json MetricsReport::to_json() const {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["classes"] = class_names;
    json per;
    for (std::size_t k = 0; k < class_names.size(); ++k)
        per[class_names[k]] = row_to_json(per_class[k]);
    j["per_class"] = per;
    j["micro avg"] = row_to_json(micro);
    j["macro avg"] = row_to_json(macro);
    j["weighted avg"] = row_to_json(weighted);
    j["samples avg"] = row_to_json(samples);
    if (roc_auc) j["roc_auc"] = *roc_auc;
    else j["roc_auc"] = nullptr;
    j["subset_accuracy"] = subset_accuracy;
    j["jaccard"] = jaccard;
    return j;
}

MetricsReport MetricsReport::from_json(const json& j) {
    if (j.at("schema_version").get<int>() != kSchemaVersion)
        throw SchemaError("metrics report: unsupported schema version");
    MetricsReport report;
    report.class_names = j.at("classes").get<std::vector<std::string>>();
    for (const auto& name : report.class_names)
        report.per_class.push_back(row_from_json(j.at("per_class").at(name)));
    report.micro = row_from_json(j.at("micro avg"));
    report.macro = row_from_json(j.at("macro avg"));
    report.weighted = row_from_json(j.at("weighted avg"));
    report.samples = row_from_json(j.at("samples avg"));
    if (!j.at("roc_auc").is_null()) report.roc_auc = j.at("roc_auc").get<double>();
    report.subset_accuracy = j.at("subset_accuracy").get<double>();
    report.jaccard = j.at("jaccard").get<double>();
    return report;
}

std::string MetricsReport::to_text() const {
    std::size_t label_width = 12; // fits "weighted avg"
    for (const auto& name : class_names) label_width = std::max(label_width, name.size());

    std::ostringstream out;
    out << std::fixed << std::setprecision(4);
    const auto line = [&](const std::string& label, const ReportRow& row) {
        out << std::setw(static_cast<int>(label_width)) << label << "  " << std::setw(9)
            << row.precision << std::setw(10) << row.recall << std::setw(10) << row.f1
            << std::setw(10) << row.support << '\n';
    };

    out << std::setw(static_cast<int>(label_width)) << "" << "  " << std::setw(9) << "precision"
        << std::setw(10) << "recall" << std::setw(10) << "f1-score" << std::setw(10) << "support"
        << "\n\n";
    for (std::size_t k = 0; k < class_names.size(); ++k) line(class_names[k], per_class[k]);
    out << '\n';
    line("micro avg", micro);
    line("macro avg", macro);
    line("weighted avg", weighted);
    line("samples avg", samples);
    out << '\n';
    out << std::setw(static_cast<int>(label_width)) << "roc_auc" << "  ";
    if (roc_auc) out << std::setw(9) << *roc_auc << '\n';
    else out << std::setw(9) << "n/a" << '\n';
    out << std::setw(static_cast<int>(label_width)) << "accuracy" << "  " << std::setw(9)
        << subset_accuracy << '\n';
    out << std::setw(static_cast<int>(label_width)) << "jaccard" << "  " << std::setw(9) << jaccard
        << '\n';
    return out.str();
}

} // namespace imbalml
