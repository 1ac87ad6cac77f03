#include "imbalml/objective.hpp"

#include <algorithm>
#include <cmath>

namespace imbalml {

namespace {
constexpr double kProbClamp = 1e-7;

double clamp_prob(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

Matrix to_matrix(const LabelMatrix& m) {
    Matrix out(m.rows, m.cols);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) out(i, j) = m(i, j);
    return out;
}
} // namespace

ClassWeights compute_class_weights(const LabelFrequencies& freq, bool floor_zero) {
    if (freq.counts.empty()) throw ArgumentError("class weights need at least one class");
    std::vector<double> f(freq.counts.size());
    for (std::size_t j = 0; j < freq.counts.size(); ++j) {
        if (freq.counts[j] < 0) throw ArgumentError("negative class frequency");
        if (freq.counts[j] == 0) {
            if (!floor_zero)
                throw ArgumentError("class " + std::to_string(j) +
                                    " has zero frequency; drop the class or enable the floor flag");
            f[j] = 1.0;
        } else {
            f[j] = static_cast<double>(freq.counts[j]);
        }
    }
    const double fmax = *std::max_element(f.begin(), f.end());
    ClassWeights weights;
    weights.w.resize(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) weights.w[j] = fmax / f[j];
    return weights;
}

Matrix smooth_labels(const LabelMatrix& targets, const SmoothingConfig& cfg) {
    return smooth_labels(to_matrix(targets), cfg);
}

Matrix smooth_labels(const Matrix& targets, const SmoothingConfig& cfg) {
    if (cfg.epsilon < 0.0 || cfg.epsilon >= 1.0)
        throw ArgumentError("smoothing epsilon must lie in [0, 1)");
    if (cfg.epsilon == 0.0) return targets;
    const double c = static_cast<double>(targets.cols());
    Matrix out = targets;
    double* p = out.data();
    for (std::size_t i = 0; i < out.size(); ++i)
        p[i] = (1.0 - cfg.epsilon) * p[i] + cfg.epsilon / c;
    return out;
}

LossResult bce_loss(const Matrix& probs, const Matrix& targets) {
    ClassWeights unit;
    unit.w.assign(probs.cols(), 1.0);
    return weighted_bce_loss(probs, targets, unit);
}

LossResult weighted_bce_loss(const Matrix& probs, const Matrix& targets, const ClassWeights& weights,
                             bool weight_positive_only) {
    probs.check_shape(targets.rows(), targets.cols(), "weighted_bce_loss");
    if (weights.w.size() != probs.cols())
        throw ContractError("weighted_bce_loss: weight vector length != class count");
    const std::size_t n = probs.rows(), c = probs.cols();
    if (n == 0) throw ArgumentError("weighted_bce_loss: empty batch");
    for (std::size_t i = 0; i < targets.size(); ++i)
        if (!(targets.data()[i] >= 0.0 && targets.data()[i] <= 1.0))
            throw ContractError("weighted_bce_loss: targets must lie in [0, 1]");

    const double inv_n = 1.0 / static_cast<double>(n);
    double loss = 0.0;
    Matrix dlogits(n, c);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            const double y = targets(i, j);
            const double p = probs(i, j);
            const double pc = clamp_prob(p);
            const double w = weights.w[j];
            if (weight_positive_only) {
                loss -= w * y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc);
                dlogits(i, j) = ((1.0 - y) * p - w * y * (1.0 - p)) * inv_n;
            } else {
                loss -= w * (y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc));
                dlogits(i, j) = w * (p - y) * inv_n;
            }
        }
    }
    return {loss * inv_n, std::move(dlogits)};
}

double cross_entropy_loss(const Matrix& probs, const Matrix& one_hot_targets) {
    probs.check_shape(one_hot_targets.rows(), one_hot_targets.cols(), "cross_entropy_loss");
    const std::size_t n = probs.rows(), c = probs.cols();
    if (n == 0) throw ArgumentError("cross_entropy_loss: empty batch");

    for (std::size_t i = 0; i < n; ++i) {
        double row_sum = 0.0;
        double target_sum = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            row_sum += probs(i, j);
            const double y = one_hot_targets(i, j);
            if (y != 0.0 && y != 1.0)
                throw ContractError("cross_entropy_loss: targets must be one-hot");
            target_sum += y;
        }
        if (std::abs(row_sum - 1.0) > 1e-6)
            throw ContractError("cross_entropy_loss: prediction row " + std::to_string(i) +
                                " does not sum to 1");
        if (target_sum != 1.0)
            throw ContractError("cross_entropy_loss: target row " + std::to_string(i) +
                                " is not one-hot");
    }

    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < c; ++j)
            if (one_hot_targets(i, j) == 1.0) loss -= std::log(clamp_prob(probs(i, j)));
    return loss / static_cast<double>(n);
}

} // namespace imbalml
