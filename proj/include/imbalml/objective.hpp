#pragma once

#include <vector>

#include "imbalml/corpus.hpp"
#include "imbalml/matrix.hpp"

namespace imbalml {

// Per-class loss multipliers. Computed as max_k(f_k) / f_j, so the most
// frequent class carries weight exactly 1 and every other class at least 1.
struct ClassWeights {
    std::vector<double> w;
};

// floor_zero substitutes f_j <- 1 for empty classes instead of failing.
ClassWeights compute_class_weights(const LabelFrequencies& freq, bool floor_zero = false);

struct SmoothingConfig {
    double epsilon = 0.0; // in [0, 1)
};

// y' = (1 - eps) * y + eps / C, applied elementwise over a binary matrix.
Matrix smooth_labels(const LabelMatrix& targets, const SmoothingConfig& cfg);
Matrix smooth_labels(const Matrix& targets, const SmoothingConfig& cfg);

struct LossResult {
    double loss = 0.0;
    Matrix dlogits; // gradient w.r.t. pre-sigmoid logits, already divided by N
};

// Binary cross entropy, summed over classes and averaged over the batch.
// Probabilities are clamped to [1e-7, 1 - 1e-7] before the logarithms; the
// returned logit gradient (yhat - y)/N uses the fused sigmoid path and needs
// no clamp.
LossResult bce_loss(const Matrix& probs, const Matrix& targets);

// Same shape as bce_loss with w_j multiplying the whole per-class bracket.
// weight_positive_only restricts w_j to the positive term (ablation variant).
LossResult weighted_bce_loss(const Matrix& probs, const Matrix& targets, const ClassWeights& weights,
                             bool weight_positive_only = false);

// Reference categorical cross entropy over row-stochastic predictions.
double cross_entropy_loss(const Matrix& probs, const Matrix& one_hot_targets);

} // namespace imbalml
