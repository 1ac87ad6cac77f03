#pragma once

#include "imbalml/matrix.hpp"

namespace imbalml {

struct PredictionPolicy {
    double tau = 0.5;     // threshold in (0, 1)
    bool fallback = true; // argmax fallback when no probability reaches tau
};

struct PredictionSet {
    Matrix probs;         // batch x C sigmoid outputs
    LabelMatrix assigned; // batch x C binary assignments
};

// Elementwise, numerically stable sigmoid.
double sigmoid(double z);
Matrix predict_probs(const Matrix& logits);

// Label j is assigned iff p_j >= tau; with fallback on, a row with no such j
// gets exactly the argmax-logit class (ties to the lowest class index).
PredictionSet assign_labels(const Matrix& probs, const Matrix& logits, const PredictionPolicy& policy);

// Convenience for the common logits-only call path.
PredictionSet predict(const Matrix& logits, const PredictionPolicy& policy);

} // namespace imbalml
