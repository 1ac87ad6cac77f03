#include "imbalml/inference.hpp"

#include <cmath>

namespace imbalml {

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

Matrix predict_probs(const Matrix& logits) {
    Matrix probs(logits.rows(), logits.cols());
    const double* in = logits.data();
    double* out = probs.data();
    for (std::size_t i = 0; i < logits.size(); ++i) out[i] = sigmoid(in[i]);
    return probs;
}

PredictionSet assign_labels(const Matrix& probs, const Matrix& logits,
                            const PredictionPolicy& policy) {
    if (!(policy.tau > 0.0) || !(policy.tau < 1.0))
        throw ArgumentError("threshold tau must lie in (0, 1)");
    probs.check_shape(logits.rows(), logits.cols(), "assign_labels");

    const std::size_t n = probs.rows(), c = probs.cols();
    PredictionSet out;
    out.probs = probs;
    out.assigned = LabelMatrix(n, c);
    for (std::size_t i = 0; i < n; ++i) {
        bool any = false;
        for (std::size_t j = 0; j < c; ++j) {
            if (probs(i, j) >= policy.tau) {
                out.assigned(i, j) = 1;
                any = true;
            }
        }
        if (!any && policy.fallback && c > 0) {
            std::size_t best = 0;
            for (std::size_t j = 1; j < c; ++j)
                if (logits(i, j) > logits(i, best)) best = j;
            out.assigned(i, best) = 1;
        }
    }
    return out;
}

PredictionSet predict(const Matrix& logits, const PredictionPolicy& policy) {
    return assign_labels(predict_probs(logits), logits, policy);
}

} // namespace imbalml
