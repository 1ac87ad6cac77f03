#pragma once

// Brute-force reference implementations used only by tests. These stay
// deliberately naive and independent of the library's computation paths.

#include <cmath>
#include <vector>

#include "imbalml/matrix.hpp"
#include "imbalml/rng.hpp"

namespace oracle {

using imbalml::LabelMatrix;
using imbalml::Matrix;

inline double clamp01(double p) {
    const double eps = 1e-7;
    if (p < eps) return eps;
    if (p > 1.0 - eps) return 1.0 - eps;
    return p;
}

inline double naive_weighted_bce(const Matrix& probs, const Matrix& targets,
                                 const std::vector<double>& w) {
    double total = 0.0;
    for (std::size_t i = 0; i < probs.rows(); ++i)
        for (std::size_t j = 0; j < probs.cols(); ++j) {
            const double p = clamp01(probs(i, j));
            const double y = targets(i, j);
            total += w[j] * (y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
        }
    return -total / static_cast<double>(probs.rows());
}

inline double naive_bce(const Matrix& probs, const Matrix& targets) {
    return naive_weighted_bce(probs, targets, std::vector<double>(probs.cols(), 1.0));
}

inline double naive_cross_entropy(const Matrix& probs, const Matrix& targets) {
    double total = 0.0;
    for (std::size_t i = 0; i < probs.rows(); ++i)
        for (std::size_t j = 0; j < probs.cols(); ++j)
            total += targets(i, j) * std::log(clamp01(probs(i, j)));
    return -total / static_cast<double>(probs.rows());
}

struct Tally {
    long long tp = 0, fp = 0, fn = 0, tn = 0;
};

inline Tally tally_class(const LabelMatrix& pred, const LabelMatrix& truth, std::size_t j) {
    Tally t;
    for (std::size_t i = 0; i < pred.rows; ++i) {
        const bool p = pred(i, j) != 0;
        const bool y = truth(i, j) != 0;
        if (p && y) ++t.tp;
        if (p && !y) ++t.fp;
        if (!p && y) ++t.fn;
        if (!p && !y) ++t.tn;
    }
    return t;
}

inline double f1_of(long long tp, long long fp, long long fn) {
    const double denom = static_cast<double>(tp) + 0.5 * static_cast<double>(fp + fn);
    return denom == 0.0 ? 0.0 : static_cast<double>(tp) / denom;
}

// O(P*N) pairwise AUC: ties count one half.
inline double pairwise_auc(const std::vector<double>& scores, const std::vector<int>& truth) {
    double wins = 0.0;
    long long pairs = 0;
    for (std::size_t a = 0; a < scores.size(); ++a) {
        if (truth[a] != 1) continue;
        for (std::size_t b = 0; b < scores.size(); ++b) {
            if (truth[b] != 0) continue;
            ++pairs;
            if (scores[a] > scores[b]) wins += 1.0;
            else if (scores[a] == scores[b]) wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

inline double row_loop_sample_f1(const LabelMatrix& pred, const LabelMatrix& truth) {
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.rows; ++i) {
        long long tp = 0, np = 0, nt = 0;
        for (std::size_t j = 0; j < pred.cols; ++j) {
            np += pred(i, j) != 0;
            nt += truth(i, j) != 0;
            tp += pred(i, j) != 0 && truth(i, j) != 0;
        }
        if (np == 0 && nt == 0) sum += 1.0;
        else sum += f1_of(tp, np - tp, nt - tp);
    }
    return sum / static_cast<double>(pred.rows);
}

inline double row_loop_jaccard(const LabelMatrix& pred, const LabelMatrix& truth) {
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.rows; ++i) {
        long long inter = 0, uni = 0;
        for (std::size_t j = 0; j < pred.cols; ++j) {
            inter += pred(i, j) != 0 && truth(i, j) != 0;
            uni += pred(i, j) != 0 || truth(i, j) != 0;
        }
        sum += uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
    }
    return sum / static_cast<double>(pred.rows);
}

inline double row_loop_subset_accuracy(const LabelMatrix& pred, const LabelMatrix& truth) {
    long long hits = 0;
    for (std::size_t i = 0; i < pred.rows; ++i) {
        bool same = true;
        for (std::size_t j = 0; j < pred.cols; ++j)
            if ((pred(i, j) != 0) != (truth(i, j) != 0)) same = false;
        hits += same;
    }
    return static_cast<double>(hits) / static_cast<double>(pred.rows);
}

inline LabelMatrix random_labels(imbalml::Rng& rng, std::size_t rows, std::size_t cols,
                                 double density = 0.4) {
    LabelMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.bernoulli(density) ? 1 : 0;
    return m;
}

inline Matrix random_matrix(imbalml::Rng& rng, std::size_t rows, std::size_t cols, double lo,
                            double hi) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
    return m;
}

// Builds a (pred, truth) pair whose columnwise confusion counts match the
// given per-class TP/FP/FN exactly, padding with true negatives up to n rows.
inline std::pair<LabelMatrix, LabelMatrix>
matrices_from_counts(const std::vector<long long>& tp, const std::vector<long long>& fp,
                     const std::vector<long long>& fn, std::size_t n) {
    const std::size_t c = tp.size();
    LabelMatrix pred(n, c), truth(n, c);
    for (std::size_t j = 0; j < c; ++j) {
        std::size_t row = 0;
        for (long long k = 0; k < tp[j]; ++k, ++row) {
            pred(row, j) = 1;
            truth(row, j) = 1;
        }
        for (long long k = 0; k < fp[j]; ++k, ++row) pred(row, j) = 1;
        for (long long k = 0; k < fn[j]; ++k, ++row) truth(row, j) = 1;
    }
    return {pred, truth};
}

} // namespace oracle
