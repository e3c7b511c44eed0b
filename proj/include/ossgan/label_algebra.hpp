#pragma once

// Probability-vector arithmetic for conditioning labels: normalized entropy,
// one-hot encoding, thresholded pseudo-labeling, and the K -> K+1 extension
// used by the open-set condition. Class indices are 0-based in storage; the
// e^(i) notation in comments is 1-based.

#include <cstdint>
#include <vector>

namespace ossgan {

class ProbVector {
public:
    // validates: entries >= 0, sum within 1e-6 of 1, K >= 2
    explicit ProbVector(std::vector<double> values);

    static ProbVector one_hot(int64_t k, int64_t index);

    const std::vector<double>& values() const { return values_; }
    int64_t k() const { return static_cast<int64_t>(values_.size()); }
    double operator[](int64_t i) const { return values_[static_cast<size_t>(i)]; }
    bool is_one_hot() const;

private:
    std::vector<double> values_;
};

class ExtendedLabel {
public:
    // validates: exactly one entry equals 1, the rest 0
    explicit ExtendedLabel(std::vector<double> values);

    static ExtendedLabel closed(int64_t k, int64_t index);  // e^(index+1) of R^{K+1}
    static ExtendedLabel open(int64_t k);                    // e^(K+1)

    const std::vector<double>& values() const { return values_; }
    int64_t k() const { return static_cast<int64_t>(values_.size()) - 1; }
    int64_t index() const { return index_; }
    bool is_open() const { return index_ == k(); }

private:
    std::vector<double> values_;
    int64_t index_ = -1;
};

struct Threshold {
    double c = 0.0;
    explicit Threshold(double value);  // validates 0 <= c <= 1
};

// -(sum_i p_i log p_i) / log K, natural log, entries clamped below at 1e-12
// inside the logarithm so exact zeros contribute nothing; result in [0,1]
double normalized_entropy(const ProbVector& p);

// index of the maximal entry, ties broken to the lowest index
int64_t argmax_label(const ProbVector& p);

// e^(argmax p) embedded in K+1 dimensions when max(p) >= c, else e^(K+1)
ExtendedLabel threshold_label_extended(const ProbVector& p, Threshold c);

// true iff max(p) >= c: the sample survives confidence filtering
bool reject_mask(const ProbVector& p, Threshold c);

// y^T I_{K,K+1}: appends a zero open-class coordinate to a one-hot label
ExtendedLabel pad_label(const ProbVector& y);

ProbVector uniform_label(int64_t k);

// s = [0, 1, ..., K-1]^T so that dot(y, s) extracts a 0-based class index
std::vector<double> index_vector(int64_t k);

}  // namespace ossgan
