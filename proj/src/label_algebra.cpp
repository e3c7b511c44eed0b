#include "ossgan/label_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ossgan/errors.hpp"

namespace ossgan {

namespace {
constexpr double kSumTol = 1e-6;
constexpr double kLogEps = 1e-12;
}  // namespace

ProbVector::ProbVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2)
        throw ValidationError("ProbVector: need K >= 2, got K = " +
                              std::to_string(values_.size()));
    double sum = 0.0;
    for (double v : values_) {
        if (v < 0.0)
            throw ValidationError("ProbVector: negative entry " +
                                  std::to_string(v));
        sum += v;
    }
    if (std::fabs(sum - 1.0) > kSumTol)
        throw ValidationError("ProbVector: entries sum to " +
                              std::to_string(sum) + ", expected 1");
}

ProbVector ProbVector::one_hot(int64_t k, int64_t index) {
    if (k < 2 || index < 0 || index >= k)
        throw ValidationError("one_hot: index " + std::to_string(index) +
                              " out of range for K = " + std::to_string(k));
    std::vector<double> v(static_cast<size_t>(k), 0.0);
    v[static_cast<size_t>(index)] = 1.0;
    return ProbVector(std::move(v));
}

bool ProbVector::is_one_hot() const {
    int ones = 0;
    for (double v : values_) {
        if (v == 1.0)
            ++ones;
        else if (v != 0.0)
            return false;
    }
    return ones == 1;
}

ExtendedLabel::ExtendedLabel(std::vector<double> values)
    : values_(std::move(values)) {
    if (values_.size() < 3)
        throw ValidationError("ExtendedLabel: need K+1 >= 3 entries");
    for (size_t i = 0; i < values_.size(); ++i) {
        if (values_[i] == 1.0) {
            if (index_ >= 0)
                throw ValidationError("ExtendedLabel: more than one hot entry");
            index_ = static_cast<int64_t>(i);
        } else if (values_[i] != 0.0) {
            throw ValidationError("ExtendedLabel: entry " +
                                  std::to_string(values_[i]) +
                                  " is neither 0 nor 1");
        }
    }
    if (index_ < 0) throw ValidationError("ExtendedLabel: no hot entry");
}

ExtendedLabel ExtendedLabel::closed(int64_t k, int64_t index) {
    if (index < 0 || index >= k)
        throw ValidationError("ExtendedLabel::closed: bad index");
    std::vector<double> v(static_cast<size_t>(k + 1), 0.0);
    v[static_cast<size_t>(index)] = 1.0;
    return ExtendedLabel(std::move(v));
}

ExtendedLabel ExtendedLabel::open(int64_t k) {
    std::vector<double> v(static_cast<size_t>(k + 1), 0.0);
    v.back() = 1.0;
    return ExtendedLabel(std::move(v));
}

Threshold::Threshold(double value) : c(value) {
    if (!(value >= 0.0 && value <= 1.0))
        throw ValidationError("Threshold: c = " + std::to_string(value) +
                              " outside [0, 1]");
}

double normalized_entropy(const ProbVector& p) {
    double h = 0.0;
    for (double v : p.values()) h -= v * std::log(std::max(v, kLogEps));
    h /= std::log(static_cast<double>(p.k()));
    return std::clamp(h, 0.0, 1.0);
}

int64_t argmax_label(const ProbVector& p) {
    const auto& v = p.values();
    return std::distance(v.begin(), std::max_element(v.begin(), v.end()));
}

ExtendedLabel threshold_label_extended(const ProbVector& p, Threshold c) {
    if (reject_mask(p, c)) return ExtendedLabel::closed(p.k(), argmax_label(p));
    return ExtendedLabel::open(p.k());
}

bool reject_mask(const ProbVector& p, Threshold c) {
    const auto& v = p.values();
    return *std::max_element(v.begin(), v.end()) >= c.c;
}

ExtendedLabel pad_label(const ProbVector& y) {
    if (!y.is_one_hot())
        throw ValidationError("pad_label: input is not one-hot");
    std::vector<double> v = y.values();
    v.push_back(0.0);
    return ExtendedLabel(std::move(v));
}

ProbVector uniform_label(int64_t k) {
    if (k < 2) throw ValidationError("uniform_label: need K >= 2");
    return ProbVector(std::vector<double>(static_cast<size_t>(k),
                                          1.0 / static_cast<double>(k)));
}

std::vector<double> index_vector(int64_t k) {
    std::vector<double> s(static_cast<size_t>(k));
    std::iota(s.begin(), s.end(), 0.0);
    return s;
}

}  // namespace ossgan
