#pragma once

// Evaluation stack: FID on learned features, Inception-style score, the
// Sajjadi F_{1/8}/F_8 precision-recall pair, and the entropy-gap diagnostic.
// Features come from MetricEmbedder, a small classifier trained once per
// corpus and frozen; its content hash is recorded so every method in a
// comparison is scored in the same feature space.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ossgan/dataset.hpp"
#include "ossgan/graph.hpp"
#include "ossgan/label_algebra.hpp"
#include "ossgan/tensor.hpp"

namespace ossgan {

struct FeatureSet {
    Tensor features;    // [n, f]
    std::string source; // "real" or "fake"

    int64_t n() const { return features.shape()[0]; }
    int64_t dim() const { return features.shape()[1]; }
};

struct MetricReport {
    double fid = 0.0;
    double is_score = 1.0;
    double f_small = 0.0;  // F_{1/8}, fidelity-weighted
    double f_large = 0.0;  // F_8, diversity-weighted
    double entropy_gap = 0.0;
    int64_t n_samples = 0;
    std::string extractor_hash;
    std::vector<std::string> provenance;  // warnings and parameter notes
};

// small frozen classifier whose penultimate activations (width 64) define
// the metric feature space
class MetricEmbedder {
public:
    static constexpr int64_t kFeatureDim = 64;

    struct FitConfig {
        int64_t iters = 400;
        int64_t batch = 64;
        double lr = 2e-3;
        uint64_t seed = 0;
    };

    static MetricEmbedder fit(const Corpus& corpus, const FitConfig& cfg);

    Tensor embed(const Tensor& images) const;         // [n, 64]
    Tensor class_probs(const Tensor& images) const;   // [n, K]
    int64_t k() const { return k_; }
    const std::string& hash() const { return hash_; }
    double holdout_accuracy() const { return holdout_accuracy_; }

    void save(const std::string& dir) const;
    static MetricEmbedder load(const std::string& dir);

private:
    MetricEmbedder() = default;
    void rebuild_hash();

    int64_t k_ = 0;
    int64_t side_ = 0;
    int64_t channels_ = 0;
    double holdout_accuracy_ = 0.0;
    std::string hash_;
    mutable graph::Param c1_w_, c1_b_, c2_w_, c2_b_, c3_w_, c3_b_;
    mutable graph::Param fc1_w_, fc1_b_, fc2_w_, fc2_b_;
};

namespace metrics {

// Frechet distance between Gaussian fits; the matrix square root uses an
// eigendecomposition of sqrt(Sr) Sf sqrt(Sr) with eigenvalues clamped at 0
double fid(const FeatureSet& real, const FeatureSet& fake);

double inception_score(const Tensor& class_probs);  // [n, K]
double inception_score(const std::vector<ProbVector>& class_probs);

struct PrdConfig {
    int64_t clusters = 20;
    int64_t angles = 1001;
    int64_t kmeans_iters = 30;
    uint64_t seed = 0;
};

// (F_{1/8}, F_8) over the PRD curve of pooled-feature cluster histograms
std::pair<double, double> f_beta_scores(const FeatureSet& real, const FeatureSet& fake,
                                        const PrdConfig& cfg = {});

// declared in dataset.hpp (friend of OpenSetDataset); defined in metrics.cpp

struct EvalConfig {
    int64_t n_samples = 2000;
    uint64_t seed = 0;
    PrdConfig prd;
};

MetricReport compute_metrics(const ModelBundle& bundle, const OpenSetDataset& data,
                             const MetricEmbedder& embedder, const EvalConfig& cfg);

}  // namespace metrics
}  // namespace ossgan
