#pragma once

// Open-set split construction.
//
// A fully labeled corpus is partitioned in three seeded stages:
//   1. shuffle class ids, first n_closed_classes become the closed set
//   2. per closed class, floor(labeled_ratio * n) samples become labeled,
//      the rest go to the unlabeled pool
//   3. floor(open_usage_ratio * n_open) open-class samples are drawn, merged
//      into the unlabeled pool, and the pool is shuffled
//
// Which unlabeled samples came from open classes is ground truth the trainer
// must never see. OpenSetDataset keeps those per-sample tags private; the
// only external reader is metrics::entropy_gap (declared a friend below).
// Aggregate counts are public via summarize().

#include <cstdint>
#include <string>
#include <vector>

#include "ossgan/tensor.hpp"

namespace ossgan {

class ModelBundle;
class OpenSetDataset;

namespace metrics {
double entropy_gap(const ModelBundle& bundle, const OpenSetDataset& data);
}

struct SplitConfig {
    int64_t n_closed_classes = 0;
    double labeled_ratio = 0.0;      // (0, 1]
    double open_usage_ratio = 0.0;   // [0, 1]
    uint64_t seed = 0;

    void validate(int64_t total_classes) const;
};

// fully labeled source corpus; is_eval marks held-out samples that never
// enter the training splits and serve as the metric reference set
struct Corpus {
    Tensor images;                 // [n, c, s, s], values in [-1, 1]
    std::vector<int64_t> labels;   // 0 .. n_classes-1
    int64_t n_classes = 0;
    std::vector<uint8_t> is_eval;  // per sample

    void validate() const;
};

Corpus make_toy_corpus(int64_t n_classes, int64_t per_class_train, int64_t side,
                       uint64_t seed, int64_t per_class_eval = 0);

struct SplitSummary {
    int64_t n_labeled = 0;
    int64_t n_unlabeled_closed = 0;
    int64_t n_unlabeled_open = 0;
    std::vector<int64_t> labeled_per_class;  // indexed by remapped class
};

class OpenSetDataset {
public:
    int64_t k() const { return static_cast<int64_t>(closed_class_ids_.size()); }
    int64_t side() const { return labeled_images_.shape()[2]; }
    int64_t channels() const { return labeled_images_.shape()[1]; }
    int64_t n_labeled() const { return labeled_images_.shape()[0]; }
    int64_t n_unlabeled() const { return unlabeled_images_.shape()[0]; }
    int64_t n_eval() const { return eval_images_.shape()[0]; }

    const Tensor& labeled_images() const { return labeled_images_; }
    // remapped to 0..K-1 following closed_class_ids order
    const std::vector<int64_t>& labeled_classes() const { return labeled_classes_; }
    const Tensor& unlabeled_images() const { return unlabeled_images_; }
    const Tensor& eval_images() const { return eval_images_; }
    const std::vector<int64_t>& eval_classes() const { return eval_classes_; }

    const std::vector<int64_t>& closed_class_ids() const { return closed_class_ids_; }
    // original corpus positions, as recorded in the manifest
    const std::vector<int64_t>& labeled_source_indices() const { return labeled_source_; }
    const std::vector<int64_t>& unlabeled_source_indices() const { return unlabeled_source_; }
    const std::vector<int64_t>& eval_source_indices() const { return eval_source_; }

    const SplitConfig& config() const { return config_; }
    SplitSummary summarize() const;

    // writes <dir>/manifest.json and <dir>/payload.bin, returns manifest hash
    std::string save(const std::string& dir) const;
    static OpenSetDataset load(const std::string& manifest_path);

private:
    OpenSetDataset() = default;
    friend OpenSetDataset build_splits(const Corpus& corpus, const SplitConfig& cfg);
    friend double metrics::entropy_gap(const ModelBundle& bundle, const OpenSetDataset& data);

    SplitConfig config_;
    std::vector<int64_t> closed_class_ids_;
    Tensor labeled_images_;
    std::vector<int64_t> labeled_classes_;
    std::vector<int64_t> labeled_source_;
    Tensor unlabeled_images_;
    std::vector<int64_t> unlabeled_source_;
    std::vector<uint8_t> unlabeled_open_;  // ground-truth provenance, fenced
    Tensor eval_images_;
    std::vector<int64_t> eval_classes_;
    std::vector<int64_t> eval_source_;
};

OpenSetDataset build_splits(const Corpus& corpus, const SplitConfig& cfg);

}  // namespace ossgan
