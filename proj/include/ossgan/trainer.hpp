#pragma once

// The training loop: method registry over one shared step structure,
// differentiable batch augmentation, checkpointing, and CSV logs. d_step and
// g_step are free functions so tests can drive single updates with
// hand-picked batches.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ossgan/dataset.hpp"
#include "ossgan/graph.hpp"
#include "ossgan/losses.hpp"
#include "ossgan/metrics.hpp"
#include "ossgan/models.hpp"
#include "ossgan/rng.hpp"
#include "ossgan/tensor.hpp"

namespace ossgan {

inline const std::vector<std::string>& method_names() {
    static const std::vector<std::string> names = {"ossgan",    "rejectgan", "opensetgan",
                                                   "randomgan", "singlegan", "supervised"};
    return names;
}

struct MethodSpec {
    std::string name = "ossgan";
    std::optional<double> threshold;  // required iff rejectgan/opensetgan
    double lambda = 0.2;
    AblationFlags flags;
    bool detach_condition = false;  // block gradients through the soft condition

    bool uses_threshold() const { return name == "rejectgan" || name == "opensetgan"; }
    bool extended_condition() const { return name == "opensetgan"; }
    void validate() const;
};

struct TrainConfig {
    int64_t total_iters = 1;
    int64_t batch_labeled = 64;
    int64_t batch_unlabeled = 64;
    int64_t batch_fake = 64;
    double lr_g = 1e-4;
    double lr_d = 4e-4;
    double beta1 = 0.0;
    double beta2 = 0.999;
    uint64_t seed = 0;
    int64_t eval_every = 0;  // 0: evaluate at the end only
    bool augment = false;
    int64_t eval_samples = 2000;

    void validate() const;
};

// per-sample jitter/translation/cutout parameters for one batch
struct AugmentDraw {
    std::vector<double> contrast;   // U(0.75, 1.25)
    std::vector<double> brightness; // U(-0.25, 0.25)
    std::vector<int> dy, dx;        // integer shift, |d| <= side/8
    std::vector<int64_t> cut_y, cut_x;
    int64_t cut_size = 0;
    int64_t side = 0;
};

AugmentDraw draw_augment(Rng& rng, int64_t n, int64_t side);
graph::Var apply_augment(graph::Tape& t, graph::Var x, const AugmentDraw& d);
// value-level convenience; enabled=false returns the input bitwise
Tensor augment_batch(const Tensor& x, Rng& rng, bool enabled);

struct StepContext {
    ModelBundle* bundle = nullptr;
    Adam* opt_d = nullptr;
    Adam* opt_g = nullptr;
    const MethodSpec* method = nullptr;
    bool augment = false;
    Rng* rng = nullptr;      // augmentation draws + random unlabeled conditions
    int64_t reject_kept = -1;  // out: survivors of the last rejectgan filter
};

// one discriminator/classifier update; generator parameters are read-only
LossTerms d_step(StepContext& ctx, const Tensor& x_lbl, const std::vector<int64_t>& classes,
                 const Tensor& x_unlbl, const PriorSampler::Batch& prior);
// one generator update; discriminator parameters are read-only
double g_step(StepContext& ctx, const PriorSampler::Batch& prior);

uint64_t params_checksum(const std::vector<graph::Param*>& params);

void save_checkpoint(const std::string& prefix, ModelBundle& bundle, const MethodSpec& method,
                     int64_t iteration, uint64_t seed);
ModelBundle load_checkpoint(const std::string& bin_path, MethodSpec* method_out = nullptr,
                            int64_t* iteration_out = nullptr);

struct TrainResult {
    std::string out_dir;
    LossTerms final_losses;
    double final_g_loss = 0.0;
    bool has_metrics = false;
    MetricReport final_metrics;
    std::vector<std::string> warnings;
};

// runs T iterations of (d_step; g_step), writing losses.csv, metrics.csv,
// ckpt_<iter>.bin/.json and samples_<iter>.png under out_dir
TrainResult train(const OpenSetDataset& data, const MethodSpec& method, const TrainConfig& cfg,
                  const std::string& out_dir, const MetricEmbedder* embedder = nullptr);

}  // namespace ossgan
