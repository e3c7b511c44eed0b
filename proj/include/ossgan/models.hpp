#pragma once

// Desk-scale conditional GAN parts: generator, shared feature extractor,
// projection discriminator head, and auxiliary classifier head. Forward
// passes build onto a caller-supplied Tape so losses stay differentiable;
// *_nograd helpers run the same math on a throwaway tape.

#include <cstdint>
#include <string>
#include <vector>

#include "ossgan/graph.hpp"
#include "ossgan/label_algebra.hpp"
#include "ossgan/rng.hpp"
#include "ossgan/tensor.hpp"

namespace ossgan {

struct ModelConfig {
    int64_t k = 8;             // closed-set class count
    int64_t latent_dim = 32;   // l
    int64_t embed_dim = 32;    // generator class-embedding width
    int64_t feature_dim = 128; // h, output width of the feature extractor
    int64_t image_side = 8;    // square single-channel images
    int64_t channels = 1;
    bool extended_condition = false;  // projection W2 gets K+1 columns
    bool spectral_norm = false;       // recorded, unsupported at this scale
    bool self_attention = false;      // recorded, unsupported at this scale

    // paper-scale reference values (BigGAN backbone), kept for documentation
    static constexpr int64_t paper_latent_dim = 128;
    static constexpr int64_t paper_latent_per_level = 20;

    int64_t cond_dim() const { return extended_condition ? k + 1 : k; }
    int64_t pixels() const { return channels * image_side * image_side; }
    void validate() const;
};

class Generator {
public:
    Generator(const ModelConfig& cfg, Rng& rng);

    // z: [n,l], y: [n,K] rows on the simplex -> images [n,c,s,s] in [-1,1]
    graph::Var forward(graph::Tape& t, graph::Var z, graph::Var y) const;
    Tensor generate_nograd(const Tensor& z, const Tensor& y) const;

    std::vector<graph::Param*> params();
    std::vector<const graph::Param*> params() const;

private:
    const ModelConfig cfg_;
    mutable graph::Param emb_, fc_w_, fc_b_;
    mutable graph::Param c1_w_, c1_b_, c2_w_, c2_b_, c3_w_, c3_b_;
};

class FeatureExtractor {
public:
    FeatureExtractor(const ModelConfig& cfg, Rng& rng);

    // x: [n,c,s,s] -> features [n,h]
    graph::Var forward(graph::Tape& t, graph::Var x) const;
    Tensor features_nograd(const Tensor& x) const;

    std::vector<graph::Param*> params();

private:
    const ModelConfig cfg_;
    mutable graph::Param c1_w_, c1_b_, c2_w_, c2_b_, c3_w_, c3_b_;
    mutable graph::Param fc_w_, fc_b_;
};

class ProjectionHead {
public:
    ProjectionHead(const ModelConfig& cfg, Rng& rng);

    // feat: [n,h], y: [n,cond_dim] -> scores [n],
    // D(x,y) = W1 . feat + b + feat^T W2 y, linear in y
    graph::Var score(graph::Tape& t, graph::Var feat, graph::Var y) const;

    int64_t cond_dim() const { return cfg_.cond_dim(); }
    std::vector<graph::Param*> params();
    graph::Param& w2() { return w2_; }

private:
    const ModelConfig cfg_;
    mutable graph::Param w1_, b_, w2_;
};

class ClassifierHead {
public:
    ClassifierHead(const ModelConfig& cfg);

    // feat: [n,h] -> class probabilities [n,K]; zero-initialized weights
    // make this exactly uniform before the first update
    graph::Var probs(graph::Tape& t, graph::Var feat) const;

    std::vector<graph::Param*> params();

private:
    const ModelConfig cfg_;
    mutable graph::Param w_, b_;
};

class PriorSampler {
public:
    PriorSampler(int64_t latent_dim, int64_t k, uint64_t seed);

    struct Batch {
        Tensor z;                      // [n,l] standard normal
        Tensor y;                      // [n,K] uniform one-hot rows
        std::vector<int64_t> classes;  // argmax of each y row
    };
    Batch sample(int64_t n);

private:
    int64_t latent_dim_, k_;
    Rng rng_;
};

// everything one training run owns, with spec-level single-sample wrappers
class ModelBundle {
public:
    ModelBundle(const ModelConfig& cfg, uint64_t seed);

    const ModelConfig& config() const { return cfg_; }
    Generator& generator() { return gen_; }
    const Generator& generator() const { return gen_; }
    FeatureExtractor& extractor() { return feat_; }
    ProjectionHead& projection() { return proj_; }
    ClassifierHead& classifier() { return cls_; }

    // D(x,y) on a single sample; y length must equal cond_dim
    double discriminator_score(const Tensor& x, const std::vector<double>& y) const;
    // C(D~(x)) on a single sample
    ProbVector classify(const Tensor& x) const;
    // batch classifier probabilities without building gradients, [n,K]
    Tensor classify_nograd(const Tensor& x) const;
    // batch scores without gradients; y: [n,cond_dim]
    Tensor scores_nograd(const Tensor& x, const Tensor& y) const;

    std::vector<graph::Param*> generator_params() { return gen_.params(); }
    std::vector<graph::Param*> discriminator_params();  // D~ + W1,b,W2 + C
    std::vector<graph::Param*> all_params();
    graph::Param* find_param(const std::string& name);

private:
    ModelConfig cfg_;
    Generator gen_;
    FeatureExtractor feat_;
    mutable ProjectionHead proj_;
    mutable ClassifierHead cls_;
};

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.0;
    double beta2 = 0.999;
    double eps = 1e-8;
};

class Adam {
public:
    explicit Adam(AdamConfig cfg) : cfg_(cfg) {}

    void step(const std::vector<graph::Param*>& params);
    int64_t steps_taken() const { return t_; }
    const AdamConfig& config() const { return cfg_; }

private:
    AdamConfig cfg_;
    int64_t t_ = 0;
};

// one-hot label rows as a [n,K] tensor
Tensor one_hot_rows(const std::vector<int64_t>& classes, int64_t k);

}  // namespace ossgan
