#include "ossgan/models.hpp"

#include <cmath>

#include "ossgan/errors.hpp"

namespace ossgan {

using graph::Param;
using graph::Tape;
using graph::Var;

namespace {

Tensor he_normal(Rng& rng, std::vector<int64_t> shape, int64_t fan_in) {
    Tensor t(std::move(shape));
    const double std = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (auto& v : t.vec()) v = std * rng.normal();
    return t;
}

Tensor scaled_normal(Rng& rng, std::vector<int64_t> shape, double std) {
    Tensor t(std::move(shape));
    for (auto& v : t.vec()) v = std * rng.normal();
    return t;
}

}  // namespace

void ModelConfig::validate() const {
    if (k < 2) throw ConfigError("ModelConfig: need K >= 2");
    if (latent_dim < 1 || embed_dim < 1 || feature_dim < 1)
        throw ConfigError("ModelConfig: dims must be positive");
    if (image_side != 8 || channels != 1)
        throw ConfigError("ModelConfig: this build generates 8x8 single-channel images");
    if (spectral_norm || self_attention)
        throw ConfigError("ModelConfig: spectral_norm/self_attention are not "
                          "available at this scale");
}

// ---------------------------------------------------------------------------
// Generator: [z; emb(y)] -> fc -> 16x2x2 -> up -> conv -> up -> conv -> conv -> tanh
// ---------------------------------------------------------------------------

Generator::Generator(const ModelConfig& cfg, Rng& rng)
    : cfg_(cfg),
      emb_("g.emb", scaled_normal(rng, {cfg.k, cfg.embed_dim}, 0.25)),
      fc_w_("g.fc.w", he_normal(rng, {cfg.latent_dim + cfg.embed_dim, 16 * 2 * 2},
                                cfg.latent_dim + cfg.embed_dim)),
      fc_b_("g.fc.b", Tensor::zeros({16 * 2 * 2})),
      c1_w_("g.c1.w", he_normal(rng, {8, 16, 3, 3}, 16 * 9)),
      c1_b_("g.c1.b", Tensor::zeros({8})),
      c2_w_("g.c2.w", he_normal(rng, {4, 8, 3, 3}, 8 * 9)),
      c2_b_("g.c2.b", Tensor::zeros({4})),
      c3_w_("g.c3.w", he_normal(rng, {cfg.channels, 4, 3, 3}, 4 * 9)),
      c3_b_("g.c3.b", Tensor::zeros({cfg.channels})) {
    cfg.validate();
}

Var Generator::forward(Tape& t, Var z, Var y) const {
    const Tensor& zv = z.value();
    const Tensor& yv = y.value();
    if (zv.rank() != 2 || zv.dim(1) != cfg_.latent_dim)
        throw ConfigError("Generator: z must be [n," +
                          std::to_string(cfg_.latent_dim) + "], got " +
                          zv.shape_str());
    if (yv.rank() != 2 || yv.dim(1) != cfg_.k || yv.dim(0) != zv.dim(0))
        throw ConfigError("Generator: y must be [n," + std::to_string(cfg_.k) +
                          "], got " + yv.shape_str());
    const int64_t n = zv.dim(0);
    Var e = t.matmul(y, t.param(emb_));
    Var h0 = t.lrelu(t.bias_add(t.matmul(t.concat_cols(z, e), t.param(fc_w_)),
                                t.param(fc_b_)),
                     0.2);
    Var x = t.reshape(h0, {n, 16, 2, 2});
    x = t.upsample2(x);  // [n,16,4,4]
    x = t.lrelu(t.conv2d(x, t.param(c1_w_), t.param(c1_b_), 1, 1), 0.2);
    x = t.upsample2(x);  // [n,8,8,8]
    x = t.lrelu(t.conv2d(x, t.param(c2_w_), t.param(c2_b_), 1, 1), 0.2);
    x = t.conv2d(x, t.param(c3_w_), t.param(c3_b_), 1, 1);
    return t.tanh(x);
}

Tensor Generator::generate_nograd(const Tensor& z, const Tensor& y) const {
    Tape t;
    return forward(t, t.constant(z), t.constant(y)).value();
}

std::vector<Param*> Generator::params() {
    return {&emb_, &fc_w_, &fc_b_, &c1_w_, &c1_b_,
            &c2_w_, &c2_b_, &c3_w_, &c3_b_};
}

std::vector<const Param*> Generator::params() const {
    return {&emb_, &fc_w_, &fc_b_, &c1_w_, &c1_b_,
            &c2_w_, &c2_b_, &c3_w_, &c3_b_};
}

// ---------------------------------------------------------------------------
// FeatureExtractor: conv stack with stride-2 downsampling, sum pool, fc
// ---------------------------------------------------------------------------

FeatureExtractor::FeatureExtractor(const ModelConfig& cfg, Rng& rng)
    : cfg_(cfg),
      c1_w_("d.c1.w", he_normal(rng, {8, cfg.channels, 3, 3}, cfg.channels * 9)),
      c1_b_("d.c1.b", Tensor::zeros({8})),
      c2_w_("d.c2.w", he_normal(rng, {16, 8, 3, 3}, 8 * 9)),
      c2_b_("d.c2.b", Tensor::zeros({16})),
      c3_w_("d.c3.w", he_normal(rng, {32, 16, 3, 3}, 16 * 9)),
      c3_b_("d.c3.b", Tensor::zeros({32})),
      fc_w_("d.fc.w", he_normal(rng, {32, cfg.feature_dim}, 32)),
      fc_b_("d.fc.b", Tensor::zeros({cfg.feature_dim})) {}

Var FeatureExtractor::forward(Tape& t, Var x) const {
    const Tensor& xv = x.value();
    if (xv.rank() != 4 || xv.dim(1) != cfg_.channels ||
        xv.dim(2) != cfg_.image_side || xv.dim(3) != cfg_.image_side)
        throw ConfigError("FeatureExtractor: expected [n," +
                          std::to_string(cfg_.channels) + "," +
                          std::to_string(cfg_.image_side) + "," +
                          std::to_string(cfg_.image_side) + "], got " +
                          xv.shape_str());
    Var h = t.lrelu(t.conv2d(x, t.param(c1_w_), t.param(c1_b_), 1, 1), 0.2);
    h = t.lrelu(t.conv2d(h, t.param(c2_w_), t.param(c2_b_), 2, 1), 0.2);
    h = t.lrelu(t.conv2d(h, t.param(c3_w_), t.param(c3_b_), 2, 1), 0.2);
    Var pooled = t.sum_pool(h);  // [n,32]
    return t.lrelu(t.bias_add(t.matmul(pooled, t.param(fc_w_)), t.param(fc_b_)),
                   0.2);
}

Tensor FeatureExtractor::features_nograd(const Tensor& x) const {
    Tape t;
    return forward(t, t.constant(x)).value();
}

std::vector<Param*> FeatureExtractor::params() {
    return {&c1_w_, &c1_b_, &c2_w_, &c2_b_, &c3_w_, &c3_b_, &fc_w_, &fc_b_};
}

// ---------------------------------------------------------------------------
// ProjectionHead
// ---------------------------------------------------------------------------

ProjectionHead::ProjectionHead(const ModelConfig& cfg, Rng& rng)
    : cfg_(cfg),
      w1_("p.w1", scaled_normal(rng, {cfg.feature_dim, 1}, 0.1)),
      b_("p.b", Tensor::zeros({1})),
      w2_("p.w2", scaled_normal(rng, {cfg.cond_dim(), cfg.feature_dim}, 0.1)) {}

Var ProjectionHead::score(Tape& t, Var feat, Var y) const {
    const Tensor& yv = y.value();
    if (yv.rank() != 2 || yv.dim(1) != cfg_.cond_dim())
        throw ConfigError("ProjectionHead: condition must be [n," +
                          std::to_string(cfg_.cond_dim()) + "], got " +
                          yv.shape_str());
    if (yv.dim(0) != feat.value().dim(0))
        throw ConfigError("ProjectionHead: batch size mismatch");
    const int64_t n = feat.value().dim(0);
    Var linear = t.reshape(
        t.bias_add(t.matmul(feat, t.param(w1_)), t.param(b_)), {n});
    Var proj = t.rows_dot(feat, t.matmul(y, t.param(w2_)));
    return t.add(linear, proj);
}

std::vector<Param*> ProjectionHead::params() { return {&w1_, &b_, &w2_}; }

// ---------------------------------------------------------------------------
// ClassifierHead
// ---------------------------------------------------------------------------

ClassifierHead::ClassifierHead(const ModelConfig& cfg)
    : cfg_(cfg),
      w_("c.w", Tensor::zeros({cfg.feature_dim, cfg.k})),
      b_("c.b", Tensor::zeros({cfg.k})) {}

Var ClassifierHead::probs(Tape& t, Var feat) const {
    return t.softmax_rows(
        t.bias_add(t.matmul(feat, t.param(w_)), t.param(b_)));
}

std::vector<Param*> ClassifierHead::params() { return {&w_, &b_}; }

// ---------------------------------------------------------------------------
// PriorSampler
// ---------------------------------------------------------------------------

PriorSampler::PriorSampler(int64_t latent_dim, int64_t k, uint64_t seed)
    : latent_dim_(latent_dim), k_(k), rng_(seed) {
    if (latent_dim < 1 || k < 2)
        throw ConfigError("PriorSampler: bad latent_dim or K");
}

PriorSampler::Batch PriorSampler::sample(int64_t n) {
    if (n < 1) throw ConfigError("PriorSampler: n must be >= 1");
    Batch b;
    b.z = Tensor({n, latent_dim_});
    for (auto& v : b.z.vec()) v = rng_.normal();
    b.classes.resize(static_cast<size_t>(n));
    for (auto& c : b.classes)
        c = static_cast<int64_t>(rng_.below(static_cast<uint64_t>(k_)));
    b.y = one_hot_rows(b.classes, k_);
    return b;
}

// ---------------------------------------------------------------------------
// ModelBundle
// ---------------------------------------------------------------------------

ModelBundle::ModelBundle(const ModelConfig& cfg, uint64_t seed)
    : cfg_((cfg.validate(), cfg)),
      gen_([&] { Rng r = Rng(seed).split(1); return Generator(cfg, r); }()),
      feat_([&] { Rng r = Rng(seed).split(2); return FeatureExtractor(cfg, r); }()),
      proj_([&] { Rng r = Rng(seed).split(3); return ProjectionHead(cfg, r); }()),
      cls_(cfg) {}

double ModelBundle::discriminator_score(const Tensor& x,
                                        const std::vector<double>& y) const {
    if (static_cast<int64_t>(y.size()) != cfg_.cond_dim())
        throw ConfigError("discriminator_score: condition length " +
                          std::to_string(y.size()) + ", expected " +
                          std::to_string(cfg_.cond_dim()));
    Tensor xb = x.reshaped({1, cfg_.channels, cfg_.image_side, cfg_.image_side});
    Tensor yb({1, cfg_.cond_dim()}, y);
    return scores_nograd(xb, yb)[0];
}

ProbVector ModelBundle::classify(const Tensor& x) const {
    Tensor xb = x.reshaped({1, cfg_.channels, cfg_.image_side, cfg_.image_side});
    return ProbVector(classify_nograd(xb).vec());
}

Tensor ModelBundle::classify_nograd(const Tensor& x) const {
    Tape t;
    return cls_.probs(t, feat_.forward(t, t.constant(x))).value();
}

Tensor ModelBundle::scores_nograd(const Tensor& x, const Tensor& y) const {
    Tape t;
    return proj_.score(t, feat_.forward(t, t.constant(x)), t.constant(y)).value();
}

std::vector<Param*> ModelBundle::discriminator_params() {
    std::vector<Param*> out = feat_.params();
    for (Param* p : proj_.params()) out.push_back(p);
    for (Param* p : cls_.params()) out.push_back(p);
    return out;
}

std::vector<Param*> ModelBundle::all_params() {
    std::vector<Param*> out = gen_.params();
    for (Param* p : discriminator_params()) out.push_back(p);
    return out;
}

Param* ModelBundle::find_param(const std::string& name) {
    for (Param* p : all_params())
        if (p->name == name) return p;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

void Adam::step(const std::vector<Param*>& params) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (Param* p : params) {
        auto& val = p->value.vec();
        auto& g = p->grad.vec();
        auto& m = p->m.vec();
        auto& v = p->v.vec();
        for (size_t i = 0; i < val.size(); ++i) {
            m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
            v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            val[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
    }
}

Tensor one_hot_rows(const std::vector<int64_t>& classes, int64_t k) {
    const int64_t n = static_cast<int64_t>(classes.size());
    Tensor y({n, k});
    for (int64_t i = 0; i < n; ++i) {
        const int64_t c = classes[static_cast<size_t>(i)];
        if (c < 0 || c >= k)
            throw ValidationError("one_hot_rows: class " + std::to_string(c) +
                                  " out of range for K = " + std::to_string(k));
        y[i * k + c] = 1.0;
    }
    return y;
}

}  // namespace ossgan
