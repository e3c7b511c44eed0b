#include "ossgan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "ossgan/errors.hpp"
#include "ossgan/losses.hpp"
#include "ossgan/models.hpp"
#include "ossgan/rng.hpp"
#include "ossgan/serialize.hpp"

namespace ossgan {

using nlohmann::json;

namespace {

graph::Var embed_forward(graph::Tape& t, graph::Var x, graph::Param& c1w, graph::Param& c1b,
                         graph::Param& c2w, graph::Param& c2b, graph::Param& c3w,
                         graph::Param& c3b, graph::Param& fc1w, graph::Param& fc1b) {
    graph::Var h = t.lrelu(t.conv2d(x, t.param(c1w), t.param(c1b), 1, 1), 0.2);
    h = t.lrelu(t.conv2d(h, t.param(c2w), t.param(c2b), 2, 1), 0.2);
    h = t.lrelu(t.conv2d(h, t.param(c3w), t.param(c3b), 2, 1), 0.2);
    graph::Var pooled = t.sum_pool(h);
    return t.lrelu(t.bias_add(t.matmul(pooled, t.param(fc1w)), t.param(fc1b)), 0.2);
}

Tensor he_init(Rng& rng, const std::vector<int64_t>& shape, int64_t fan_in) {
    Tensor t(shape);
    double std = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (int64_t i = 0; i < t.numel(); ++i) t.data()[i] = std * rng.normal();
    return t;
}

}  // namespace

MetricEmbedder MetricEmbedder::fit(const Corpus& corpus, const FitConfig& cfg) {
    corpus.validate();
    if (cfg.iters < 1 || cfg.batch < 1 || cfg.lr <= 0.0)
        throw ValidationError("bad embedder fit config");

    std::vector<int64_t> train_idx, hold_idx;
    for (size_t i = 0; i < corpus.is_eval.size(); ++i)
        (corpus.is_eval[i] ? hold_idx : train_idx).push_back(static_cast<int64_t>(i));
    if (train_idx.empty()) throw ValidationError("embedder fit needs training samples");
    if (hold_idx.empty())
        throw ValidationError("embedder fit needs eval-tagged samples for the holdout check");

    MetricEmbedder e;
    e.k_ = corpus.n_classes;
    e.channels_ = corpus.images.shape()[1];
    e.side_ = corpus.images.shape()[2];

    Rng rng(cfg.seed);
    Rng init = rng.split(1), batches = rng.split(2);
    e.c1_w_ = graph::Param("fx.c1.w", he_init(init, {8, e.channels_, 3, 3}, e.channels_ * 9));
    e.c1_b_ = graph::Param("fx.c1.b", Tensor({8}));
    e.c2_w_ = graph::Param("fx.c2.w", he_init(init, {16, 8, 3, 3}, 8 * 9));
    e.c2_b_ = graph::Param("fx.c2.b", Tensor({16}));
    e.c3_w_ = graph::Param("fx.c3.w", he_init(init, {32, 16, 3, 3}, 16 * 9));
    e.c3_b_ = graph::Param("fx.c3.b", Tensor({32}));
    e.fc1_w_ = graph::Param("fx.fc1.w", he_init(init, {32, kFeatureDim}, 32));
    e.fc1_b_ = graph::Param("fx.fc1.b", Tensor({kFeatureDim}));
    e.fc2_w_ = graph::Param("fx.fc2.w", he_init(init, {kFeatureDim, e.k_}, kFeatureDim));
    e.fc2_b_ = graph::Param("fx.fc2.b", Tensor({e.k_}));

    std::vector<graph::Param*> params = {&e.c1_w_, &e.c1_b_, &e.c2_w_, &e.c2_b_, &e.c3_w_,
                                         &e.c3_b_, &e.fc1_w_, &e.fc1_b_, &e.fc2_w_, &e.fc2_b_};
    Adam opt(AdamConfig{cfg.lr, 0.9, 0.999, 1e-8});
    int64_t px = e.channels_ * e.side_ * e.side_;
    for (int64_t step = 0; step < cfg.iters; ++step) {
        Tensor xb({cfg.batch, e.channels_, e.side_, e.side_});
        Tensor yb({cfg.batch, e.k_});
        for (int64_t i = 0; i < cfg.batch; ++i) {
            int64_t src = train_idx[static_cast<size_t>(
                batches.below(static_cast<uint64_t>(train_idx.size())))];
            std::memcpy(xb.data() + i * px, corpus.images.data() + src * px,
                        sizeof(double) * static_cast<size_t>(px));
            yb.data()[i * e.k_ + corpus.labels[static_cast<size_t>(src)]] = 1.0;
        }
        graph::Tape t;
        graph::Var pen = embed_forward(t, t.constant(std::move(xb)), e.c1_w_, e.c1_b_, e.c2_w_,
                                       e.c2_b_, e.c3_w_, e.c3_b_, e.fc1_w_, e.fc1_b_);
        graph::Var probs = t.softmax_rows(
            t.bias_add(t.matmul(pen, t.param(e.fc2_w_)), t.param(e.fc2_b_)));
        graph::Var loss = build::cross_entropy_mean(t, probs, yb);
        for (auto* p : params) p->zero_grad();
        t.backward(loss);
        opt.step(params);
    }

    Tensor hold_x({static_cast<int64_t>(hold_idx.size()), e.channels_, e.side_, e.side_});
    for (size_t i = 0; i < hold_idx.size(); ++i)
        std::memcpy(hold_x.data() + static_cast<int64_t>(i) * px,
                    corpus.images.data() + hold_idx[i] * px,
                    sizeof(double) * static_cast<size_t>(px));
    Tensor probs = e.class_probs(hold_x);
    int64_t correct = 0;
    for (size_t i = 0; i < hold_idx.size(); ++i) {
        const double* row = probs.data() + static_cast<int64_t>(i) * e.k_;
        int64_t best = static_cast<int64_t>(std::max_element(row, row + e.k_) - row);
        if (best == corpus.labels[static_cast<size_t>(hold_idx[i])]) ++correct;
    }
    e.holdout_accuracy_ = static_cast<double>(correct) / static_cast<double>(hold_idx.size());
    e.rebuild_hash();
    return e;
}

void MetricEmbedder::rebuild_hash() {
    uint64_t h = io::fnv1a(&k_, sizeof(k_));
    h ^= io::fnv1a(&side_, sizeof(side_)) * 0x9e3779b97f4a7c15ull;
    for (const graph::Param* p : {&c1_w_, &c1_b_, &c2_w_, &c2_b_, &c3_w_, &c3_b_, &fc1_w_,
                                  &fc1_b_, &fc2_w_, &fc2_b_}) {
        uint64_t hp = io::fnv1a(p->value.data(),
                                sizeof(double) * static_cast<size_t>(p->value.numel()));
        h = (h ^ hp) * 1099511628211ull;
    }
    hash_ = io::hash_hex(h);
}

namespace {

// run a per-chunk tape so activations for large batches never coexist
template <typename Fn>
Tensor chunked(const Tensor& images, int64_t out_dim, Fn&& fn) {
    const auto& s = images.shape();
    if (s.size() != 4) throw ValidationError("expected [n,c,h,w] images");
    int64_t n = s[0], px = s[1] * s[2] * s[3];
    Tensor out({n, out_dim});
    constexpr int64_t kChunk = 256;
    for (int64_t at = 0; at < n; at += kChunk) {
        int64_t len = std::min(kChunk, n - at);
        Tensor part({len, s[1], s[2], s[3]});
        std::memcpy(part.data(), images.data() + at * px,
                    sizeof(double) * static_cast<size_t>(len * px));
        Tensor res = fn(std::move(part));
        std::memcpy(out.data() + at * out_dim, res.data(),
                    sizeof(double) * static_cast<size_t>(len * out_dim));
    }
    return out;
}

}  // namespace

Tensor MetricEmbedder::embed(const Tensor& images) const {
    if (images.shape().size() != 4 || images.shape()[1] != channels_ ||
        images.shape()[2] != side_ || images.shape()[3] != side_)
        throw ValidationError("embedder input shape mismatch");
    return chunked(images, kFeatureDim, [&](Tensor part) {
        graph::Tape t;
        graph::Var pen = embed_forward(t, t.constant(std::move(part)), c1_w_, c1_b_, c2_w_,
                                       c2_b_, c3_w_, c3_b_, fc1_w_, fc1_b_);
        return pen.value();
    });
}

Tensor MetricEmbedder::class_probs(const Tensor& images) const {
    if (images.shape().size() != 4 || images.shape()[1] != channels_ ||
        images.shape()[2] != side_ || images.shape()[3] != side_)
        throw ValidationError("embedder input shape mismatch");
    return chunked(images, k_, [&](Tensor part) {
        graph::Tape t;
        graph::Var pen = embed_forward(t, t.constant(std::move(part)), c1_w_, c1_b_, c2_w_,
                                       c2_b_, c3_w_, c3_b_, fc1_w_, fc1_b_);
        graph::Var probs = t.softmax_rows(
            t.bias_add(t.matmul(pen, t.param(fc2_w_)), t.param(fc2_b_)));
        return probs.value();
    });
}

void MetricEmbedder::save(const std::string& dir) const {
    std::filesystem::create_directories(dir);
    io::save_archive(dir + "/extractor.bin",
                     {{"fx.c1.w", &c1_w_.value},
                      {"fx.c1.b", &c1_b_.value},
                      {"fx.c2.w", &c2_w_.value},
                      {"fx.c2.b", &c2_b_.value},
                      {"fx.c3.w", &c3_w_.value},
                      {"fx.c3.b", &c3_b_.value},
                      {"fx.fc1.w", &fc1_w_.value},
                      {"fx.fc1.b", &fc1_b_.value},
                      {"fx.fc2.w", &fc2_w_.value},
                      {"fx.fc2.b", &fc2_b_.value}});
    json j;
    j["k"] = k_;
    j["side"] = side_;
    j["channels"] = channels_;
    j["holdout_accuracy"] = holdout_accuracy_;
    j["hash"] = hash_;
    io::write_text(dir + "/extractor.json", j.dump(2) + "\n");
}

MetricEmbedder MetricEmbedder::load(const std::string& dir) {
    MetricEmbedder e;
    json j;
    try {
        j = json::parse(io::read_text(dir + "/extractor.json"));
        e.k_ = j.at("k").get<int64_t>();
        e.side_ = j.at("side").get<int64_t>();
        e.channels_ = j.at("channels").get<int64_t>();
        e.holdout_accuracy_ = j.at("holdout_accuracy").get<double>();
    } catch (const json::exception& ex) {
        throw DataError(std::string("bad extractor metadata: ") + ex.what());
    }
    auto archive = io::load_archive(dir + "/extractor.bin");
    auto take = [&](const char* name) -> Tensor {
        auto it = archive.find(name);
        if (it == archive.end())
            throw DataError(std::string("extractor archive missing ") + name);
        return std::move(it->second);
    };
    e.c1_w_ = graph::Param("fx.c1.w", take("fx.c1.w"));
    e.c1_b_ = graph::Param("fx.c1.b", take("fx.c1.b"));
    e.c2_w_ = graph::Param("fx.c2.w", take("fx.c2.w"));
    e.c2_b_ = graph::Param("fx.c2.b", take("fx.c2.b"));
    e.c3_w_ = graph::Param("fx.c3.w", take("fx.c3.w"));
    e.c3_b_ = graph::Param("fx.c3.b", take("fx.c3.b"));
    e.fc1_w_ = graph::Param("fx.fc1.w", take("fx.fc1.w"));
    e.fc1_b_ = graph::Param("fx.fc1.b", take("fx.fc1.b"));
    e.fc2_w_ = graph::Param("fx.fc2.w", take("fx.fc2.w"));
    e.fc2_b_ = graph::Param("fx.fc2.b", take("fx.fc2.b"));
    e.rebuild_hash();
    std::string recorded = j.value("hash", "");
    if (!recorded.empty() && recorded != e.hash_)
        throw DataError("extractor hash mismatch: expected " + recorded + ", got " + e.hash_);
    return e;
}

namespace metrics {

namespace {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void moments(const FeatureSet& fs, Eigen::VectorXd& mu, Eigen::MatrixXd& sigma) {
    int64_t n = fs.n(), f = fs.dim();
    Eigen::Map<const EMat> x(fs.features.data(), n, f);
    mu = x.colwise().mean();
    Eigen::MatrixXd centered = x.rowwise() - mu.transpose();
    sigma = centered.transpose() * centered / static_cast<double>(n - 1);
}

// V max(L,0)^p V^T with a PSD sanity check
Eigen::MatrixXd psd_power(const Eigen::MatrixXd& m, double power, const char* what) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success)
        throw NumericError(std::string("eigensolver failed on ") + what);
    Eigen::VectorXd lam = es.eigenvalues();
    double lam_max = lam.maxCoeff();
    double lam_min = lam.minCoeff();
    if (lam_min < -1e-8 * std::max(1.0, std::abs(lam_max))) {
        std::ostringstream ss;
        ss << what << " is not PSD beyond stabilization; eigenvalue range [" << lam_min
           << ", " << lam_max << "], condition number "
           << (lam_min > 0.0 ? lam_max / lam_min : std::numeric_limits<double>::infinity());
        throw NumericError(ss.str());
    }
    Eigen::VectorXd powed(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        powed[i] = std::pow(std::max(lam[i], 0.0), power);
    return es.eigenvectors() * powed.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

double fid(const FeatureSet& real, const FeatureSet& fake) {
    if (real.features.shape().size() != 2 || fake.features.shape().size() != 2)
        throw ValidationError("feature sets must be [n,f]");
    if (real.dim() != fake.dim()) throw ValidationError("feature dimensions differ");
    int64_t f = real.dim();
    if (real.n() < f + 1 || fake.n() < f + 1)
        throw ValidationError("need at least f+1 samples per side for covariance estimation");

    Eigen::VectorXd mu_r, mu_f;
    Eigen::MatrixXd sig_r, sig_f;
    moments(real, mu_r, sig_r);
    moments(fake, mu_f, sig_f);

    Eigen::MatrixXd root_r = psd_power(sig_r, 0.5, "real covariance");
    Eigen::MatrixXd inner = root_r * sig_f * root_r;
    inner = 0.5 * (inner + inner.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(inner);
    if (es.info() != Eigen::Success)
        throw NumericError("eigensolver failed on the FID product term");
    double trace_sqrt = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        trace_sqrt += std::sqrt(std::max(es.eigenvalues()[i], 0.0));

    double d = (mu_r - mu_f).squaredNorm() + sig_r.trace() + sig_f.trace() - 2.0 * trace_sqrt;
    if (!std::isfinite(d)) throw NumericError("FID is not finite");
    if (d < -1e-6) throw NumericError("FID evaluated significantly negative; inputs degenerate");
    return std::max(d, 0.0);
}

double inception_score(const Tensor& class_probs) {
    if (class_probs.shape().size() != 2 || class_probs.shape()[0] < 1)
        throw ValidationError("inception_score needs a nonempty [n,K] matrix");
    int64_t n = class_probs.shape()[0], k = class_probs.shape()[1];
    std::vector<double> marginal(static_cast<size_t>(k), 0.0);
    for (int64_t i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (int64_t c = 0; c < k; ++c) {
            double p = class_probs.data()[i * k + c];
            if (p < 0.0) throw ValidationError("negative class probability");
            row_sum += p;
            marginal[static_cast<size_t>(c)] += p;
        }
        if (std::abs(row_sum - 1.0) > 1e-6)
            throw ValidationError("class probability row does not sum to 1");
    }
    for (auto& q : marginal) q /= static_cast<double>(n);
    double mean_kl = 0.0;
    for (int64_t i = 0; i < n; ++i) {
        double kl = 0.0;
        for (int64_t c = 0; c < k; ++c) {
            double p = class_probs.data()[i * k + c];
            if (p > 0.0) kl += p * std::log(p / std::max(marginal[static_cast<size_t>(c)], 1e-12));
        }
        mean_kl += kl;
    }
    return std::exp(mean_kl / static_cast<double>(n));
}

double inception_score(const std::vector<ProbVector>& class_probs) {
    if (class_probs.empty()) throw ValidationError("inception_score needs predictions");
    int64_t k = class_probs[0].k();
    Tensor t({static_cast<int64_t>(class_probs.size()), k});
    for (size_t i = 0; i < class_probs.size(); ++i) {
        if (class_probs[i].k() != k) throw ValidationError("inconsistent class counts");
        std::copy(class_probs[i].values().begin(), class_probs[i].values().end(),
                  t.data() + static_cast<int64_t>(i) * k);
    }
    return inception_score(t);
}

namespace {

// pooled rows in a canonical (lexicographic) order so clustering does not
// depend on which argument is called "real"
struct PooledRows {
    std::vector<const double*> rows;
    int64_t dim = 0;
};

PooledRows canonical_pool(const FeatureSet& a, const FeatureSet& b) {
    PooledRows pool;
    pool.dim = a.dim();
    pool.rows.reserve(static_cast<size_t>(a.n() + b.n()));
    for (int64_t i = 0; i < a.n(); ++i) pool.rows.push_back(a.features.data() + i * pool.dim);
    for (int64_t i = 0; i < b.n(); ++i) pool.rows.push_back(b.features.data() + i * pool.dim);
    std::sort(pool.rows.begin(), pool.rows.end(), [&](const double* x, const double* y) {
        return std::lexicographical_compare(x, x + pool.dim, y, y + pool.dim);
    });
    return pool;
}

int64_t nearest(const double* row, const std::vector<double>& centroids, int64_t m, int64_t f) {
    int64_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int64_t c = 0; c < m; ++c) {
        double d = 0.0;
        const double* ctr = centroids.data() + c * f;
        for (int64_t j = 0; j < f; ++j) {
            double diff = row[j] - ctr[j];
            d += diff * diff;
        }
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

}  // namespace

std::pair<double, double> f_beta_scores(const FeatureSet& real, const FeatureSet& fake,
                                        const PrdConfig& cfg) {
    if (real.dim() != fake.dim()) throw ValidationError("feature dimensions differ");
    if (real.n() < cfg.clusters || fake.n() < cfg.clusters)
        throw ValidationError("need at least as many samples as clusters on both sides");
    if (cfg.clusters < 1 || cfg.angles < 3) throw ValidationError("bad PRD parameters");

    int64_t f = real.dim();
    PooledRows pool = canonical_pool(real, fake);
    auto n_pool = static_cast<int64_t>(pool.rows.size());

    // seeded init on distinct rows of the canonical ordering
    std::vector<int64_t> order(pool.rows.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(cfg.seed);
    rng.shuffle(order);
    int64_t m = cfg.clusters;
    std::vector<double> centroids;
    centroids.reserve(static_cast<size_t>(m * f));
    for (int64_t pick : order) {
        const double* row = pool.rows[static_cast<size_t>(pick)];
        bool dup = false;
        for (size_t c = 0; c < centroids.size() / static_cast<size_t>(f) && !dup; ++c)
            dup = std::equal(row, row + f, centroids.data() + static_cast<int64_t>(c) * f);
        if (!dup) centroids.insert(centroids.end(), row, row + f);
        if (static_cast<int64_t>(centroids.size()) == m * f) break;
    }
    m = static_cast<int64_t>(centroids.size()) / f;
    if (m < 1) throw ValidationError("degenerate clustering: no distinct feature rows");

    std::vector<int64_t> assign(pool.rows.size(), 0);
    std::vector<double> sums(static_cast<size_t>(m * f));
    std::vector<int64_t> counts(static_cast<size_t>(m));
    for (int64_t it = 0; it < cfg.kmeans_iters; ++it) {
        for (int64_t i = 0; i < n_pool; ++i)
            assign[static_cast<size_t>(i)] = nearest(pool.rows[static_cast<size_t>(i)],
                                                     centroids, m, f);
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (int64_t i = 0; i < n_pool; ++i) {
            int64_t c = assign[static_cast<size_t>(i)];
            counts[static_cast<size_t>(c)]++;
            const double* row = pool.rows[static_cast<size_t>(i)];
            for (int64_t j = 0; j < f; ++j) sums[static_cast<size_t>(c * f + j)] += row[j];
        }
        for (int64_t c = 0; c < m; ++c)
            if (counts[static_cast<size_t>(c)] > 0)
                for (int64_t j = 0; j < f; ++j)
                    centroids[static_cast<size_t>(c * f + j)] =
                        sums[static_cast<size_t>(c * f + j)] /
                        static_cast<double>(counts[static_cast<size_t>(c)]);
    }

    std::vector<double> p_hist(static_cast<size_t>(m), 0.0), q_hist(static_cast<size_t>(m), 0.0);
    for (int64_t i = 0; i < real.n(); ++i)
        p_hist[static_cast<size_t>(nearest(real.features.data() + i * f, centroids, m, f))] +=
            1.0 / static_cast<double>(real.n());
    for (int64_t i = 0; i < fake.n(); ++i)
        q_hist[static_cast<size_t>(nearest(fake.features.data() + i * f, centroids, m, f))] +=
            1.0 / static_cast<double>(fake.n());

    // PRD curve over a symmetric angle grid in (0, pi/2)
    auto f_beta = [](double beta2, double prec, double rec) {
        double denom = beta2 * prec + rec;
        return denom > 0.0 ? (1.0 + beta2) * prec * rec / denom : 0.0;
    };
    double f_small = 0.0, f_large = 0.0;
    for (int64_t j = 0; j < cfg.angles; ++j) {
        double theta = M_PI_2 * static_cast<double>(j + 1) / static_cast<double>(cfg.angles + 1);
        double lambda = std::tan(theta);
        double prec = 0.0, rec = 0.0;
        for (int64_t c = 0; c < m; ++c) {
            prec += std::min(lambda * p_hist[static_cast<size_t>(c)],
                             q_hist[static_cast<size_t>(c)]);
            rec += std::min(p_hist[static_cast<size_t>(c)],
                            q_hist[static_cast<size_t>(c)] / lambda);
        }
        prec = std::min(prec, 1.0);
        rec = std::min(rec, 1.0);
        f_small = std::max(f_small, f_beta(1.0 / 64.0, prec, rec));
        f_large = std::max(f_large, f_beta(64.0, prec, rec));
    }
    return {f_small, f_large};
}

double entropy_gap(const ModelBundle& bundle, const OpenSetDataset& data) {
    if (data.n_unlabeled() == 0)
        throw ValidationError("entropy gap needs unlabeled samples with provenance");
    const std::vector<uint8_t>& tags = data.unlabeled_open_;
    int64_t n_open = 0;
    for (uint8_t t : tags) n_open += t;
    int64_t n_closed = static_cast<int64_t>(tags.size()) - n_open;
    if (n_open == 0 || n_closed == 0)
        throw ValidationError("entropy gap needs both open- and closed-provenance samples");

    Tensor probs = bundle.classify_nograd(data.unlabeled_images());
    int64_t k = probs.shape()[1];
    double sum_open = 0.0, sum_closed = 0.0;
    std::vector<double> row(static_cast<size_t>(k));
    for (size_t i = 0; i < tags.size(); ++i) {
        const double* p = probs.data() + static_cast<int64_t>(i) * k;
        std::copy(p, p + k, row.begin());
        double h = normalized_entropy(ProbVector(row));
        (tags[i] ? sum_open : sum_closed) += h;
    }
    return sum_open / static_cast<double>(n_open) -
           sum_closed / static_cast<double>(n_closed);
}

MetricReport compute_metrics(const ModelBundle& bundle, const OpenSetDataset& data,
                             const MetricEmbedder& embedder, const EvalConfig& cfg) {
    if (cfg.n_samples < MetricEmbedder::kFeatureDim + 1)
        throw ValidationError("n_samples too small for covariance estimation");
    if (data.n_eval() < MetricEmbedder::kFeatureDim + 1)
        throw ValidationError("eval split too small for covariance estimation");

    MetricReport report;
    report.n_samples = cfg.n_samples;
    report.extractor_hash = embedder.hash();

    const ModelConfig& mc = bundle.config();
    PriorSampler prior(mc.latent_dim, mc.k, cfg.seed);
    Tensor fake({cfg.n_samples, mc.channels, mc.image_side, mc.image_side});
    int64_t px = mc.pixels();
    constexpr int64_t kChunk = 256;
    for (int64_t at = 0; at < cfg.n_samples; at += kChunk) {
        int64_t len = std::min(kChunk, cfg.n_samples - at);
        auto batch = prior.sample(len);
        Tensor imgs = bundle.generator().generate_nograd(batch.z, batch.y);
        std::memcpy(fake.data() + at * px, imgs.data(),
                    sizeof(double) * static_cast<size_t>(len * px));
    }

    FeatureSet real_fs{embedder.embed(data.eval_images()), "real"};
    FeatureSet fake_fs{embedder.embed(fake), "fake"};
    report.fid = fid(real_fs, fake_fs);
    report.is_score = inception_score(embedder.class_probs(fake));
    PrdConfig prd = cfg.prd;
    prd.seed = cfg.seed;
    std::tie(report.f_small, report.f_large) = f_beta_scores(real_fs, fake_fs, prd);

    try {
        report.entropy_gap = entropy_gap(bundle, data);
    } catch (const ValidationError& e) {
        report.entropy_gap = 0.0;
        report.provenance.push_back(std::string("entropy gap unavailable: ") + e.what());
    }

    {
        std::ostringstream ss;
        ss << "prd: m=" << prd.clusters << " angles=" << prd.angles;
        report.provenance.push_back(ss.str());
    }
    if (cfg.n_samples < 10000) {
        std::ostringstream ss;
        ss << "n_samples=" << cfg.n_samples << " (toy scale, reference uses 10000)";
        report.provenance.push_back(ss.str());
    }
    if (embedder.holdout_accuracy() < 0.8) {
        std::ostringstream ss;
        ss << "extractor holdout accuracy " << embedder.holdout_accuracy()
           << " below 0.80; feature space may be weak";
        report.provenance.push_back(ss.str());
    }
    return report;
}

}  // namespace metrics
}  // namespace ossgan
