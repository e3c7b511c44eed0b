#include <cmath>
#include <cstring>
#include <filesystem>

#include <doctest.h>

#include "ossgan/dataset.hpp"
#include "ossgan/errors.hpp"
#include "ossgan/label_algebra.hpp"
#include "ossgan/metrics.hpp"
#include "ossgan/models.hpp"
#include "ossgan/rng.hpp"
#include "ossgan/serialize.hpp"

using namespace ossgan;

namespace {

FeatureSet gaussian_features(int64_t n, int64_t f, const std::vector<double>& shift,
                             uint64_t seed, const char* tag) {
    Tensor t({n, f});
    Rng rng(seed);
    for (int64_t i = 0; i < n; ++i)
        for (int64_t j = 0; j < f; ++j)
            t.data()[i * f + j] =
                rng.normal() + (j < static_cast<int64_t>(shift.size())
                                    ? shift[static_cast<size_t>(j)]
                                    : 0.0);
    return FeatureSet{std::move(t), tag};
}

const MetricEmbedder& toy_embedder() {
    static MetricEmbedder e = [] {
        Corpus corpus = make_toy_corpus(8, 60, 8, 21, 20);
        return MetricEmbedder::fit(corpus, MetricEmbedder::FitConfig{400, 64, 2e-3, 5});
    }();
    return e;
}

}  // namespace

TEST_CASE("fid: zero on self, symmetric, matches the Gaussian closed form") {
    FeatureSet a = gaussian_features(200, 8, {}, 3, "real");
    FeatureSet a2{a.features, "fake"};
    CHECK(metrics::fid(a, a2) < 1e-6);

    FeatureSet b = gaussian_features(300, 8, {0.7, -0.3}, 4, "fake");
    double ab = metrics::fid(a, b);
    double ba = metrics::fid(b, a);
    CHECK(std::abs(ab - ba) < 1e-8);
    CHECK(ab > 0.0);

    // N(0,I) vs N(delta,I) has squared Frechet distance ||delta||^2
    std::vector<double> delta = {1.0, 0.5, -0.25, 0.75, 0.0, -1.0, 0.33, 0.6};
    double d2 = 0.0;
    for (double v : delta) d2 += v * v;
    FeatureSet x = gaussian_features(10000, 8, {}, 11, "real");
    FeatureSet y = gaussian_features(10000, 8, delta, 12, "fake");
    double got = metrics::fid(x, y);
    CHECK(got == doctest::Approx(d2).epsilon(0.05));
}

TEST_CASE("fid input validation") {
    FeatureSet small = gaussian_features(8, 8, {}, 1, "real");
    FeatureSet ok = gaussian_features(20, 8, {}, 2, "fake");
    CHECK_THROWS_AS(metrics::fid(small, ok), ValidationError);
    FeatureSet other = gaussian_features(20, 4, {}, 3, "fake");
    CHECK_THROWS_AS(metrics::fid(ok, other), ValidationError);
}

TEST_CASE("inception score: uniform gives 1, confident balanced gives K") {
    Tensor uniform({6, 4});
    uniform.fill(0.25);
    CHECK(std::abs(metrics::inception_score(uniform) - 1.0) < 1e-9);

    Tensor onehot({40, 4});
    for (int64_t i = 0; i < 40; ++i) onehot.data()[i * 4 + (i % 4)] = 1.0;
    CHECK(std::abs(metrics::inception_score(onehot) - 4.0) < 1e-6);

    Rng rng(9);
    Tensor random({50, 5});
    for (int64_t i = 0; i < 50; ++i) {
        double sum = 0.0;
        for (int64_t c = 0; c < 5; ++c) {
            random.data()[i * 5 + c] = 0.05 + rng.uniform();
            sum += random.data()[i * 5 + c];
        }
        for (int64_t c = 0; c < 5; ++c) random.data()[i * 5 + c] /= sum;
    }
    CHECK(metrics::inception_score(random) >= 1.0);

    std::vector<ProbVector> rows;
    for (int64_t i = 0; i < 40; ++i) rows.push_back(ProbVector::one_hot(4, i % 4));
    CHECK(std::abs(metrics::inception_score(rows) - 4.0) < 1e-6);

    Tensor bad({2, 3});
    bad.fill(0.5);
    CHECK_THROWS_AS(metrics::inception_score(bad), ValidationError);
    CHECK_THROWS_AS(metrics::inception_score(std::vector<ProbVector>{}), ValidationError);
}

TEST_CASE("f_beta: identical high, disjoint low, swap exchanges the pair") {
    // two-mode mixture so the histograms have structure
    auto mixture = [](int64_t n, uint64_t seed, double frac_high) {
        Tensor t({n, 8});
        Rng rng(seed);
        for (int64_t i = 0; i < n; ++i) {
            double base = rng.uniform() < frac_high ? 6.0 : 0.0;
            for (int64_t j = 0; j < 8; ++j) t.data()[i * 8 + j] = base + 0.5 * rng.normal();
        }
        return t;
    };

    FeatureSet same_a{mixture(2000, 31, 0.5), "real"};
    FeatureSet same_b{same_a.features, "fake"};
    auto [ident_small, ident_large] = metrics::f_beta_scores(same_a, same_b);
    CHECK(ident_small >= 0.95);
    CHECK(ident_large >= 0.95);

    FeatureSet far = gaussian_features(500, 8, {40.0, 40.0, 40.0, 40.0}, 7, "fake");
    FeatureSet near = gaussian_features(500, 8, {}, 8, "real");
    auto [dis_small, dis_large] = metrics::f_beta_scores(near, far);
    CHECK(dis_small <= 0.05);
    CHECK(dis_large <= 0.05);

    // fake covers only one mode of real: precision-weighted and
    // recall-weighted scores must trade places under a swap
    FeatureSet real_two{mixture(1200, 41, 0.5), "real"};
    FeatureSet fake_one{mixture(1200, 42, 0.0), "fake"};
    auto [f18, f8] = metrics::f_beta_scores(real_two, fake_one);
    auto [f18_swapped, f8_swapped] = metrics::f_beta_scores(fake_one, real_two);
    CHECK(std::abs(f18 - f8_swapped) < 1e-6);
    CHECK(std::abs(f8 - f18_swapped) < 1e-6);
    CHECK(std::abs(f18 - f8) > 0.05);  // the construction is genuinely asymmetric

    SUBCASE("adding real duplicates to the fake set does not hurt recall") {
        Tensor bigger({1800, 8});
        std::memcpy(bigger.data(), fake_one.features.data(), sizeof(double) * 1200 * 8);
        std::memcpy(bigger.data() + 1200 * 8, real_two.features.data(),
                    sizeof(double) * 600 * 8);
        FeatureSet fake_plus{std::move(bigger), "fake"};
        auto [f18b, f8b] = metrics::f_beta_scores(real_two, fake_plus);
        (void)f18b;
        CHECK(f8b >= f8 - 1e-9);
    }

    SUBCASE("validation") {
        FeatureSet tiny = gaussian_features(10, 8, {}, 2, "real");
        CHECK_THROWS_AS(metrics::f_beta_scores(tiny, far), ValidationError);
    }
}

TEST_CASE("entropy gap: uniform classifier gives 0, saturated split gives 1") {
    // corpus where class 0 is all-ones images and class 1 all-zeros
    Corpus corpus;
    corpus.images = Tensor({24, 1, 8, 8});
    corpus.n_classes = 2;
    for (int64_t i = 0; i < 24; ++i) {
        corpus.labels.push_back(i < 12 ? 0 : 1);
        corpus.is_eval.push_back(0);
        if (i < 12)
            for (int64_t p = 0; p < 64; ++p) corpus.images.data()[i * 64 + p] = 1.0;
    }
    // find a seed whose closed set is exactly {0}
    uint64_t seed = 0;
    bool found = false;
    for (; seed < 64 && !found; ++seed)
        found = build_splits(corpus, SplitConfig{1, 0.5, 1.0, seed}).closed_class_ids() ==
                std::vector<int64_t>{0};
    REQUIRE(found);
    OpenSetDataset ds = build_splits(corpus, SplitConfig{1, 0.5, 1.0, seed - 1});

    ModelConfig mc;
    mc.k = 4;
    ModelBundle bundle(mc, 77);
    // zero-initialized classifier head: exactly uniform probabilities
    CHECK(std::abs(metrics::entropy_gap(bundle, ds)) < 0.05);

    // drive features to saturation on ones-images, keep zeros-images at the
    // uniform fixed point, and route everything into class 0
    for (const char* name : {"d.c1.b", "d.c2.b", "d.c3.b", "d.fc.b", "c.b"})
        bundle.find_param(name)->value.fill(0.0);
    bundle.find_param("d.c1.w")->value.fill(0.5);
    bundle.find_param("d.c2.w")->value.fill(0.1);
    bundle.find_param("d.c3.w")->value.fill(0.1);
    bundle.find_param("d.fc.w")->value.fill(0.2);
    graph::Param* cw = bundle.find_param("c.w");
    cw->value.fill(0.0);
    for (int64_t j = 0; j < 128; ++j) cw->value.data()[j * 4 + 0] = 1.0;

    double gap = metrics::entropy_gap(bundle, ds);
    CHECK(gap == doctest::Approx(1.0).epsilon(1e-9));

    SUBCASE("one-sided provenance is rejected") {
        OpenSetDataset no_open = build_splits(corpus, SplitConfig{2, 0.5, 1.0, 1});
        CHECK_THROWS_AS(metrics::entropy_gap(bundle, no_open), ValidationError);
        OpenSetDataset no_unlabeled = build_splits(corpus, SplitConfig{2, 1.0, 0.0, 1});
        CHECK_THROWS_AS(metrics::entropy_gap(bundle, no_unlabeled), ValidationError);
    }
}

TEST_CASE("embedder: holdout accuracy, determinism, persistence") {
    const MetricEmbedder& e = toy_embedder();
    CAPTURE(e.holdout_accuracy());
    CHECK(e.holdout_accuracy() > 0.9);
    CHECK(e.hash().size() == 16);

    Corpus corpus = make_toy_corpus(8, 60, 8, 21, 20);
    MetricEmbedder again = MetricEmbedder::fit(corpus, MetricEmbedder::FitConfig{400, 64, 2e-3, 5});
    CHECK(again.hash() == e.hash());

    auto dir = std::filesystem::temp_directory_path() / "ossgan_embedder";
    std::filesystem::remove_all(dir);
    e.save(dir.string());
    MetricEmbedder back = MetricEmbedder::load(dir.string());
    CHECK(back.hash() == e.hash());
    CHECK(back.holdout_accuracy() == e.holdout_accuracy());

    Tensor probe({3, 1, 8, 8});
    for (int64_t i = 0; i < probe.numel(); ++i)
        probe.data()[i] = std::sin(0.1 * static_cast<double>(i));
    Tensor f1 = e.embed(probe);
    Tensor f2 = back.embed(probe);
    CHECK(std::memcmp(f1.data(), f2.data(), sizeof(double) * 3 * 64) == 0);

    SUBCASE("tampered archive is rejected") {
        auto payload = dir / "extractor.bin";
        auto bytes = io::read_text(payload.string());
        bytes[bytes.size() - 9] ^= char(0x11);
        io::write_text(payload.string(), bytes);
        CHECK_THROWS_AS(MetricEmbedder::load(dir.string()), DataError);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("embedder feature space separates real data from noise") {
    const MetricEmbedder& e = toy_embedder();
    Corpus corpus = make_toy_corpus(8, 60, 8, 21, 20);

    std::vector<int64_t> train_idx, eval_idx;
    for (size_t i = 0; i < corpus.is_eval.size(); ++i)
        (corpus.is_eval[i] ? eval_idx : train_idx).push_back(static_cast<int64_t>(i));
    auto slice = [&](const std::vector<int64_t>& idx) {
        Tensor t({static_cast<int64_t>(idx.size()), 1, 8, 8});
        for (size_t i = 0; i < idx.size(); ++i)
            std::memcpy(t.data() + static_cast<int64_t>(i) * 64,
                        corpus.images.data() + idx[i] * 64, sizeof(double) * 64);
        return t;
    };
    FeatureSet real_a{e.embed(slice(train_idx)), "real"};
    FeatureSet real_b{e.embed(slice(eval_idx)), "fake"};

    Rng rng(123);
    Tensor noise({320, 1, 8, 8});
    for (int64_t i = 0; i < noise.numel(); ++i) noise.data()[i] = rng.uniform(-1.0, 1.0);
    FeatureSet noise_fs{e.embed(noise), "fake"};

    double fid_real = metrics::fid(real_a, real_b);
    double fid_noise = metrics::fid(real_a, noise_fs);
    CAPTURE(fid_real);
    CAPTURE(fid_noise);
    CHECK(fid_real < 0.02 * fid_noise);
}

TEST_CASE("compute_metrics produces a full in-range report") {
    const MetricEmbedder& e = toy_embedder();
    Corpus corpus = make_toy_corpus(8, 60, 8, 21, 20);
    OpenSetDataset ds = build_splits(corpus, SplitConfig{6, 0.5, 1.0, 3});

    ModelConfig mc;
    mc.k = 6;
    ModelBundle bundle(mc, 99);
    metrics::EvalConfig cfg;
    cfg.n_samples = 400;
    cfg.seed = 17;
    MetricReport r = metrics::compute_metrics(bundle, ds, e, cfg);

    CHECK(r.fid >= 0.0);
    CHECK(r.is_score >= 1.0);
    CHECK(r.f_small >= 0.0);
    CHECK(r.f_small <= 1.0);
    CHECK(r.f_large >= 0.0);
    CHECK(r.f_large <= 1.0);
    CHECK(r.entropy_gap >= -1.0);
    CHECK(r.entropy_gap <= 1.0);
    CHECK(r.n_samples == 400);
    CHECK(r.extractor_hash == e.hash());
    bool noted_prd = false, noted_scale = false;
    for (const auto& note : r.provenance) {
        if (note.find("prd:") != std::string::npos) noted_prd = true;
        if (note.find("toy scale") != std::string::npos) noted_scale = true;
    }
    CHECK(noted_prd);
    CHECK(noted_scale);

    // an untrained generator should look nothing like the data
    CHECK(r.fid > 1.0);

    MetricReport r2 = metrics::compute_metrics(bundle, ds, e, cfg);
    CHECK(r.fid == r2.fid);
    CHECK(r.f_small == r2.f_small);
}
