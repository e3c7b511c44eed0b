#include "doctest.h"

#include <cmath>
#include <cstring>
#include <vector>

#include "ossgan/errors.hpp"
#include "ossgan/label_algebra.hpp"
#include "ossgan/models.hpp"

using namespace ossgan;
using graph::Param;
using graph::Tape;
using graph::Var;

namespace {

ModelConfig desk_config() {
    ModelConfig cfg;
    cfg.k = 4;
    return cfg;
}

Tensor random_images(Rng& rng, int64_t n) {
    Tensor x({n, 1, 8, 8});
    for (auto& v : x.vec()) v = std::tanh(rng.normal());
    return x;
}

}  // namespace

TEST_CASE("zeroed projection head scores 0 for every input") {
    ModelBundle m(desk_config(), 7);
    for (Param* p : m.projection().params()) p->value.fill(0.0);
    Rng rng(1);
    const Tensor x = random_images(rng, 3);
    Tensor y = one_hot_rows({0, 2, 3}, 4);
    const Tensor s = m.scores_nograd(x, y);
    for (double v : s.vec()) CHECK(v == 0.0);
}

TEST_CASE("projection score matches the hand-evaluated bilinear form") {
    // h=2, feat=[1,2], W1=[0.5,-1], b=0.1, W2=I, y=e^(1) -> -0.4
    ModelConfig cfg = desk_config();
    cfg.k = 2;
    cfg.feature_dim = 2;
    Rng rng(3);
    ProjectionHead head(cfg, rng);
    head.params()[0]->value = Tensor({2, 1}, {0.5, -1.0});
    head.params()[1]->value = Tensor({1}, {0.1});
    head.params()[2]->value = Tensor({2, 2}, {1, 0, 0, 1});

    Tape t;
    Var feat = t.constant(Tensor({1, 2}, {1.0, 2.0}));
    Var y = t.constant(Tensor({1, 2}, {1.0, 0.0}));
    CHECK(head.score(t, feat, y).value()[0] == doctest::Approx(-0.4));
}

TEST_CASE("score is linear in the condition vector") {
    ModelBundle m(desk_config(), 11);
    Rng rng(5);
    const Tensor x = random_images(rng, 2);
    const double alpha = 0.3;

    Tensor y1 = one_hot_rows({1, 0}, 4);
    Tensor y2 = one_hot_rows({3, 2}, 4);
    Tensor mix({2, 4});
    for (int64_t i = 0; i < 8; ++i)
        mix[i] = alpha * y1[i] + (1 - alpha) * y2[i];

    const Tensor s1 = m.scores_nograd(x, y1);
    const Tensor s2 = m.scores_nograd(x, y2);
    const Tensor sm = m.scores_nograd(x, mix);
    for (int64_t i = 0; i < 2; ++i) {
        const double expect = alpha * s1[i] + (1 - alpha) * s2[i];
        CHECK(sm[i] == doctest::Approx(expect).epsilon(1e-6));
    }
}

TEST_CASE("swapping embedding rows permutes one-hot scores") {
    ModelBundle m(desk_config(), 13);
    Rng rng(6);
    const Tensor x = random_images(rng, 1);
    const double s0 = m.discriminator_score(x, {1, 0, 0, 0});
    const double s1 = m.discriminator_score(x, {0, 1, 0, 0});

    Tensor& w2 = m.projection().w2().value;
    const int64_t h = m.config().feature_dim;
    for (int64_t j = 0; j < h; ++j) std::swap(w2[0 * h + j], w2[1 * h + j]);

    CHECK(m.discriminator_score(x, {1, 0, 0, 0}) == doctest::Approx(s1));
    CHECK(m.discriminator_score(x, {0, 1, 0, 0}) == doctest::Approx(s0));
}

TEST_CASE("classifier output is a valid ProbVector, uniform at init") {
    ModelBundle m(desk_config(), 17);
    Rng rng(8);
    const Tensor x = random_images(rng, 5);
    const Tensor p = m.classify_nograd(x);
    for (int64_t i = 0; i < 5; ++i) {
        std::vector<double> row(p.data() + i * 4, p.data() + (i + 1) * 4);
        const ProbVector pv(row);  // validates nonnegativity and the sum
        CHECK(normalized_entropy(pv) > 0.9);
        for (double v : row) CHECK(v == doctest::Approx(0.25));
    }
    // single-sample wrapper agrees
    const Tensor one = random_images(rng, 1);
    const ProbVector pv = m.classify(one);
    CHECK(pv.k() == 4);
}

TEST_CASE("classifier stays valid after the head is perturbed") {
    ModelBundle m(desk_config(), 19);
    Rng rng(9);
    for (Param* p : m.classifier().params())
        for (auto& v : p->value.vec()) v = 3.0 * rng.normal();
    const Tensor p = m.classify_nograd(random_images(rng, 4));
    for (int64_t i = 0; i < 4; ++i) {
        std::vector<double> row(p.data() + i * 4, p.data() + (i + 1) * 4);
        CHECK_NOTHROW(ProbVector{row});
    }
}

TEST_CASE("generation is deterministic and class-sensitive") {
    ModelBundle m(desk_config(), 23);
    Rng rng(10);
    Tensor z({2, 32});
    for (auto& v : z.vec()) v = rng.normal();
    const Tensor y = one_hot_rows({0, 0}, 4);

    const Tensor a = m.generator().generate_nograd(z, y);
    const Tensor b = m.generator().generate_nograd(z, y);
    REQUIRE(a.shape() == std::vector<int64_t>{2, 1, 8, 8});
    CHECK(std::memcmp(a.data(), b.data(), sizeof(double) * a.numel()) == 0);

    // same z, different class embedding -> different pixels even untrained
    const Tensor c = m.generator().generate_nograd(z, one_hot_rows({1, 1}, 4));
    double diff = 0.0;
    for (int64_t i = 0; i < a.numel(); ++i) diff += std::fabs(a[i] - c[i]);
    CHECK(diff > 1e-6);
}

TEST_CASE("generator output stays finite and in range over many draws") {
    ModelBundle m(desk_config(), 29);
    PriorSampler prior(32, 4, 31);
    int64_t checked = 0;
    for (int rep = 0; rep < 20; ++rep) {
        auto batch = prior.sample(500);
        const Tensor imgs = m.generator().generate_nograd(batch.z, batch.y);
        CHECK(imgs.all_finite());
        for (double v : imgs.vec()) {
            CHECK(v >= -1.0);
            CHECK(v <= 1.0);
        }
        checked += 500;
    }
    CHECK(checked == 10000);
}

TEST_CASE("prior sampler hits uniform class frequencies and centered latents") {
    PriorSampler prior(32, 4, 37);
    auto batch = prior.sample(10000);

    std::vector<int64_t> counts(4, 0);
    for (int64_t c : batch.classes) counts[static_cast<size_t>(c)]++;
    // 3 sigma of Binomial(10^4, 1/4)
    const double bound = 3.0 * std::sqrt(10000 * 0.25 * 0.75);
    for (int64_t c : counts) CHECK(std::fabs(double(c) - 2500.0) <= bound);

    for (int64_t j = 0; j < 32; ++j) {
        double mean = 0.0;
        for (int64_t i = 0; i < 10000; ++i) mean += batch.z[i * 32 + j];
        mean /= 10000.0;
        CHECK(std::fabs(mean) < 4.0 / std::sqrt(10000.0));
    }

    // one-hot rows match the recorded classes
    for (int64_t i = 0; i < 100; ++i) {
        const int64_t c = batch.classes[static_cast<size_t>(i)];
        CHECK(batch.y[i * 4 + c] == 1.0);
    }
}

TEST_CASE("prior sampler is reproducible per seed") {
    PriorSampler a(32, 4, 41), b(32, 4, 41), c(32, 4, 42);
    auto ba = a.sample(64), bb = b.sample(64), bc = c.sample(64);
    CHECK(ba.z.vec() == bb.z.vec());
    CHECK(ba.classes == bb.classes);
    CHECK(ba.z.vec() != bc.z.vec());
}

TEST_CASE("discriminator score gradient w.r.t. the input matches finite differences") {
    ModelBundle m(desk_config(), 43);
    Rng rng(12);
    Param x("x", random_images(rng, 1));
    const Tensor y = one_hot_rows({2}, 4);

    Tape t;
    Var feat = m.extractor().forward(t, t.param(x));
    Var score = m.projection().score(t, feat, t.constant(y));
    t.backward(t.sum_vec(score));

    const double eps = 1e-5;
    for (int64_t idx : {int64_t(0), int64_t(17), int64_t(40), int64_t(63)}) {
        const double keep = x.value[idx];
        x.value[idx] = keep + eps;
        const double lp = m.scores_nograd(x.value, y)[0];
        x.value[idx] = keep - eps;
        const double lm = m.scores_nograd(x.value, y)[0];
        x.value[idx] = keep;
        const double fd = (lp - lm) / (2 * eps);
        const double got = x.grad[idx];
        const double denom = std::max({std::fabs(fd), std::fabs(got), 1e-6});
        CHECK(std::fabs(got - fd) / denom < 1e-4);
    }
}

TEST_CASE("extended condition widens the projection embedding") {
    ModelConfig cfg = desk_config();
    cfg.extended_condition = true;
    CHECK(cfg.cond_dim() == 5);
    ModelBundle m(cfg, 47);
    Rng rng(14);
    const Tensor x = random_images(rng, 1);
    CHECK_NOTHROW(m.discriminator_score(x, {0, 0, 0, 0, 1}));
    CHECK_THROWS_AS(m.discriminator_score(x, {1, 0, 0, 0}), ConfigError);
}

TEST_CASE("model bundles are reproducible per seed and differ across seeds") {
    ModelBundle a(desk_config(), 53), b(desk_config(), 53), c(desk_config(), 54);
    auto pa = a.all_params(), pb = b.all_params(), pc = c.all_params();
    REQUIRE(pa.size() == pb.size());
    for (size_t i = 0; i < pa.size(); ++i)
        CHECK(pa[i]->value.vec() == pb[i]->value.vec());
    bool any_diff = false;
    for (size_t i = 0; i < pa.size(); ++i)
        if (pa[i]->value.vec() != pc[i]->value.vec() &&
            pa[i]->value.numel() > 0 && pa[i]->name != "c.w" &&
            pa[i]->name != "c.b")
            any_diff = true;
    CHECK(any_diff);
}

TEST_CASE("adam with beta1 = 0 tracks the current gradient") {
    Param p("p", Tensor::scalar(1.0));
    Adam opt(AdamConfig{0.01, 0.0, 0.999, 1e-8});

    p.grad.fill(0.5);
    opt.step({&p});
    // m = g = 0.5; vhat = g^2; update = lr * g / (|g| + eps)
    CHECK(p.value[0] == doctest::Approx(1.0 - 0.01 * 0.5 / (0.5 + 1e-8))
                            .epsilon(1e-12));

    const double before = p.value[0];
    p.grad.fill(-0.5);
    opt.step({&p});
    CHECK(p.value[0] > before);  // sign follows the fresh gradient
    CHECK(opt.steps_taken() == 2);
}

TEST_CASE("config validation rejects unsupported switches") {
    ModelConfig cfg = desk_config();
    cfg.spectral_norm = true;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.spectral_norm = false;
    cfg.k = 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
