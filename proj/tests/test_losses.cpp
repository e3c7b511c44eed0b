#include "doctest.h"

#include <cmath>
#include <vector>

#include "ossgan/errors.hpp"
#include "ossgan/losses.hpp"

using namespace ossgan;
using graph::Tape;
using graph::Var;

namespace {

ModelConfig small_config(bool extended = false) {
    ModelConfig cfg;
    cfg.k = 4;
    cfg.extended_condition = extended;
    return cfg;
}

Tensor random_images(Rng& rng, int64_t n) {
    Tensor x({n, 1, 8, 8});
    for (auto& v : x.vec()) v = std::tanh(rng.normal());
    return x;
}

Tensor random_prob_rows(Rng& rng, int64_t n, int64_t k) {
    Tensor logits({n, k});
    for (auto& v : logits.vec()) v = rng.normal();
    Tensor probs({n, k});
    kernels::ref::softmax_rows_fwd(logits.data(), probs.data(), n, k);
    return probs;
}

std::vector<ProbVector> rows_as_probs(const Tensor& p) {
    std::vector<ProbVector> out;
    const int64_t n = p.dim(0), k = p.dim(1);
    for (int64_t i = 0; i < n; ++i)
        out.push_back(ProbVector(
            std::vector<double>(p.data() + i * k, p.data() + (i + 1) * k)));
    return out;
}

}  // namespace

TEST_CASE("hinge values at and around the kink") {
    CHECK(hinge(-2.0) == 0.0);
    CHECK(hinge(0.5) == doctest::Approx(1.5));
    CHECK(hinge(-1.0) == 0.0);
}

TEST_CASE("labeled adversarial loss on frozen cases") {
    CHECK(adv_labeled({0.3}, {-0.2}) == doctest::Approx(1.5));
    CHECK(adv_labeled({10.0}, {-10.0}) == 0.0);
    // mean hinge(1) over real + mean hinge(1) over fake = 2 + 2
    CHECK(adv_labeled({-1.0, -1.0}, {1.0, 1.0}) == doctest::Approx(4.0));
    CHECK_THROWS_AS(adv_labeled({}, {1.0}), ValidationError);
    CHECK_THROWS_AS(adv_labeled({1.0}, {}), ValidationError);
}

TEST_CASE("generator loss is the negated score mean") {
    CHECK(generator_loss({0.0}) == 0.0);
    CHECK(generator_loss({1.0, -1.0}) == 0.0);
    CHECK(generator_loss({2.5}) == doctest::Approx(-2.5));
    CHECK_THROWS_AS(generator_loss({}), ValidationError);
}

TEST_CASE("classifier cross entropy on frozen cases") {
    const ProbVector perfect = ProbVector::one_hot(3, 0);
    CHECK(cls_cross_entropy({perfect}, std::vector<int64_t>{0}) ==
          doctest::Approx(0.0).epsilon(1e-9));

    CHECK(cls_cross_entropy({uniform_label(4)}, std::vector<int64_t>{2}) ==
          doctest::Approx(std::log(4.0)).epsilon(1e-12));

    // monotone: more mass on the true class, lower loss
    double prev = 1e9;
    for (double p : {0.3, 0.5, 0.7, 0.9, 0.99}) {
        const double rest = (1.0 - p) / 2.0;
        const double v =
            cls_cross_entropy({ProbVector({p, rest, rest})},
                              std::vector<int64_t>{0});
        CHECK(v < prev);
        prev = v;
    }

    // one-hot label overload matches the index overload
    CHECK(cls_cross_entropy({uniform_label(4)}, {ProbVector::one_hot(4, 2)}) ==
          cls_cross_entropy({uniform_label(4)}, std::vector<int64_t>{2}));
    CHECK_THROWS_AS(
        cls_cross_entropy({uniform_label(4)}, std::vector<int64_t>{}),
        ValidationError);
}

TEST_CASE("reject loss filters by confidence with >= at the boundary") {
    const ProbVector low({0.4, 0.3, 0.3});
    const ProbVector high({0.8, 0.1, 0.1});
    const ProbVector edge({0.5, 0.25, 0.25});

    int64_t kept = -1;
    CHECK(adv_unlabeled_reject({{0.3, low}}, Threshold(0.5), &kept) == 0.0);
    CHECK(kept == 0);

    CHECK(adv_unlabeled_reject({{0.3, high}}, Threshold(0.5), &kept) ==
          doctest::Approx(0.7));
    CHECK(kept == 1);

    // boundary max(p) == c is kept
    CHECK(adv_unlabeled_reject({{0.0, edge}}, Threshold(0.5), &kept) ==
          doctest::Approx(1.0));
    CHECK(kept == 1);

    // c = 0 keeps everything: equals the unfiltered mean
    const std::vector<std::pair<double, ProbVector>> batch = {
        {0.3, low}, {-0.4, high}, {1.2, edge}};
    double unfiltered = (hinge(-0.3) + hinge(0.4) + hinge(-1.2)) / 3.0;
    CHECK(adv_unlabeled_reject(batch, Threshold(0.0)) ==
          doctest::Approx(unfiltered));
}

TEST_CASE("open-set unlabeled loss is a plain hinge mean") {
    CHECK(adv_unlabeled_openset({0.0}) == doctest::Approx(1.0));
    CHECK(adv_unlabeled_openset({1.5, 2.0, 3.0}) == 0.0);
    CHECK_THROWS_AS(adv_unlabeled_openset({}), ValidationError);

    Rng rng(101);
    std::vector<double> scores(37);
    for (auto& s : scores) s = rng.normal();
    double fold = 0.0;
    for (double s : scores) fold += std::max(0.0, 1.0 - s);
    fold /= double(scores.size());
    CHECK(adv_unlabeled_openset(scores) == doctest::Approx(fold).epsilon(1e-12));
}

TEST_CASE("openset labeled loss with a zeroed extra column equals the K-class loss") {
    ModelBundle base(small_config(false), 71);
    ModelBundle ext(small_config(true), 72);

    // share every discriminator parameter; the extra embedding row is zero
    for (graph::Param* p : base.extractor().params())
        ext.find_param(p->name)->value = p->value;
    ext.find_param("p.w1")->value = base.find_param("p.w1")->value;
    ext.find_param("p.b")->value = base.find_param("p.b")->value;
    Tensor& w2e = ext.projection().w2().value;
    const Tensor& w2b = base.projection().w2().value;
    const int64_t h = base.config().feature_dim;
    for (int64_t r = 0; r < 4; ++r)
        for (int64_t j = 0; j < h; ++j) w2e[r * h + j] = w2b[r * h + j];
    for (int64_t j = 0; j < h; ++j) w2e[4 * h + j] = 0.0;

    Rng rng(73);
    const Tensor real = random_images(rng, 3);
    const Tensor fake = random_images(rng, 3);
    const std::vector<int64_t> classes = {0, 2, 3};

    const Tensor y = one_hot_rows(classes, 4);
    Tensor y_pad({3, 5});
    for (int64_t i = 0; i < 3; ++i)
        for (int64_t j = 0; j < 4; ++j) y_pad[i * 5 + j] = y[i * 4 + j];

    const Tensor rb = base.scores_nograd(real, y);
    const Tensor fb = base.scores_nograd(fake, y);
    const Tensor re = ext.scores_nograd(real, y_pad);
    const Tensor fe = ext.scores_nograd(fake, y_pad);

    const double lb = adv_labeled(rb.vec(), fb.vec());
    const double le = adv_labeled_openset(re.vec(), fe.vec());
    CHECK(le == doctest::Approx(lb).epsilon(1e-9));
    CHECK(generator_loss_openset(fe.vec()) ==
          doctest::Approx(generator_loss(fb.vec())).epsilon(1e-9));
}

TEST_CASE("ossgan unlabeled loss reduces to the uniform condition at init") {
    ModelBundle m(small_config(), 81);
    Rng rng(82);
    const Tensor u = random_images(rng, 5);

    // zero-initialized classifier head emits exactly uniform rows
    Tensor uniform({5, 4});
    uniform.fill(0.25);
    const Tensor scores = m.scores_nograd(u, uniform);
    double expect = 0.0;
    for (double s : scores.vec()) expect += hinge(-s);
    expect /= 5.0;

    CHECK(adv_unlabeled_ossgan_value(m, u) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("ossgan unlabeled loss with zero projection head is 1") {
    ModelBundle m(small_config(), 83);
    for (graph::Param* p : m.projection().params()) p->value.fill(0.0);
    Rng rng(84);
    CHECK(adv_unlabeled_ossgan_value(m, random_images(rng, 4)) ==
          doctest::Approx(1.0));
}

TEST_CASE("ossgan unlabeled loss approaches the hard pseudo-label limit") {
    ModelBundle m(small_config(), 85);
    // saturate the classifier toward class 2 on every input
    m.find_param("c.b")->value = Tensor({4}, {0.0, 0.0, 60.0, 0.0});
    Rng rng(86);
    const Tensor u = random_images(rng, 4);

    const Tensor hard = one_hot_rows({2, 2, 2, 2}, 4);
    const Tensor scores = m.scores_nograd(u, hard);
    double expect = 0.0;
    for (double s : scores.vec()) expect += hinge(-s);
    expect /= 4.0;

    CHECK(adv_unlabeled_ossgan_value(m, u) ==
          doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("ossgan classifier loss on frozen cases") {
    const AblationFlags all_on{true, true};
    const AblationFlags no_h{false, true};
    const AblationFlags lbl_only_h{true, false};
    const AblationFlags bare{false, false};

    // flags all off -> labeled CE only (Eq. 4 reduction)
    CHECK(cls_loss_ossgan({uniform_label(4)}, {ProbVector::one_hot(4, 1)}, {},
                          {}, bare, 1.0) ==
          doctest::Approx(std::log(4.0)));

    // uniform labeled prediction, no fake group: log 4 - 1
    CHECK(cls_loss_ossgan({uniform_label(4)}, {ProbVector::one_hot(4, 0)}, {},
                          {}, lbl_only_h, 1.0) ==
          doctest::Approx(std::log(4.0) - 1.0));

    // perfect one-hot predictions: CE 0, H 0
    CHECK(cls_loss_ossgan({ProbVector::one_hot(4, 3)},
                          {ProbVector::one_hot(4, 3)}, {}, {}, lbl_only_h,
                          1.0) == doctest::Approx(0.0).epsilon(1e-9));

    // balance weighting on the fake group, hand-composed:
    // labeled: CE = ln 2, H = 1; fake: CE = 0, H = 0; balance = 2
    CHECK(cls_loss_ossgan({uniform_label(2)}, {ProbVector::one_hot(2, 0)},
                          {ProbVector::one_hot(2, 1)},
                          {ProbVector::one_hot(2, 1)}, all_on, 2.0) ==
          doctest::Approx(std::log(2.0) - 1.0).epsilon(1e-9));

    // with balance = 0 the fake group vanishes even when enabled
    CHECK(cls_loss_ossgan({uniform_label(2)}, {ProbVector::one_hot(2, 0)},
                          {uniform_label(2)}, {ProbVector::one_hot(2, 1)},
                          no_h, 0.0) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("total_d_loss composes Eq. 1 and the parts re-sum exactly") {
    const LossTerms lt = total_d_loss(1.0, 2.0, 3.0, 0.5);
    CHECK(lt.total_d == doctest::Approx(4.5));
    CHECK(composition_holds(lt));

    const LossTerms no_cls = total_d_loss(1.25, -0.5, 99.0, 0.0);
    CHECK(no_cls.total_d == doctest::Approx(0.75));
    CHECK(composition_holds(no_cls));

    CHECK_THROWS_AS(total_d_loss(1.0, 1.0, 1.0, -0.1), ValidationError);
    CHECK_THROWS_AS(total_d_loss(std::nan(""), 0.0, 0.0, 0.1), NumericError);
}

TEST_CASE("tape builders agree with the scalar oracles") {
    Rng rng(91);
    const int64_t n = 6, k = 4;
    const Tensor probs = random_prob_rows(rng, n, k);
    std::vector<int64_t> classes;
    for (int64_t i = 0; i < n; ++i)
        classes.push_back(static_cast<int64_t>(rng.below(k)));
    const Tensor targets = one_hot_rows(classes, k);

    Tensor scores({n});
    for (auto& s : scores.vec()) s = rng.normal();

    Tape t;
    Var p = t.constant(probs);
    Var s = t.constant(scores);

    CHECK(build::cross_entropy_mean(t, p, targets).value()[0] ==
          doctest::Approx(cls_cross_entropy(rows_as_probs(probs), classes))
              .epsilon(1e-12));

    double mean_h = 0.0;
    for (const auto& pv : rows_as_probs(probs)) mean_h += normalized_entropy(pv);
    mean_h /= double(n);
    CHECK(build::entropy_mean(t, p).value()[0] ==
          doctest::Approx(mean_h).epsilon(1e-12));

    double hneg = 0.0, hpos = 0.0;
    for (double v : scores.vec()) {
        hneg += hinge(-v);
        hpos += hinge(v);
    }
    CHECK(build::mean_hinge_neg(t, s).value()[0] ==
          doctest::Approx(hneg / n).epsilon(1e-12));
    CHECK(build::mean_hinge_pos(t, s).value()[0] ==
          doctest::Approx(hpos / n).epsilon(1e-12));
    CHECK(build::mean_neg(t, s).value()[0] ==
          doctest::Approx(generator_loss(scores.vec())).epsilon(1e-12));

    CHECK(build::ossgan_cls_group(t, p, targets, true).value()[0] ==
          doctest::Approx(cls_cross_entropy(rows_as_probs(probs), classes) -
                          mean_h)
              .epsilon(1e-12));
}
