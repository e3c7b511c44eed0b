#include <algorithm>
#include <cstring>
#include <filesystem>
#include <set>

#include <doctest.h>

#include "ossgan/dataset.hpp"
#include "ossgan/errors.hpp"
#include "ossgan/graph.hpp"
#include "ossgan/kernels.hpp"
#include "ossgan/losses.hpp"
#include "ossgan/models.hpp"
#include "ossgan/serialize.hpp"

using namespace ossgan;

namespace {

struct TableRow {
    int64_t n_closed;
    double labeled_ratio;
    int64_t labeled_per_class;
    int64_t unl_closed;
    int64_t unl_open;
};

// Tiny-ImageNet-shaped grid: 200 classes x 500 samples, full open usage
const TableRow kTinyRows[12] = {
    {150, 0.95, 475, 3750, 25000},  {150, 0.50, 250, 37500, 25000},
    {150, 0.20, 100, 60000, 25000}, {150, 0.10, 50, 67500, 25000},
    {100, 0.95, 475, 2500, 50000},  {100, 0.50, 250, 25000, 50000},
    {100, 0.20, 100, 40000, 50000}, {100, 0.10, 50, 45000, 50000},
    {50, 0.95, 475, 1250, 75000},   {50, 0.50, 250, 12500, 75000},
    {50, 0.20, 100, 20000, 75000},  {50, 0.10, 50, 22500, 75000},
};

}  // namespace

TEST_CASE("split counts match the published grid exactly") {
    Corpus corpus = make_toy_corpus(200, 500, 4, 7);
    for (const auto& row : kTinyRows) {
        CAPTURE(row.n_closed);
        CAPTURE(row.labeled_ratio);
        SplitConfig cfg{row.n_closed, row.labeled_ratio, 1.0, 11};
        OpenSetDataset ds = build_splits(corpus, cfg);
        auto s = ds.summarize();
        CHECK(s.n_labeled == row.n_closed * row.labeled_per_class);
        CHECK(s.n_unlabeled_closed == row.unl_closed);
        CHECK(s.n_unlabeled_open == row.unl_open);
        CHECK(static_cast<int64_t>(s.labeled_per_class.size()) == row.n_closed);
        for (int64_t c : s.labeled_per_class) CHECK(c == row.labeled_per_class);
    }
}

TEST_CASE("split invariants: disjoint sources, exact pool identities") {
    Corpus corpus = make_toy_corpus(20, 30, 4, 5, 6);
    SplitConfig cfg{12, 0.37, 0.55, 99};
    OpenSetDataset ds = build_splits(corpus, cfg);

    std::set<int64_t> seen;
    for (int64_t i : ds.labeled_source_indices()) CHECK(seen.insert(i).second);
    for (int64_t i : ds.unlabeled_source_indices()) CHECK(seen.insert(i).second);
    for (int64_t i : ds.eval_source_indices()) CHECK(seen.insert(i).second);

    auto s = ds.summarize();
    // every closed-class training sample is either labeled or unlabeled
    CHECK(s.n_labeled + s.n_unlabeled_closed == 12 * 30);
    CHECK(s.n_unlabeled_open ==
          static_cast<int64_t>(std::floor(0.55 * static_cast<double>(8 * 30))));
    CHECK(s.n_labeled == 12 * static_cast<int64_t>(std::floor(0.37 * 30.0)));
    CHECK(ds.n_eval() == 12 * 6);

    // labeled sources never come from eval or open classes
    std::set<int64_t> closed_set(ds.closed_class_ids().begin(), ds.closed_class_ids().end());
    CHECK(closed_set.size() == 12);
    for (size_t i = 0; i < ds.labeled_source_indices().size(); ++i) {
        int64_t src = ds.labeled_source_indices()[i];
        CHECK(corpus.is_eval[static_cast<size_t>(src)] == 0);
        // remapped class round-trips to the original corpus label
        CHECK(ds.closed_class_ids()[static_cast<size_t>(ds.labeled_classes()[i])] ==
              corpus.labels[static_cast<size_t>(src)]);
    }
    for (int64_t src : ds.unlabeled_source_indices())
        CHECK(corpus.is_eval[static_cast<size_t>(src)] == 0);
    for (size_t i = 0; i < ds.eval_source_indices().size(); ++i) {
        int64_t src = ds.eval_source_indices()[i];
        CHECK(corpus.is_eval[static_cast<size_t>(src)] == 1);
        CHECK(ds.closed_class_ids()[static_cast<size_t>(ds.eval_classes()[i])] ==
              corpus.labels[static_cast<size_t>(src)]);
    }

    // gathered pixels match the corpus at the recorded source index
    int64_t stride = 4 * 4;
    for (size_t i = 0; i < ds.labeled_source_indices().size(); i += 7)
        CHECK(std::memcmp(ds.labeled_images().data() + static_cast<int64_t>(i) * stride,
                          corpus.images.data() + ds.labeled_source_indices()[i] * stride,
                          sizeof(double) * static_cast<size_t>(stride)) == 0);
}

TEST_CASE("same seed reproduces the split, different seeds differ") {
    Corpus corpus = make_toy_corpus(20, 10, 4, 3);
    SplitConfig cfg{10, 0.5, 1.0, 42};
    OpenSetDataset a = build_splits(corpus, cfg);
    OpenSetDataset b = build_splits(corpus, cfg);
    CHECK(a.closed_class_ids() == b.closed_class_ids());
    CHECK(a.labeled_source_indices() == b.labeled_source_indices());
    CHECK(a.unlabeled_source_indices() == b.unlabeled_source_indices());
    CHECK(std::memcmp(a.labeled_images().data(), b.labeled_images().data(),
                      sizeof(double) * static_cast<size_t>(a.labeled_images().numel())) == 0);

    int differing = 0;
    for (uint64_t s = 0; s < 20; ++s) {
        SplitConfig c1{10, 0.5, 1.0, s};
        SplitConfig c2{10, 0.5, 1.0, s + 1000};
        OpenSetDataset d1 = build_splits(corpus, c1);
        OpenSetDataset d2 = build_splits(corpus, c2);
        if (d1.closed_class_ids() != d2.closed_class_ids() ||
            d1.labeled_source_indices() != d2.labeled_source_indices())
            ++differing;
    }
    CHECK(differing >= 19);
}

TEST_CASE("toy corpus is deterministic, bounded, and class-separated") {
    Corpus a = make_toy_corpus(8, 40, 8, 13, 10);
    Corpus b = make_toy_corpus(8, 40, 8, 13, 10);
    CHECK(a.images.numel() == 8 * 50 * 64);
    CHECK(std::memcmp(a.images.data(), b.images.data(),
                      sizeof(double) * static_cast<size_t>(a.images.numel())) == 0);
    CHECK(a.labels == b.labels);
    CHECK(a.is_eval == b.is_eval);

    int64_t n_eval = 0;
    for (uint8_t e : a.is_eval) n_eval += e;
    CHECK(n_eval == 8 * 10);

    double lo = 1e9, hi = -1e9;
    for (int64_t i = 0; i < a.images.numel(); ++i) {
        lo = std::min(lo, a.images.data()[i]);
        hi = std::max(hi, a.images.data()[i]);
    }
    CHECK(lo >= -1.0);
    CHECK(hi <= 1.0);

    // class-mean images must be separated by more than the pixel noise scale
    std::vector<std::vector<double>> means(8, std::vector<double>(64, 0.0));
    std::vector<int64_t> counts(8, 0);
    for (int64_t i = 0; i < a.images.shape()[0]; ++i) {
        auto c = static_cast<size_t>(a.labels[static_cast<size_t>(i)]);
        counts[c]++;
        for (int64_t p = 0; p < 64; ++p) means[c][static_cast<size_t>(p)] += a.images.data()[i * 64 + p];
    }
    for (size_t c = 0; c < 8; ++c)
        for (auto& v : means[c]) v /= static_cast<double>(counts[c]);
    double min_dist = 1e9;
    for (size_t c1 = 0; c1 < 8; ++c1)
        for (size_t c2 = c1 + 1; c2 < 8; ++c2) {
            double d2 = 0.0;
            for (size_t p = 0; p < 64; ++p) {
                double d = means[c1][p] - means[c2][p];
                d2 += d * d;
            }
            min_dist = std::min(min_dist, std::sqrt(d2));
        }
    CHECK(min_dist > 0.3);  // noise scale is 0.1 per pixel
}

TEST_CASE("linear probe on raw pixels separates toy classes") {
    Corpus corpus = make_toy_corpus(8, 120, 8, 21, 50);
    int64_t n_train = 0, n_hold = 0;
    for (uint8_t e : corpus.is_eval) (e ? n_hold : n_train)++;

    Tensor xs({n_train, 64}), xh({n_hold, 64});
    Tensor yt({n_train, 8});
    std::vector<int64_t> hold_labels;
    int64_t it = 0, ih = 0;
    for (int64_t i = 0; i < corpus.images.shape()[0]; ++i) {
        const double* px = corpus.images.data() + i * 64;
        if (corpus.is_eval[static_cast<size_t>(i)]) {
            std::copy(px, px + 64, xh.data() + ih * 64);
            hold_labels.push_back(corpus.labels[static_cast<size_t>(i)]);
            ++ih;
        } else {
            std::copy(px, px + 64, xs.data() + it * 64);
            yt.data()[it * 8 + corpus.labels[static_cast<size_t>(i)]] = 1.0;
            ++it;
        }
    }

    graph::Param w("probe.w", Tensor({64, 8}));
    graph::Param b("probe.b", Tensor({8}));
    Adam opt(AdamConfig{0.05, 0.9, 0.999, 1e-8});
    for (int step = 0; step < 250; ++step) {
        graph::Tape t;
        graph::Var x = t.constant(xs);
        graph::Var logits = t.bias_add(t.matmul(x, t.param(w)), t.param(b));
        graph::Var probs = t.softmax_rows(logits);
        graph::Var loss = build::cross_entropy_mean(t, probs, yt);
        w.zero_grad();
        b.zero_grad();
        t.backward(loss);
        opt.step({&w, &b});
    }

    Tensor logits({n_hold, 8});
    kernels::ref::matmul_nn(xh.data(), w.value.data(), logits.data(), n_hold, 8, 64, false);
    int64_t correct = 0;
    for (int64_t i = 0; i < n_hold; ++i) {
        int64_t best = 0;
        for (int64_t c = 1; c < 8; ++c)
            if (logits.data()[i * 8 + c] + b.value.data()[c] >
                logits.data()[i * 8 + best] + b.value.data()[best])
                best = c;
        if (best == hold_labels[static_cast<size_t>(i)]) ++correct;
    }
    double acc = static_cast<double>(correct) / static_cast<double>(n_hold);
    CAPTURE(acc);
    CHECK(acc > 0.9);
}

TEST_CASE("manifest save/load round-trips and hashes deterministically") {
    auto dir = std::filesystem::temp_directory_path() / "ossgan_ds_test";
    std::filesystem::remove_all(dir);
    Corpus corpus = make_toy_corpus(10, 20, 4, 17, 4);
    SplitConfig cfg{6, 0.5, 0.75, 31};
    OpenSetDataset ds = build_splits(corpus, cfg);

    std::string h1 = ds.save(dir.string());
    std::string h2 = ds.save(dir.string());
    CHECK(h1 == h2);

    OpenSetDataset back = OpenSetDataset::load((dir / "manifest.json").string());
    CHECK(back.config().n_closed_classes == 6);
    CHECK(back.config().seed == 31);
    CHECK(back.closed_class_ids() == ds.closed_class_ids());
    CHECK(back.labeled_source_indices() == ds.labeled_source_indices());
    CHECK(back.unlabeled_source_indices() == ds.unlabeled_source_indices());
    CHECK(back.eval_source_indices() == ds.eval_source_indices());
    CHECK(back.labeled_classes() == ds.labeled_classes());
    CHECK(back.eval_classes() == ds.eval_classes());
    CHECK(std::memcmp(back.unlabeled_images().data(), ds.unlabeled_images().data(),
                      sizeof(double) * static_cast<size_t>(ds.unlabeled_images().numel())) == 0);
    auto sa = ds.summarize(), sb = back.summarize();
    CHECK(sa.n_labeled == sb.n_labeled);
    CHECK(sa.n_unlabeled_closed == sb.n_unlabeled_closed);
    CHECK(sa.n_unlabeled_open == sb.n_unlabeled_open);
    CHECK(sa.labeled_per_class == sb.labeled_per_class);

    SUBCASE("corrupted payload is rejected") {
        auto payload = dir / "payload.bin";
        auto bytes = io::read_text(payload.string());
        bytes[bytes.size() / 2] ^= char(0x5a);
        io::write_text(payload.string(), bytes);
        CHECK_THROWS_AS(OpenSetDataset::load((dir / "manifest.json").string()), DataError);
    }
    SUBCASE("missing manifest is a data error") {
        CHECK_THROWS_AS(OpenSetDataset::load((dir / "nope.json").string()), DataError);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("degenerate configs: fully labeled, no open usage") {
    Corpus corpus = make_toy_corpus(6, 10, 4, 2);
    SplitConfig cfg{4, 1.0, 0.0, 9};
    OpenSetDataset ds = build_splits(corpus, cfg);
    auto s = ds.summarize();
    CHECK(s.n_labeled == 40);
    CHECK(s.n_unlabeled_closed == 0);
    CHECK(s.n_unlabeled_open == 0);
    CHECK(ds.n_unlabeled() == 0);
    CHECK(ds.unlabeled_images().shape()[0] == 0);

    auto dir = std::filesystem::temp_directory_path() / "ossgan_ds_empty";
    std::filesystem::remove_all(dir);
    ds.save(dir.string());
    OpenSetDataset back = OpenSetDataset::load((dir / "manifest.json").string());
    CHECK(back.n_unlabeled() == 0);
    std::filesystem::remove_all(dir);
}

TEST_CASE("config and corpus validation") {
    Corpus corpus = make_toy_corpus(5, 4, 4, 1);
    CHECK_THROWS_AS(build_splits(corpus, SplitConfig{0, 0.5, 1.0, 1}), ValidationError);
    CHECK_THROWS_AS(build_splits(corpus, SplitConfig{6, 0.5, 1.0, 1}), ValidationError);
    CHECK_THROWS_AS(build_splits(corpus, SplitConfig{3, 0.0, 1.0, 1}), ValidationError);
    CHECK_THROWS_AS(build_splits(corpus, SplitConfig{3, 1.5, 1.0, 1}), ValidationError);
    CHECK_THROWS_AS(build_splits(corpus, SplitConfig{3, 0.5, -0.1, 1}), ValidationError);
    CHECK_THROWS_AS(build_splits(corpus, SplitConfig{3, 0.5, 1.1, 1}), ValidationError);

    // a closed class with no training samples is rejected
    Corpus bad;
    bad.images = Tensor({4, 1, 2, 2});
    bad.labels = {0, 0, 2, 2};
    bad.n_classes = 3;
    bad.is_eval = {0, 0, 0, 0};
    CHECK_THROWS_AS(build_splits(bad, SplitConfig{3, 0.5, 1.0, 1}), ValidationError);

    CHECK_THROWS_AS(make_toy_corpus(0, 10, 4, 1), ValidationError);
    CHECK_THROWS_AS(make_toy_corpus(5, 0, 4, 1), ValidationError);
    CHECK_THROWS_AS(make_toy_corpus(5, 10, 1, 1), ValidationError);
}
