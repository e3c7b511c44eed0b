#include "ossgan/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <numeric>

#include <json.hpp>

#include "ossgan/errors.hpp"
#include "ossgan/rng.hpp"
#include "ossgan/serialize.hpp"

namespace ossgan {

using nlohmann::json;

void SplitConfig::validate(int64_t total_classes) const {
    if (n_closed_classes < 1 || n_closed_classes > total_classes)
        throw ValidationError("n_closed_classes must be in [1, total_classes]");
    if (!(labeled_ratio > 0.0 && labeled_ratio <= 1.0))
        throw ValidationError("labeled_ratio must be in (0, 1]");
    if (!(open_usage_ratio >= 0.0 && open_usage_ratio <= 1.0))
        throw ValidationError("open_usage_ratio must be in [0, 1]");
}

void Corpus::validate() const {
    if (images.shape().size() != 4) throw ValidationError("corpus images must be [n,c,h,w]");
    int64_t n = images.shape()[0];
    if (n_classes < 1) throw ValidationError("corpus needs at least one class");
    if (static_cast<int64_t>(labels.size()) != n || static_cast<int64_t>(is_eval.size()) != n)
        throw ValidationError("corpus labels/is_eval size mismatch");
    for (int64_t l : labels)
        if (l < 0 || l >= n_classes) throw ValidationError("corpus label out of range");
}

Corpus make_toy_corpus(int64_t n_classes, int64_t per_class_train, int64_t side,
                       uint64_t seed, int64_t per_class_eval) {
    if (n_classes < 1 || per_class_train < 1 || per_class_eval < 0 || side < 2)
        throw ValidationError("bad toy corpus parameters");
    int64_t per_class = per_class_train + per_class_eval;
    int64_t n = n_classes * per_class;
    Corpus corpus;
    corpus.images = Tensor({n, 1, side, side});
    corpus.labels.resize(static_cast<size_t>(n));
    corpus.is_eval.resize(static_cast<size_t>(n));
    corpus.n_classes = n_classes;

    Rng rng(seed);
    // class means placed by golden-angle phyllotaxis so they stay distinct
    // for any class count, with mildly varying blob widths
    constexpr double kGoldenAngle = 2.39996322972865332;
    const double mid = 0.5 * static_cast<double>(side - 1);
    double* img = corpus.images.data();
    int64_t px_per = side * side;
    int64_t sample = 0;
    for (int64_t c = 0; c < n_classes; ++c) {
        double theta = kGoldenAngle * static_cast<double>(c);
        double rad = 0.42 * mid * 2.0 *
                     std::sqrt((static_cast<double>(c) + 0.5) / static_cast<double>(n_classes));
        double cx = mid + rad * std::cos(theta);
        double cy = mid + rad * std::sin(theta);
        double sigma = static_cast<double>(side) * (0.14 + 0.05 * static_cast<double>(c % 3));
        for (int64_t i = 0; i < per_class; ++i, ++sample) {
            double jx = cx + 0.25 * rng.normal();
            double jy = cy + 0.25 * rng.normal();
            double amp = 0.8 + 0.15 * rng.uniform();
            double* p = img + sample * px_per;
            for (int64_t y = 0; y < side; ++y)
                for (int64_t x = 0; x < side; ++x) {
                    double dx = static_cast<double>(x) - jx;
                    double dy = static_cast<double>(y) - jy;
                    double v = amp * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
                    v = 2.0 * v - 1.0 + 0.1 * rng.normal();
                    p[y * side + x] = std::clamp(v, -1.0, 1.0);
                }
            corpus.labels[static_cast<size_t>(sample)] = c;
            corpus.is_eval[static_cast<size_t>(sample)] = i >= per_class_train ? 1 : 0;
        }
    }
    return corpus;
}

namespace {

Tensor gather_images(const Tensor& images, const std::vector<int64_t>& idx) {
    const auto& s = images.shape();
    int64_t stride = s[1] * s[2] * s[3];
    Tensor out({static_cast<int64_t>(idx.size()), s[1], s[2], s[3]});
    for (size_t k = 0; k < idx.size(); ++k)
        std::memcpy(out.data() + static_cast<int64_t>(k) * stride,
                    images.data() + idx[k] * stride,
                    sizeof(double) * static_cast<size_t>(stride));
    return out;
}

}  // namespace

OpenSetDataset build_splits(const Corpus& corpus, const SplitConfig& cfg) {
    corpus.validate();
    cfg.validate(corpus.n_classes);
    Rng rng(cfg.seed);

    std::vector<int64_t> class_order(static_cast<size_t>(corpus.n_classes));
    std::iota(class_order.begin(), class_order.end(), 0);
    rng.shuffle(class_order);
    std::vector<int64_t> closed(class_order.begin(),
                                class_order.begin() + cfg.n_closed_classes);
    std::vector<char> is_closed(static_cast<size_t>(corpus.n_classes), 0);
    for (int64_t c : closed) is_closed[static_cast<size_t>(c)] = 1;
    std::vector<int64_t> remap(static_cast<size_t>(corpus.n_classes), -1);
    for (size_t i = 0; i < closed.size(); ++i) remap[static_cast<size_t>(closed[i])] =
        static_cast<int64_t>(i);

    std::vector<std::vector<int64_t>> by_class(static_cast<size_t>(corpus.n_classes));
    int64_t n = corpus.images.shape()[0];
    for (int64_t i = 0; i < n; ++i)
        if (!corpus.is_eval[static_cast<size_t>(i)])
            by_class[static_cast<size_t>(corpus.labels[static_cast<size_t>(i)])].push_back(i);

    OpenSetDataset ds;
    ds.config_ = cfg;
    ds.closed_class_ids_ = closed;

    std::vector<int64_t> unl_src;
    std::vector<uint8_t> unl_open;
    for (int64_t c : closed) {
        auto idx = by_class[static_cast<size_t>(c)];
        if (idx.empty()) throw ValidationError("closed class has no training samples");
        rng.shuffle(idx);
        auto n_lab = static_cast<int64_t>(
            std::floor(cfg.labeled_ratio * static_cast<double>(idx.size())));
        for (int64_t i = 0; i < n_lab; ++i) {
            ds.labeled_source_.push_back(idx[static_cast<size_t>(i)]);
            ds.labeled_classes_.push_back(remap[static_cast<size_t>(c)]);
        }
        for (size_t i = static_cast<size_t>(n_lab); i < idx.size(); ++i) {
            unl_src.push_back(idx[i]);
            unl_open.push_back(0);
        }
    }

    std::vector<int64_t> open_pool;
    for (int64_t c = 0; c < corpus.n_classes; ++c)
        if (!is_closed[static_cast<size_t>(c)])
            open_pool.insert(open_pool.end(), by_class[static_cast<size_t>(c)].begin(),
                             by_class[static_cast<size_t>(c)].end());
    rng.shuffle(open_pool);
    auto n_open_used = static_cast<int64_t>(
        std::floor(cfg.open_usage_ratio * static_cast<double>(open_pool.size())));
    for (int64_t i = 0; i < n_open_used; ++i) {
        unl_src.push_back(open_pool[static_cast<size_t>(i)]);
        unl_open.push_back(1);
    }

    std::vector<int64_t> perm(unl_src.size());
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    ds.unlabeled_source_.resize(unl_src.size());
    ds.unlabeled_open_.resize(unl_src.size());
    for (size_t i = 0; i < perm.size(); ++i) {
        ds.unlabeled_source_[i] = unl_src[static_cast<size_t>(perm[i])];
        ds.unlabeled_open_[i] = unl_open[static_cast<size_t>(perm[i])];
    }

    for (int64_t i = 0; i < n; ++i) {
        auto c = corpus.labels[static_cast<size_t>(i)];
        if (corpus.is_eval[static_cast<size_t>(i)] && is_closed[static_cast<size_t>(c)]) {
            ds.eval_source_.push_back(i);
            ds.eval_classes_.push_back(remap[static_cast<size_t>(c)]);
        }
    }

    ds.labeled_images_ = gather_images(corpus.images, ds.labeled_source_);
    ds.unlabeled_images_ = gather_images(corpus.images, ds.unlabeled_source_);
    ds.eval_images_ = gather_images(corpus.images, ds.eval_source_);
    return ds;
}

SplitSummary OpenSetDataset::summarize() const {
    SplitSummary s;
    s.n_labeled = n_labeled();
    for (uint8_t tag : unlabeled_open_) (tag ? s.n_unlabeled_open : s.n_unlabeled_closed)++;
    s.labeled_per_class.assign(static_cast<size_t>(k()), 0);
    for (int64_t c : labeled_classes_) s.labeled_per_class[static_cast<size_t>(c)]++;
    return s;
}

std::string OpenSetDataset::save(const std::string& dir) const {
    std::filesystem::create_directories(dir);
    std::string payload_path = dir + "/payload.bin";

    Tensor labeled_cls({n_labeled()});
    for (int64_t i = 0; i < n_labeled(); ++i)
        labeled_cls.data()[i] = static_cast<double>(labeled_classes_[static_cast<size_t>(i)]);
    Tensor unl_open({n_unlabeled()});
    for (int64_t i = 0; i < n_unlabeled(); ++i)
        unl_open.data()[i] = static_cast<double>(unlabeled_open_[static_cast<size_t>(i)]);
    Tensor eval_cls({n_eval()});
    for (int64_t i = 0; i < n_eval(); ++i)
        eval_cls.data()[i] = static_cast<double>(eval_classes_[static_cast<size_t>(i)]);

    io::save_archive(payload_path, {{"labeled_images", &labeled_images_},
                                    {"labeled_classes", &labeled_cls},
                                    {"unlabeled_images", &unlabeled_images_},
                                    {"unlabeled_open", &unl_open},
                                    {"eval_images", &eval_images_},
                                    {"eval_classes", &eval_cls}});

    auto summary = summarize();
    json j;
    j["config"] = {{"n_closed_classes", config_.n_closed_classes},
                   {"labeled_ratio", config_.labeled_ratio},
                   {"open_usage_ratio", config_.open_usage_ratio},
                   {"seed", config_.seed}};
    j["counts"] = {{"n_labeled", summary.n_labeled},
                   {"n_unlabeled_closed", summary.n_unlabeled_closed},
                   {"n_unlabeled_open", summary.n_unlabeled_open},
                   {"labeled_per_class", summary.labeled_per_class}};
    j["image"] = {{"channels", channels()}, {"side", side()}};
    j["closed_class_ids"] = closed_class_ids_;
    j["splits"] = {{"labeled", labeled_source_},
                   {"unlabeled", unlabeled_source_},
                   {"eval", eval_source_}};
    j["payload"] = "payload.bin";
    j["payload_hash"] = io::hash_hex(io::file_fnv1a(payload_path));

    std::string text = j.dump(2) + "\n";
    io::write_text(dir + "/manifest.json", text);
    return io::hash_hex(io::fnv1a(text));
}

OpenSetDataset OpenSetDataset::load(const std::string& manifest_path) {
    json j;
    try {
        j = json::parse(io::read_text(manifest_path));
    } catch (const json::exception& e) {
        throw DataError("bad manifest " + manifest_path + ": " + e.what());
    }
    OpenSetDataset ds;
    try {
        ds.config_.n_closed_classes = j.at("config").at("n_closed_classes").get<int64_t>();
        ds.config_.labeled_ratio = j.at("config").at("labeled_ratio").get<double>();
        ds.config_.open_usage_ratio = j.at("config").at("open_usage_ratio").get<double>();
        ds.config_.seed = j.at("config").at("seed").get<uint64_t>();
        ds.closed_class_ids_ = j.at("closed_class_ids").get<std::vector<int64_t>>();
        ds.labeled_source_ = j.at("splits").at("labeled").get<std::vector<int64_t>>();
        ds.unlabeled_source_ = j.at("splits").at("unlabeled").get<std::vector<int64_t>>();
        ds.eval_source_ = j.at("splits").at("eval").get<std::vector<int64_t>>();

        auto dir = std::filesystem::path(manifest_path).parent_path();
        auto payload_path = (dir / j.at("payload").get<std::string>()).string();
        auto expect_hash = j.at("payload_hash").get<std::string>();
        if (io::hash_hex(io::file_fnv1a(payload_path)) != expect_hash)
            throw DataError("payload hash mismatch for " + payload_path);

        auto archive = io::load_archive(payload_path);
        auto take = [&](const char* name) -> Tensor {
            auto it = archive.find(name);
            if (it == archive.end())
                throw DataError(std::string("payload missing tensor ") + name);
            return std::move(it->second);
        };
        ds.labeled_images_ = take("labeled_images");
        ds.unlabeled_images_ = take("unlabeled_images");
        ds.eval_images_ = take("eval_images");
        Tensor labeled_cls = take("labeled_classes");
        Tensor unl_open = take("unlabeled_open");
        Tensor eval_cls = take("eval_classes");
        for (int64_t i = 0; i < labeled_cls.numel(); ++i)
            ds.labeled_classes_.push_back(static_cast<int64_t>(labeled_cls.data()[i]));
        for (int64_t i = 0; i < unl_open.numel(); ++i)
            ds.unlabeled_open_.push_back(unl_open.data()[i] != 0.0 ? 1 : 0);
        for (int64_t i = 0; i < eval_cls.numel(); ++i)
            ds.eval_classes_.push_back(static_cast<int64_t>(eval_cls.data()[i]));
    } catch (const json::exception& e) {
        throw DataError("bad manifest " + manifest_path + ": " + e.what());
    }

    if (ds.labeled_images_.shape()[0] != static_cast<int64_t>(ds.labeled_classes_.size()) ||
        ds.labeled_images_.shape()[0] != static_cast<int64_t>(ds.labeled_source_.size()) ||
        ds.unlabeled_images_.shape()[0] != static_cast<int64_t>(ds.unlabeled_source_.size()) ||
        ds.unlabeled_images_.shape()[0] != static_cast<int64_t>(ds.unlabeled_open_.size()) ||
        ds.eval_images_.shape()[0] != static_cast<int64_t>(ds.eval_source_.size()) ||
        ds.eval_images_.shape()[0] != static_cast<int64_t>(ds.eval_classes_.size()))
        throw DataError("manifest/payload count mismatch: " + manifest_path);
    return ds;
}

}  // namespace ossgan
