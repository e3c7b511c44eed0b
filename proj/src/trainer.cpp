#include "ossgan/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "ossgan/errors.hpp"
#include "ossgan/image.hpp"
#include "ossgan/serialize.hpp"

namespace ossgan {

using nlohmann::json;

void MethodSpec::validate() const {
    if (std::find(method_names().begin(), method_names().end(), name) == method_names().end())
        throw ValidationError("unknown method: " + name);
    if (uses_threshold() && !threshold.has_value())
        throw ValidationError(name + " requires a threshold");
    if (!uses_threshold() && threshold.has_value())
        throw ValidationError(name + " does not take a threshold");
    if (threshold.has_value()) (void)Threshold{*threshold};
    if (lambda < 0.0) throw ValidationError("lambda must be nonnegative");
}

void TrainConfig::validate() const {
    if (total_iters < 1) throw ValidationError("total_iters must be at least 1");
    if (batch_labeled < 1 || batch_unlabeled < 1 || batch_fake < 1)
        throw ValidationError("batch sizes must be positive");
    if (lr_g <= 0.0 || lr_d <= 0.0) throw ValidationError("learning rates must be positive");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
        throw ValidationError("Adam betas must lie in [0, 1)");
    if (eval_every < 0) throw ValidationError("eval_every must be nonnegative");
    if (eval_samples < 1) throw ValidationError("eval_samples must be positive");
}

AugmentDraw draw_augment(Rng& rng, int64_t n, int64_t side) {
    AugmentDraw d;
    d.side = side;
    d.cut_size = std::max<int64_t>(1, side / 4);
    int64_t max_shift = std::max<int64_t>(1, side / 8);
    for (int64_t i = 0; i < n; ++i) {
        d.contrast.push_back(rng.uniform(0.75, 1.25));
        d.brightness.push_back(rng.uniform(-0.25, 0.25));
        d.dy.push_back(static_cast<int>(rng.below(static_cast<uint64_t>(2 * max_shift + 1))) -
                       static_cast<int>(max_shift));
        d.dx.push_back(static_cast<int>(rng.below(static_cast<uint64_t>(2 * max_shift + 1))) -
                       static_cast<int>(max_shift));
        d.cut_y.push_back(static_cast<int64_t>(
            rng.below(static_cast<uint64_t>(side - d.cut_size + 1))));
        d.cut_x.push_back(static_cast<int64_t>(
            rng.below(static_cast<uint64_t>(side - d.cut_size + 1))));
    }
    return d;
}

graph::Var apply_augment(graph::Tape& t, graph::Var x, const AugmentDraw& d) {
    const auto& shape = x.value().shape();
    if (shape.size() != 4) throw ValidationError("augment wants [n,c,h,w]");
    int64_t n = shape[0], c = shape[1], s = shape[2];
    if (static_cast<int64_t>(d.contrast.size()) != n)
        throw ValidationError("augment draw size mismatch");

    Tensor scale_t(shape), shift_t(shape), mask_t(shape);
    mask_t.fill(1.0);
    int64_t plane = c * s * s;
    for (int64_t i = 0; i < n; ++i) {
        for (int64_t p = 0; p < plane; ++p) {
            scale_t.data()[i * plane + p] = d.contrast[static_cast<size_t>(i)];
            shift_t.data()[i * plane + p] = d.brightness[static_cast<size_t>(i)];
        }
        for (int64_t ch = 0; ch < c; ++ch)
            for (int64_t y = 0; y < d.cut_size; ++y)
                for (int64_t xx = 0; xx < d.cut_size; ++xx)
                    mask_t.data()[i * plane + ch * s * s +
                                  (d.cut_y[static_cast<size_t>(i)] + y) * s +
                                  d.cut_x[static_cast<size_t>(i)] + xx] = 0.0;
    }
    graph::Var out = t.add(t.mul(x, t.constant(std::move(scale_t))),
                           t.constant(std::move(shift_t)));
    out = t.shift2d(out, d.dy, d.dx);
    return t.mul(out, t.constant(std::move(mask_t)));
}

Tensor augment_batch(const Tensor& x, Rng& rng, bool enabled) {
    if (!enabled) return x;
    graph::Tape t;
    AugmentDraw d = draw_augment(rng, x.shape()[0], x.shape()[2]);
    return apply_augment(t, t.constant(x), d).value();
}

namespace {

Tensor pad_cols(const Tensor& y, int64_t extra) {
    int64_t n = y.shape()[0], k = y.shape()[1];
    Tensor out({n, k + extra});
    for (int64_t i = 0; i < n; ++i)
        std::memcpy(out.data() + i * (k + extra), y.data() + i * k,
                    sizeof(double) * static_cast<size_t>(k));
    return out;
}

Tensor uniform_rows(int64_t n, int64_t k) {
    Tensor out({n, k});
    out.fill(1.0 / static_cast<double>(k));
    return out;
}

graph::Var zero_scalar(graph::Tape& t) { return t.constant(Tensor::zeros({1})); }

struct ForwardedBatch {
    graph::Var images;
    graph::Var features;
};

ForwardedBatch run_backbone(graph::Tape& t, StepContext& ctx, Tensor images) {
    graph::Var x = t.constant(std::move(images));
    if (ctx.augment) {
        AugmentDraw d = draw_augment(*ctx.rng, x.value().shape()[0], x.value().shape()[2]);
        x = apply_augment(t, x, d);
    }
    return {x, ctx.bundle->extractor().forward(t, x)};
}

std::string batch_stats(const char* tag, const Tensor& x) {
    std::ostringstream ss;
    if (x.numel() == 0) {
        ss << tag << ": empty";
        return ss.str();
    }
    double lo = x.data()[0], hi = x.data()[0], sum = 0.0;
    int64_t n_bad = 0;
    for (int64_t i = 0; i < x.numel(); ++i) {
        double v = x.data()[i];
        if (!std::isfinite(v)) {
            ++n_bad;
            continue;
        }
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
    }
    ss << tag << ": n=" << x.shape()[0] << " min=" << lo << " max=" << hi
       << " mean=" << sum / static_cast<double>(x.numel()) << " nonfinite=" << n_bad;
    return ss.str();
}

}  // namespace

LossTerms d_step(StepContext& ctx, const Tensor& x_lbl, const std::vector<int64_t>& classes,
                 const Tensor& x_unlbl, const PriorSampler::Batch& prior) {
    ModelBundle& b = *ctx.bundle;
    const MethodSpec& m = *ctx.method;
    const ModelConfig& mc = b.config();
    bool extended = mc.extended_condition;
    int64_t n_lbl = x_lbl.shape()[0];
    int64_t n_unlbl = x_unlbl.shape()[0];
    int64_t n_fake = prior.z.shape()[0];
    if (n_lbl < 1 || static_cast<int64_t>(classes.size()) != n_lbl)
        throw ValidationError("d_step needs a labeled batch with matching classes");
    if (n_fake < 1) throw ValidationError("d_step needs a prior batch");
    if (m.name != "supervised" && n_unlbl < 1)
        throw ValidationError(m.name + " needs an unlabeled batch");
    ctx.reject_kept = -1;

    graph::Tape t;

    ForwardedBatch lbl = run_backbone(t, ctx, x_lbl);
    Tensor y_lbl = one_hot_rows(classes, mc.k);
    graph::Var s_lbl = b.projection().score(
        t, lbl.features, t.constant(extended ? pad_cols(y_lbl, 1) : y_lbl));

    // generator output enters the discriminator step as data
    Tensor fake_images = b.generator().generate_nograd(prior.z, prior.y);
    ForwardedBatch fake = run_backbone(t, ctx, std::move(fake_images));
    graph::Var s_fake = b.projection().score(
        t, fake.features, t.constant(extended ? pad_cols(prior.y, 1) : prior.y));

    graph::Var adv_lbl = t.add(build::mean_hinge_neg(t, s_lbl), build::mean_hinge_pos(t, s_fake));

    graph::Var adv_unlbl = zero_scalar(t);
    if (m.name == "randomgan" || m.name == "singlegan") {
        ForwardedBatch unl = run_backbone(t, ctx, x_unlbl);
        Tensor y_u;
        if (m.name == "randomgan") {
            std::vector<int64_t> picks;
            picks.reserve(static_cast<size_t>(n_unlbl));
            for (int64_t i = 0; i < n_unlbl; ++i)
                picks.push_back(static_cast<int64_t>(
                    ctx.rng->below(static_cast<uint64_t>(mc.k))));
            y_u = one_hot_rows(picks, mc.k);
        } else {
            y_u = uniform_rows(n_unlbl, mc.k);
        }
        graph::Var s_u = b.projection().score(t, unl.features, t.constant(y_u));
        adv_unlbl = build::mean_hinge_neg(t, s_u);
    } else if (m.name == "rejectgan") {
        // confidence decision on the raw view, no gradient
        Tensor probs = b.classify_nograd(x_unlbl);
        Threshold c(*m.threshold);
        std::vector<double> mask(static_cast<size_t>(n_unlbl), 0.0);
        std::vector<int64_t> pseudo(static_cast<size_t>(n_unlbl), 0);
        int64_t kept = 0;
        for (int64_t i = 0; i < n_unlbl; ++i) {
            const double* row = probs.data() + i * mc.k;
            const double* best = std::max_element(row, row + mc.k);
            pseudo[static_cast<size_t>(i)] = best - row;
            if (*best >= c.c) {
                mask[static_cast<size_t>(i)] = 1.0;
                ++kept;
            }
        }
        ctx.reject_kept = kept;
        if (kept > 0) {
            ForwardedBatch unl = run_backbone(t, ctx, x_unlbl);
            graph::Var s_u = b.projection().score(t, unl.features,
                                                  t.constant(one_hot_rows(pseudo, mc.k)));
            adv_unlbl = t.masked_mean(t.hinge(t.neg(s_u)), mask, kept);
        }
    } else if (m.name == "opensetgan") {
        Tensor probs = b.classify_nograd(x_unlbl);
        Threshold c(*m.threshold);
        Tensor y_ext({n_unlbl, mc.k + 1});
        std::vector<double> row(static_cast<size_t>(mc.k));
        for (int64_t i = 0; i < n_unlbl; ++i) {
            std::copy(probs.data() + i * mc.k, probs.data() + (i + 1) * mc.k, row.begin());
            ExtendedLabel lab = threshold_label_extended(ProbVector(row), c);
            std::copy(lab.values().begin(), lab.values().end(),
                      y_ext.data() + i * (mc.k + 1));
        }
        ForwardedBatch unl = run_backbone(t, ctx, x_unlbl);
        graph::Var s_u = b.projection().score(t, unl.features, t.constant(std::move(y_ext)));
        adv_unlbl = build::mean_hinge_neg(t, s_u);
    } else if (m.name == "ossgan") {
        // soft condition from the shared features, gradient flows through
        // the classifier unless detached
        ForwardedBatch unl = run_backbone(t, ctx, x_unlbl);
        graph::Var p_u = b.classifier().probs(t, unl.features);
        graph::Var cond = m.detach_condition ? t.stop_gradient(p_u) : p_u;
        graph::Var s_u = b.projection().score(t, unl.features, cond);
        adv_unlbl = build::mean_hinge_neg(t, s_u);
    }

    graph::Var cls = zero_scalar(t);
    if (m.name == "ossgan") {
        graph::Var p_lbl = b.classifier().probs(t, lbl.features);
        cls = build::ossgan_cls_group(t, p_lbl, y_lbl, m.flags.use_entropy_reg);
        if (m.flags.use_fake_cls) {
            graph::Var p_fake = b.classifier().probs(t, fake.features);
            graph::Var fake_group =
                build::ossgan_cls_group(t, p_fake, one_hot_rows(prior.classes, mc.k),
                                        m.flags.use_entropy_reg);
            double balance = static_cast<double>(n_lbl) / static_cast<double>(n_fake);
            cls = t.add(cls, t.scale(fake_group, balance));
        }
    } else if (m.name == "rejectgan" || m.name == "opensetgan") {
        graph::Var p_lbl = b.classifier().probs(t, lbl.features);
        cls = build::cross_entropy_mean(t, p_lbl, y_lbl);
    }

    graph::Var total = t.add(t.add(adv_lbl, adv_unlbl), t.scale(cls, m.lambda));
    for (auto* p : b.all_params()) p->zero_grad();
    t.backward(total);
    ctx.opt_d->step(b.discriminator_params());

    LossTerms lt;
    lt.adv_lbl = adv_lbl.value().data()[0];
    lt.adv_unlbl = adv_unlbl.value().data()[0];
    lt.cls = cls.value().data()[0];
    lt.lambda = m.lambda;
    lt.total_d = total.value().data()[0];
    return lt;
}

double g_step(StepContext& ctx, const PriorSampler::Batch& prior) {
    ModelBundle& b = *ctx.bundle;
    const ModelConfig& mc = b.config();
    if (prior.z.shape()[0] < 1) throw ValidationError("g_step needs a prior batch");

    graph::Tape t;
    graph::Var x = b.generator().forward(t, t.constant(prior.z), t.constant(prior.y));
    if (ctx.augment) {
        AugmentDraw d = draw_augment(*ctx.rng, prior.z.shape()[0], mc.image_side);
        x = apply_augment(t, x, d);
    }
    graph::Var feat = b.extractor().forward(t, x);
    Tensor y_cond = mc.extended_condition ? pad_cols(prior.y, 1) : prior.y;
    graph::Var score = b.projection().score(t, feat, t.constant(std::move(y_cond)));
    graph::Var loss = build::mean_neg(t, score);

    for (auto* p : b.all_params()) p->zero_grad();
    t.backward(loss);
    ctx.opt_g->step(b.generator_params());
    return loss.value().data()[0];
}

uint64_t params_checksum(const std::vector<graph::Param*>& params) {
    uint64_t h = 1469598103934665603ull;
    for (const graph::Param* p : params) {
        uint64_t hp = io::fnv1a(p->value.data(),
                                sizeof(double) * static_cast<size_t>(p->value.numel()));
        h = (h ^ hp) * 1099511628211ull;
    }
    return h;
}

void save_checkpoint(const std::string& prefix, ModelBundle& bundle, const MethodSpec& method,
                     int64_t iteration, uint64_t seed) {
    std::vector<std::pair<std::string, const Tensor*>> entries;
    for (graph::Param* p : bundle.all_params()) entries.emplace_back(p->name, &p->value);
    io::save_archive(prefix + ".bin", entries);

    const ModelConfig& mc = bundle.config();
    json j;
    j["iteration"] = iteration;
    j["seed"] = seed;
    j["method"] = {{"name", method.name},
                   {"lambda", method.lambda},
                   {"use_entropy_reg", method.flags.use_entropy_reg},
                   {"use_fake_cls", method.flags.use_fake_cls},
                   {"detach_condition", method.detach_condition}};
    if (method.threshold.has_value()) j["method"]["threshold"] = *method.threshold;
    j["model"] = {{"k", mc.k},
                  {"latent_dim", mc.latent_dim},
                  {"embed_dim", mc.embed_dim},
                  {"feature_dim", mc.feature_dim},
                  {"image_side", mc.image_side},
                  {"channels", mc.channels},
                  {"extended_condition", mc.extended_condition}};
    io::write_text(prefix + ".json", j.dump(2) + "\n");
}

ModelBundle load_checkpoint(const std::string& bin_path, MethodSpec* method_out,
                            int64_t* iteration_out) {
    if (bin_path.size() < 4 || bin_path.substr(bin_path.size() - 4) != ".bin")
        throw DataError("checkpoint path must end in .bin: " + bin_path);
    std::string sidecar = bin_path.substr(0, bin_path.size() - 4) + ".json";

    json j;
    try {
        j = json::parse(io::read_text(sidecar));
    } catch (const json::exception& e) {
        throw DataError("bad checkpoint sidecar " + sidecar + ": " + e.what());
    }
    ModelConfig mc;
    MethodSpec method;
    int64_t iteration = 0;
    try {
        const json& jm = j.at("model");
        mc.k = jm.at("k").get<int64_t>();
        mc.latent_dim = jm.at("latent_dim").get<int64_t>();
        mc.embed_dim = jm.at("embed_dim").get<int64_t>();
        mc.feature_dim = jm.at("feature_dim").get<int64_t>();
        mc.image_side = jm.at("image_side").get<int64_t>();
        mc.channels = jm.at("channels").get<int64_t>();
        mc.extended_condition = jm.at("extended_condition").get<bool>();
        const json& jme = j.at("method");
        method.name = jme.at("name").get<std::string>();
        method.lambda = jme.at("lambda").get<double>();
        method.flags.use_entropy_reg = jme.at("use_entropy_reg").get<bool>();
        method.flags.use_fake_cls = jme.at("use_fake_cls").get<bool>();
        method.detach_condition = jme.at("detach_condition").get<bool>();
        if (jme.contains("threshold")) method.threshold = jme.at("threshold").get<double>();
        iteration = j.at("iteration").get<int64_t>();
    } catch (const json::exception& e) {
        throw DataError("bad checkpoint sidecar " + sidecar + ": " + e.what());
    }

    ModelBundle bundle(mc, 0);
    auto archive = io::load_archive(bin_path);
    for (graph::Param* p : bundle.all_params()) {
        auto it = archive.find(p->name);
        if (it == archive.end())
            throw DataError("checkpoint missing parameter " + p->name);
        if (it->second.shape() != p->value.shape())
            throw DataError("checkpoint shape mismatch for " + p->name);
        p->value = std::move(it->second);
    }
    if (method_out) *method_out = method;
    if (iteration_out) *iteration_out = iteration;
    return bundle;
}

namespace {

Tensor sample_rows(const Tensor& images, Rng& rng, int64_t n) {
    const auto& s = images.shape();
    int64_t pool = s[0], px = s[1] * s[2] * s[3];
    Tensor out({n, s[1], s[2], s[3]});
    for (int64_t i = 0; i < n; ++i) {
        int64_t src = static_cast<int64_t>(rng.below(static_cast<uint64_t>(pool)));
        std::memcpy(out.data() + i * px, images.data() + src * px,
                    sizeof(double) * static_cast<size_t>(px));
    }
    return out;
}

}  // namespace

TrainResult train(const OpenSetDataset& data, const MethodSpec& method, const TrainConfig& cfg,
                  const std::string& out_dir, const MetricEmbedder* embedder) {
    method.validate();
    cfg.validate();
    if (data.n_labeled() < 1) throw ValidationError("training needs labeled samples");
    if (method.name != "supervised" && data.n_unlabeled() < 1)
        throw ValidationError(method.name + " needs unlabeled samples");

    ModelConfig mc;
    mc.k = data.k();
    mc.image_side = data.side();
    mc.channels = data.channels();
    mc.extended_condition = method.extended_condition();
    mc.validate();

    std::filesystem::create_directories(out_dir);
    ModelBundle bundle(mc, cfg.seed);
    Adam opt_d(AdamConfig{cfg.lr_d, cfg.beta1, cfg.beta2, 1e-8});
    Adam opt_g(AdamConfig{cfg.lr_g, cfg.beta1, cfg.beta2, 1e-8});

    Rng root(cfg.seed);
    Rng lbl_rng = root.split(101);
    Rng unl_rng = root.split(102);
    Rng step_rng = root.split(104);
    PriorSampler prior(mc.latent_dim, mc.k, root.split(103).bits());
    PriorSampler preview_prior(mc.latent_dim, mc.k, root.split(106).bits());
    auto preview = preview_prior.sample(std::min<int64_t>(64, mc.k * 8));

    StepContext ctx{&bundle, &opt_d, &opt_g, &method, cfg.augment, &step_rng};

    TrainResult result;
    result.out_dir = out_dir;
    std::vector<std::vector<double>> loss_rows;
    std::ostringstream metrics_csv;
    metrics_csv << "iter,fid,is,f18,f8,entropy_gap,n_samples,extractor_hash\n";

    const std::vector<int64_t>& lbl_classes = data.labeled_classes();
    bool warned_reject = false;
    for (int64_t iter = 1; iter <= cfg.total_iters; ++iter) {
        Tensor x_lbl({cfg.batch_labeled, mc.channels, mc.image_side, mc.image_side});
        std::vector<int64_t> classes(static_cast<size_t>(cfg.batch_labeled));
        int64_t px = mc.pixels();
        for (int64_t i = 0; i < cfg.batch_labeled; ++i) {
            int64_t src = static_cast<int64_t>(
                lbl_rng.below(static_cast<uint64_t>(data.n_labeled())));
            std::memcpy(x_lbl.data() + i * px, data.labeled_images().data() + src * px,
                        sizeof(double) * static_cast<size_t>(px));
            classes[static_cast<size_t>(i)] = lbl_classes[static_cast<size_t>(src)];
        }
        Tensor x_unlbl = method.name == "supervised"
                             ? Tensor({0, mc.channels, mc.image_side, mc.image_side})
                             : sample_rows(data.unlabeled_images(), unl_rng,
                                           cfg.batch_unlabeled);
        auto prior_d = prior.sample(cfg.batch_fake);

        uint64_t gen_sum = params_checksum(bundle.generator_params());
        LossTerms lt = d_step(ctx, x_lbl, classes, x_unlbl, prior_d);
        if (params_checksum(bundle.generator_params()) != gen_sum)
            throw NumericError("parameter partition violated: d_step mutated the generator");

        auto prior_g = prior.sample(cfg.batch_fake);
        uint64_t disc_sum = params_checksum(bundle.discriminator_params());
        double lg = g_step(ctx, prior_g);
        if (params_checksum(bundle.discriminator_params()) != disc_sum)
            throw NumericError("parameter partition violated: g_step mutated the discriminator");

        if (!std::isfinite(lt.total_d) || !std::isfinite(lg)) {
            std::ostringstream ss;
            ss << "non-finite loss at iteration " << iter << " (total_d=" << lt.total_d
               << ", total_g=" << lg << "); " << batch_stats("labeled", x_lbl) << "; "
               << batch_stats("unlabeled", x_unlbl) << "; " << batch_stats("latent", prior_d.z);
            throw NumericError(ss.str());
        }
        if (!composition_holds(lt))
            throw NumericError("loss composition identity broken at iteration " +
                               std::to_string(iter));
        if (ctx.reject_kept == 0) {
            std::string w = "iteration " + std::to_string(iter) +
                            ": rejectgan filtered out the entire unlabeled batch; "
                            "adv_unlbl contributes 0";
            result.warnings.push_back(w);
            if (!warned_reject) {
                std::cerr << "warning: " << w << "\n";
                warned_reject = true;
            }
        }

        lt.total_g = lg;
        loss_rows.push_back({static_cast<double>(iter), lt.adv_lbl, lt.adv_unlbl, lt.cls,
                             lt.total_d, lg});
        result.final_losses = lt;
        result.final_g_loss = lg;

        bool eval_now = (cfg.eval_every > 0 && iter % cfg.eval_every == 0) ||
                        iter == cfg.total_iters;
        if (!eval_now) continue;

        std::string prefix = out_dir + "/ckpt_" + std::to_string(iter);
        save_checkpoint(prefix, bundle, method, iter, cfg.seed);
        Tensor grid_images = bundle.generator().generate_nograd(preview.z, preview.y);
        img::write_png_gray(out_dir + "/samples_" + std::to_string(iter) + ".png",
                            img::make_grid(grid_images, 8));
        if (embedder) {
            metrics::EvalConfig ec;
            ec.n_samples = cfg.eval_samples;
            ec.seed = splitmix64(cfg.seed ^ 0x5eed5eedull);
            MetricReport r = metrics::compute_metrics(bundle, data, *embedder, ec);
            char buf[256];
            std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%lld,%s\n",
                          static_cast<long long>(iter), r.fid, r.is_score, r.f_small,
                          r.f_large, r.entropy_gap, static_cast<long long>(r.n_samples),
                          r.extractor_hash.c_str());
            metrics_csv << buf;
            result.final_metrics = r;
            result.has_metrics = true;
        }
    }

    io::write_csv(out_dir + "/losses.csv",
                  {"iter", "adv_lbl", "adv_unlbl", "cls", "total_d", "total_g"}, loss_rows);
    io::write_text(out_dir + "/metrics.csv", metrics_csv.str());
    return result;
}

}  // namespace ossgan
