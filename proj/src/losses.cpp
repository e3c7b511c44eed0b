#include "ossgan/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ossgan/errors.hpp"

namespace ossgan {

namespace {
constexpr double kLogEps = 1e-12;

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}
}  // namespace

bool composition_holds(const LossTerms& lt, double tol) {
    const double recomputed = lt.adv_lbl + lt.adv_unlbl + lt.lambda * lt.cls;
    return std::fabs(recomputed - lt.total_d) <= tol;
}

double hinge(double t) { return std::max(0.0, 1.0 + t); }

double adv_labeled(const std::vector<double>& real_scores,
                   const std::vector<double>& fake_scores) {
    if (real_scores.empty() || fake_scores.empty())
        throw ValidationError("adv_labeled: empty score list");
    double real_term = 0.0, fake_term = 0.0;
    for (double r : real_scores) real_term += hinge(-r);
    for (double f : fake_scores) fake_term += hinge(f);
    return real_term / static_cast<double>(real_scores.size()) +
           fake_term / static_cast<double>(fake_scores.size());
}

double generator_loss(const std::vector<double>& fake_scores) {
    if (fake_scores.empty())
        throw ValidationError("generator_loss: empty score list");
    return -mean_of(fake_scores);
}

double adv_labeled_openset(const std::vector<double>& real_scores,
                           const std::vector<double>& fake_scores) {
    return adv_labeled(real_scores, fake_scores);
}

double generator_loss_openset(const std::vector<double>& fake_scores) {
    return generator_loss(fake_scores);
}

double cls_cross_entropy(const std::vector<ProbVector>& probs,
                         const std::vector<ProbVector>& one_hot_labels) {
    if (probs.size() != one_hot_labels.size())
        throw ValidationError("cls_cross_entropy: length mismatch");
    std::vector<int64_t> classes;
    classes.reserve(one_hot_labels.size());
    for (const auto& y : one_hot_labels) {
        if (!y.is_one_hot())
            throw ValidationError("cls_cross_entropy: label is not one-hot");
        classes.push_back(argmax_label(y));
    }
    return cls_cross_entropy(probs, classes);
}

double cls_cross_entropy(const std::vector<ProbVector>& probs,
                         const std::vector<int64_t>& true_classes) {
    if (probs.size() != true_classes.size())
        throw ValidationError("cls_cross_entropy: length mismatch");
    if (probs.empty()) throw ValidationError("cls_cross_entropy: empty batch");
    double s = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
        const int64_t c = true_classes[i];
        if (c < 0 || c >= probs[i].k())
            throw ValidationError("cls_cross_entropy: class out of range");
        s -= std::log(std::max(probs[i][c], kLogEps));
    }
    return s / static_cast<double>(probs.size());
}

double adv_unlabeled_reject(
    const std::vector<std::pair<double, ProbVector>>& scored_confidences,
    Threshold c, int64_t* n_kept) {
    double s = 0.0;
    int64_t kept = 0;
    for (const auto& [score, conf] : scored_confidences)
        if (reject_mask(conf, c)) {
            s += hinge(-score);
            ++kept;
        }
    if (n_kept) *n_kept = kept;
    return kept == 0 ? 0.0 : s / static_cast<double>(kept);
}

double adv_unlabeled_openset(const std::vector<double>& u_scores) {
    if (u_scores.empty())
        throw ValidationError("adv_unlabeled_openset: empty score list");
    double s = 0.0;
    for (double v : u_scores) s += hinge(-v);
    return s / static_cast<double>(u_scores.size());
}

double adv_unlabeled_ossgan_value(const ModelBundle& m, const Tensor& u) {
    const Tensor probs = m.classify_nograd(u);
    const Tensor scores = m.scores_nograd(u, probs);
    double s = 0.0;
    for (double v : scores.vec()) s += hinge(-v);
    return s / static_cast<double>(scores.numel());
}

double cls_loss_ossgan(const std::vector<ProbVector>& labeled_probs,
                       const std::vector<ProbVector>& labeled_targets,
                       const std::vector<ProbVector>& fake_probs,
                       const std::vector<ProbVector>& fake_targets,
                       AblationFlags flags, double balance) {
    double value = cls_cross_entropy(labeled_probs, labeled_targets);
    if (flags.use_entropy_reg) {
        double h = 0.0;
        for (const auto& p : labeled_probs) h += normalized_entropy(p);
        value -= h / static_cast<double>(labeled_probs.size());
    }
    if (flags.use_fake_cls) {
        double fake = cls_cross_entropy(fake_probs, fake_targets);
        if (flags.use_entropy_reg) {
            double h = 0.0;
            for (const auto& p : fake_probs) h += normalized_entropy(p);
            fake -= h / static_cast<double>(fake_probs.size());
        }
        value += balance * fake;
    }
    return value;
}

LossTerms total_d_loss(double adv_lbl, double adv_unlbl, double cls,
                       double lambda) {
    if (!std::isfinite(adv_lbl) || !std::isfinite(adv_unlbl) ||
        !std::isfinite(cls))
        throw NumericError("total_d_loss: non-finite component");
    if (lambda < 0.0) throw ValidationError("total_d_loss: lambda must be >= 0");
    LossTerms lt;
    lt.adv_lbl = adv_lbl;
    lt.adv_unlbl = adv_unlbl;
    lt.cls = cls;
    lt.lambda = lambda;
    lt.total_d = adv_lbl + adv_unlbl + lambda * cls;
    return lt;
}

namespace build {

using graph::Tape;
using graph::Var;

Var mean_hinge_neg(Tape& t, Var scores) {
    return t.mean_vec(t.hinge(t.neg(scores)));
}

Var mean_hinge_pos(Tape& t, Var scores) {
    return t.mean_vec(t.hinge(scores));
}

Var mean_neg(Tape& t, Var scores) { return t.neg(t.mean_vec(scores)); }

Var cross_entropy_mean(Tape& t, Var probs, const Tensor& one_hot_targets) {
    if (!probs.value().same_shape(one_hot_targets))
        throw ValidationError("cross_entropy_mean: probs " +
                              probs.value().shape_str() + " vs targets " +
                              one_hot_targets.shape_str());
    Var ce = t.neg(t.rows_dot(t.constant(one_hot_targets),
                              t.log_clamped(probs, kLogEps)));
    return t.mean_vec(ce);
}

Var entropy_mean(Tape& t, Var probs) {
    const int64_t k = probs.value().dim(1);
    Var plogp = t.rows_dot(probs, t.log_clamped(probs, kLogEps));
    return t.mean_vec(t.scale(plogp, -1.0 / std::log(static_cast<double>(k))));
}

Var ossgan_cls_group(Tape& t, Var probs, const Tensor& one_hot_targets,
                     bool entropy_reg) {
    Var ce = cross_entropy_mean(t, probs, one_hot_targets);
    if (!entropy_reg) return ce;
    return t.sub(ce, entropy_mean(t, probs));
}

}  // namespace build

}  // namespace ossgan
