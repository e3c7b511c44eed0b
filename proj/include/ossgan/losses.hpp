#pragma once

// Every training objective: shared hinge adversarial losses, per-method
// unlabeled losses, classifier losses with entropy regularization, and the
// weighted composition into the discriminator total. Scalar forms here are
// the reference oracles; the tape builders produce the same values
// differentiably for the trainer.

#include <cstdint>
#include <utility>
#include <vector>

#include "ossgan/graph.hpp"
#include "ossgan/label_algebra.hpp"
#include "ossgan/models.hpp"
#include "ossgan/tensor.hpp"

namespace ossgan {

struct LossTerms {
    double adv_lbl = 0.0;
    double adv_unlbl = 0.0;
    double cls = 0.0;
    double lambda = 0.0;
    double total_d = 0.0;
    double total_g = 0.0;
};

// recomputes the composition from the stored parts; identical expression, so
// the check is bit-exact in practice
bool composition_holds(const LossTerms& lt, double tol = 1e-9);

struct AblationFlags {
    bool use_entropy_reg = true;
    bool use_fake_cls = true;
};

// ---------------------------------------------------------------------------
// scalar reference forms
// ---------------------------------------------------------------------------

double hinge(double t);

// mean hinge(-r) over real labeled scores + mean hinge(f) over fake scores
double adv_labeled(const std::vector<double>& real_scores,
                   const std::vector<double>& fake_scores);

// mean of -D(G(z,y), y)
double generator_loss(const std::vector<double>& fake_scores);

// identical arithmetic; the K+1 padding lives in the condition vectors
double adv_labeled_openset(const std::vector<double>& real_scores,
                           const std::vector<double>& fake_scores);
double generator_loss_openset(const std::vector<double>& fake_scores);

// mean of -log p(true class), log clamped at 1e-12
double cls_cross_entropy(const std::vector<ProbVector>& probs,
                         const std::vector<ProbVector>& one_hot_labels);
double cls_cross_entropy(const std::vector<ProbVector>& probs,
                         const std::vector<int64_t>& true_classes);

// mean hinge(-score) over samples whose confidence clears c; 0 when all are
// filtered out (callers log the empty-batch warning); n_kept reports the
// surviving count
double adv_unlabeled_reject(
    const std::vector<std::pair<double, ProbVector>>& scored_confidences,
    Threshold c, int64_t* n_kept = nullptr);

// mean hinge(-score); conditions already carry the K+1 extended labels
double adv_unlabeled_openset(const std::vector<double>& u_scores);

// mean hinge(-D(u, C(D~(u)))) evaluated without gradients, as the oracle for
// the tape form below
double adv_unlabeled_ossgan_value(const ModelBundle& m, const Tensor& u);

// CE(lbl) - mean H(lbl) + balance * [CE(fake) - mean H(fake)], H normalized;
// flags drop the entropy terms and/or the whole fake group
double cls_loss_ossgan(const std::vector<ProbVector>& labeled_probs,
                       const std::vector<ProbVector>& labeled_targets,
                       const std::vector<ProbVector>& fake_probs,
                       const std::vector<ProbVector>& fake_targets,
                       AblationFlags flags, double balance);

// composes total_d = adv_lbl + adv_unlbl + lambda * cls
LossTerms total_d_loss(double adv_lbl, double adv_unlbl, double cls,
                       double lambda);

// ---------------------------------------------------------------------------
// tape builders (each returns a scalar Var)
// ---------------------------------------------------------------------------

namespace build {

// mean hinge(-s) and mean hinge(s) over a [n] score vector
graph::Var mean_hinge_neg(graph::Tape& t, graph::Var scores);
graph::Var mean_hinge_pos(graph::Tape& t, graph::Var scores);

// -mean(s): the generator objective
graph::Var mean_neg(graph::Tape& t, graph::Var scores);

// mean over rows of -sum_j targets[i,j] log probs[i,j]
graph::Var cross_entropy_mean(graph::Tape& t, graph::Var probs,
                              const Tensor& one_hot_targets);

// mean over rows of -(sum_j p log p) / log K
graph::Var entropy_mean(graph::Tape& t, graph::Var probs);

// CE - H composition of Eq.-12 shape on one sample group
graph::Var ossgan_cls_group(graph::Tape& t, graph::Var probs,
                            const Tensor& one_hot_targets, bool entropy_reg);

}  // namespace build

}  // namespace ossgan
