#pragma once

#include "ovum/rng.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace ovum {

/// One scored case: a model probability in [0,1] or a panel score in [1,5],
/// with its ground-truth implantation outcome.
struct ScoredExample {
    double score = 0.0;
    bool positive = false;
};

struct RocPoint {
    double threshold; // classify positive when score >= threshold
    double fpr;
    double tpr;
};

/// ROC points ordered from (0,0) to (1,1), one per distinct score threshold
/// plus the two endpoints. FPR and TPR are nondecreasing along the curve.
struct RocCurve {
    std::vector<RocPoint> points;
};

/// Requires at least one positive and one negative example.
RocCurve roc_curve(const std::vector<ScoredExample>& examples);

/// Trapezoidal area under the curve, in [0,1].
double auc(const RocCurve& curve);

/// Independent AUC route: fraction of (positive, negative) pairs ordered
/// correctly, ties counting 0.5 (Mann-Whitney identity).
double auc_pair_oracle(const std::vector<ScoredExample>& examples);

struct BootstrapSummary {
    double mean = 0.0;
    double std = 0.0; // population std over repetitions
    std::size_t repetitions = 0;
    std::uint64_t seed = 0;
};

/// Resamples with replacement to the original size; single-class resamples
/// are redrawn so every repetition contributes an AUC. Per-repetition derived
/// seeds keep the result independent of evaluation order. Per-resample AUCs
/// use the pair-counting route, which is exact on degenerate resamples.
BootstrapSummary bootstrap_auc(const std::vector<ScoredExample>& examples,
                               std::size_t repetitions, std::uint64_t seed);

/// Resampler injection point: maps repetition index -> indices into examples.
/// Exposed so tests can force an identity resample.
using Resampler = std::function<std::vector<std::size_t>(std::size_t repetition)>;

BootstrapSummary bootstrap_auc_with_sampler(const std::vector<ScoredExample>& examples,
                                            std::size_t repetitions,
                                            const Resampler& sampler);

/// Confusion counts and predictive values at one threshold. Counts are real
/// numbers so the prevalence-matched random baseline can report expected
/// (fractional) counts; predictive_values itself always produces integers.
struct PredictiveValues {
    double threshold = 0.0;
    double tp = 0, fp = 0, tn = 0, fn = 0;
    std::optional<double> ppv; // TP/(TP+FP) when defined
    std::optional<double> npv; // TN/(TN+FN) when defined
};

/// Classifies positive iff score >= threshold (consistent with roc_curve).
PredictiveValues predictive_values(const std::vector<ScoredExample>& examples,
                                   double threshold);

/// Threshold maximizing TPR - FPR over the curve's points.
double youden_threshold(const RocCurve& curve);

/// Mean of the five panel grades, in [1,5].
double panel_score(const std::array<int, 5>& grades);

/// Expected predictive values of a label-independent classifier whose
/// positive rate matches the dataset prevalence: ppv = prevalence,
/// npv = 1 - prevalence.
PredictiveValues random_baseline(const std::vector<ScoredExample>& examples);

} // namespace ovum
