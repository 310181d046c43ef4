#include "ovum/evaluation.hpp"

#include "ovum/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace ovum {

namespace {

struct ClassCounts {
    std::size_t positives = 0;
    std::size_t negatives = 0;
};

ClassCounts count_classes(const std::vector<ScoredExample>& examples) {
    ClassCounts c;
    for (const ScoredExample& e : examples) {
        if (!std::isfinite(e.score)) {
            throw ValueError("scored example has non-finite score");
        }
        (e.positive ? c.positives : c.negatives)++;
    }
    return c;
}

void require_both_classes(const ClassCounts& c, const char* what) {
    if (c.positives == 0 || c.negatives == 0) {
        throw ValueError(std::string(what) + " undefined for single-class input (" +
                         std::to_string(c.positives) + " positive / " +
                         std::to_string(c.negatives) + " negative)");
    }
}

} // namespace

RocCurve roc_curve(const std::vector<ScoredExample>& examples) {
    const ClassCounts counts = count_classes(examples);
    require_both_classes(counts, "ROC");

    std::vector<ScoredExample> sorted = examples;
    std::sort(sorted.begin(), sorted.end(), [](const ScoredExample& a, const ScoredExample& b) {
        return a.score > b.score;
    });

    RocCurve curve;
    curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});

    const double p = static_cast<double>(counts.positives);
    const double n = static_cast<double>(counts.negatives);
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        const double threshold = sorted[i].score;
        // tied scores collapse to one threshold
        while (i < sorted.size() && sorted[i].score == threshold) {
            (sorted[i].positive ? tp : fp)++;
            ++i;
        }
        curve.points.push_back({threshold, static_cast<double>(fp) / n,
                                static_cast<double>(tp) / p});
    }
    curve.points.push_back({-std::numeric_limits<double>::infinity(), 1.0, 1.0});
    return curve;
}

double auc(const RocCurve& curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const RocPoint& a = curve.points[i - 1];
        const RocPoint& b = curve.points[i];
        area += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
    }
    return area;
}

double auc_pair_oracle(const std::vector<ScoredExample>& examples) {
    const ClassCounts counts = count_classes(examples);
    require_both_classes(counts, "AUC");
    double ordered = 0.0;
    for (const ScoredExample& pos : examples) {
        if (!pos.positive) continue;
        for (const ScoredExample& neg : examples) {
            if (neg.positive) continue;
            if (pos.score > neg.score) ordered += 1.0;
            else if (pos.score == neg.score) ordered += 0.5;
        }
    }
    return ordered / (static_cast<double>(counts.positives) *
                      static_cast<double>(counts.negatives));
}

BootstrapSummary bootstrap_auc_with_sampler(const std::vector<ScoredExample>& examples,
                                            std::size_t repetitions,
                                            const Resampler& sampler) {
    if (repetitions == 0) throw ValueError("bootstrap needs repetitions >= 1");
    const ClassCounts counts = count_classes(examples);
    require_both_classes(counts, "bootstrap AUC");

    std::vector<double> aucs;
    aucs.reserve(repetitions);
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
        const std::vector<std::size_t> indices = sampler(rep);
        std::vector<ScoredExample> resample;
        resample.reserve(indices.size());
        for (std::size_t idx : indices) resample.push_back(examples.at(idx));
        // pair counting is exact: perfectly separated resamples give exactly 1
        aucs.push_back(auc_pair_oracle(resample));
    }

    BootstrapSummary summary;
    summary.repetitions = repetitions;
    double sum = 0.0;
    for (double a : aucs) sum += a;
    summary.mean = sum / static_cast<double>(repetitions);
    double var = 0.0;
    for (double a : aucs) var += (a - summary.mean) * (a - summary.mean);
    summary.std = std::sqrt(var / static_cast<double>(repetitions));
    return summary;
}

BootstrapSummary bootstrap_auc(const std::vector<ScoredExample>& examples,
                               std::size_t repetitions, std::uint64_t seed) {
    const std::size_t n = examples.size();
    const Resampler sampler = [&examples, seed, n](std::size_t rep) {
        Rng rng = make_rng(seed, rep);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::vector<std::size_t> indices(n);
        // redraw single-class resamples so each repetition yields an AUC
        for (;;) {
            bool any_pos = false, any_neg = false;
            for (std::size_t i = 0; i < n; ++i) {
                indices[i] = pick(rng);
                (examples[indices[i]].positive ? any_pos : any_neg) = true;
            }
            if (any_pos && any_neg) return indices;
        }
    };
    BootstrapSummary summary = bootstrap_auc_with_sampler(examples, repetitions, sampler);
    summary.seed = seed;
    return summary;
}

PredictiveValues predictive_values(const std::vector<ScoredExample>& examples,
                                   double threshold) {
    PredictiveValues pv;
    pv.threshold = threshold;
    for (const ScoredExample& e : examples) {
        const bool predicted_positive = e.score >= threshold;
        if (predicted_positive) {
            (e.positive ? pv.tp : pv.fp) += 1.0;
        } else {
            (e.positive ? pv.fn : pv.tn) += 1.0;
        }
    }
    if (pv.tp + pv.fp > 0) pv.ppv = pv.tp / (pv.tp + pv.fp);
    if (pv.tn + pv.fn > 0) pv.npv = pv.tn / (pv.tn + pv.fn);
    return pv;
}

double youden_threshold(const RocCurve& curve) {
    if (curve.points.empty()) throw ValueError("youden_threshold: empty curve");
    double best = curve.points.front().threshold;
    double best_j = curve.points.front().tpr - curve.points.front().fpr;
    for (const RocPoint& p : curve.points) {
        const double j = p.tpr - p.fpr;
        if (j > best_j) {
            best_j = j;
            best = p.threshold;
        }
    }
    return best;
}

double panel_score(const std::array<int, 5>& grades) {
    double sum = 0.0;
    for (int g : grades) {
        if (g < 1 || g > 5) {
            throw ValueError("panel grade " + std::to_string(g) + " outside 1..5");
        }
        sum += static_cast<double>(g);
    }
    return sum / 5.0;
}

PredictiveValues random_baseline(const std::vector<ScoredExample>& examples) {
    if (examples.empty()) throw ValueError("random_baseline: empty input");
    const ClassCounts counts = count_classes(examples);
    const double n = static_cast<double>(examples.size());
    const double prevalence = static_cast<double>(counts.positives) / n;
    // exact ratio, not 1 - prevalence: 56/272 must come out bit-exact
    const double neg_prevalence = static_cast<double>(counts.negatives) / n;

    PredictiveValues pv;
    pv.threshold = std::numeric_limits<double>::quiet_NaN(); // no operating point
    // expected confusion of a label-independent classifier matching prevalence
    pv.tp = n * prevalence * prevalence;
    pv.fp = n * neg_prevalence * prevalence;
    pv.fn = n * prevalence * neg_prevalence;
    pv.tn = n * neg_prevalence * neg_prevalence;
    pv.ppv = prevalence;
    pv.npv = neg_prevalence;
    return pv;
}

} // namespace ovum
