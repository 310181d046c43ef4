#pragma once

#include "ovum/evaluation.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ovum::io {

struct FoldReport {
    std::size_t fold = 0;
    std::size_t n_train_graded = 0;
    std::size_t n_train_kid = 0;
    std::size_t n_val_kid = 0;
    double grade_loss_initial = 0.0;
    double grade_loss_final = 0.0;
    double binary_loss_initial = 0.0;
    double binary_loss_final = 0.0;
    std::optional<double> val_auc; // absent when the fold's validation is single-class
};

/// ROC + AUC + bootstrap + predictive values for one scoring method.
struct MethodEvaluation {
    RocCurve roc;
    double auc_value = 0.0;
    BootstrapSummary bootstrap;
    double fixed_threshold = 0.5; // 0.5 on the probability scale, 3.0 on grades
    PredictiveValues pv_fixed;
    double youden = 0.0;
    PredictiveValues pv_youden;
};

struct PanelEvaluation {
    MethodEvaluation mean_score; // five grades averaged into one ROC score
    std::array<double, 5> per_grader_auc{};
    double per_grader_mean = 0.0;
    double per_grader_std = 0.0;
};

struct PredictionRow {
    std::string embryo_id;
    std::size_t fold = 0;
    double score = 0.0;      // model implantation probability
    double panel_mean = 0.0; // mean panel grade
    int label = 0;
};

/// Full output of one experiment run; every number is recomputable from the
/// referenced dataset, config and seed.
struct EvaluationReport {
    std::string dataset_dir;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> config;
    std::string config_fingerprint;

    std::size_t n_unlabeled = 0, n_graded = 0, n_kid = 0;
    std::size_t kid_positives = 0, kid_negatives = 0;

    std::vector<double> ae_loss_history;

    std::vector<FoldReport> folds;
    std::optional<double> fold_mean_auc; // mean over folds with a defined AUC

    MethodEvaluation model; // pooled out-of-fold predictions
    PanelEvaluation panel;
    PredictiveValues baseline;

    std::vector<PredictionRow> predictions;
};

/// Published reference values attached to every report as context. They come
/// from the original clinical study and are never reproduced by this
/// synthetic benchmark.
std::map<std::string, std::string> reference_annotations();

std::string report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const std::string& text);

void save_report(const EvaluationReport& report, const std::filesystem::path& path);
EvaluationReport load_report(const std::filesystem::path& path);

/// Writes report.json, ROC tables (CSV), per-embryo predictions (CSV) and an
/// SVG with the ROC panel and the PPV/NPV bar chart. Re-emitting the same
/// report produces identical bytes.
void emit_report(const EvaluationReport& report, const std::filesystem::path& dir);

} // namespace ovum::io
