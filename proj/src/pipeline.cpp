#include "ovum/pipeline.hpp"

#include "ovum/cross_validation.hpp"
#include "ovum/errors.hpp"
#include "ovum/evaluation.hpp"
#include "ovum/sequence_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace ovum {

namespace {

io::MethodEvaluation evaluate_method(const std::vector<ScoredExample>& examples,
                                     double fixed_threshold, std::size_t repetitions,
                                     std::uint64_t boot_seed) {
    io::MethodEvaluation m;
    m.roc = roc_curve(examples);
    m.auc_value = auc(m.roc);
    m.bootstrap = bootstrap_auc(examples, repetitions, boot_seed);
    m.fixed_threshold = fixed_threshold;
    m.pv_fixed = predictive_values(examples, fixed_threshold);
    m.youden = youden_threshold(m.roc);
    m.pv_youden = predictive_values(examples, m.youden);
    return m;
}

double first_or_zero(const std::vector<double>& v) { return v.empty() ? 0.0 : v.front(); }
double last_or_zero(const std::vector<double>& v) { return v.empty() ? 0.0 : v.back(); }

} // namespace

std::vector<Frame> collect_pretraining_frames(const Dataset& dataset,
                                              const io::ExperimentConfig& cfg,
                                              std::uint64_t seed) {
    std::vector<std::pair<std::size_t, std::size_t>> slots; // (record, frame)
    for (std::size_t r = 0; r < dataset.unlabeled.size(); ++r) {
        for (std::size_t f = 0; f < dataset.unlabeled[r].frames.size(); ++f) {
            slots.emplace_back(r, f);
        }
    }
    if (cfg.ae_frame_limit > 0 && slots.size() > cfg.ae_frame_limit) {
        Rng rng = make_rng(seed, 0x61657375u /* "aesu" */);
        std::shuffle(slots.begin(), slots.end(), rng);
        slots.resize(cfg.ae_frame_limit);
    }
    std::vector<Frame> frames;
    frames.reserve(slots.size());
    for (const auto& [r, f] : slots) frames.push_back(dataset.unlabeled[r].frames[f]);
    return frames;
}

io::EvaluationReport run_experiment(const Dataset& dataset, const io::ExperimentConfig& cfg,
                                    std::uint64_t seed, const Autoencoder* pretrained) {
    io::EvaluationReport report;
    report.seed = seed;
    report.config = cfg.to_entries();
    report.config_fingerprint = io::config_fingerprint(cfg, seed);
    report.n_unlabeled = dataset.unlabeled.size();
    report.n_graded = dataset.graded.size();
    report.n_kid = dataset.kid.size();

    if (dataset.graded.empty() || dataset.kid.empty()) {
        throw StageError("dataset", "graded and kid subsets must be nonempty");
    }
    if (dataset.unlabeled.empty() && pretrained == nullptr) {
        throw StageError("dataset", "unlabeled subset is empty and no pretrained "
                                    "autoencoder was supplied");
    }
    for (const EmbryoRecord& r : dataset.kid) {
        validate_record(r);
        (*r.kid_label == 1 ? report.kid_positives : report.kid_negatives)++;
    }

    // --- stage: pretrain ------------------------------------------------
    Autoencoder ae;
    try {
        if (pretrained) {
            ae = *pretrained;
        } else {
            const std::vector<Frame> frames =
                collect_pretraining_frames(dataset, cfg, seed);
            AeTrainConfig ae_cfg;
            ae_cfg.epochs = cfg.ae_epochs;
            ae_cfg.batch_size = cfg.ae_batch_size;
            ae_cfg.lr = cfg.ae_lr;
            ae_cfg.seed = derive_seed(seed, 10);
            AeTrainResult trained = train_autoencoder(
                build_autoencoder(cfg.encoder_spec(), derive_seed(seed, 11)), frames, ae_cfg);
            ae = std::move(trained.model);
            report.ae_loss_history = std::move(trained.loss_history);
        }
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError("pretrain", e.what());
    }

    // --- stage: embed ----------------------------------------------------
    std::map<std::string, std::vector<FrameEmbedding>> embeddings;
    try {
        for (const EmbryoRecord& r : dataset.graded) {
            embeddings[r.embryo_id] = embed_video(ae, r.frames);
        }
        for (const EmbryoRecord& r : dataset.kid) {
            embeddings[r.embryo_id] = embed_video(ae, r.frames);
        }
    } catch (const std::exception& e) {
        throw StageError("embed", e.what());
    }

    // --- stage: folds ------------------------------------------------------
    FoldAssignment assignment;
    try {
        std::vector<EmbryoRecord> meta; // ids only; folds never touch frames
        meta.reserve(dataset.graded.size() + dataset.kid.size());
        for (const EmbryoRecord& r : dataset.graded) {
            EmbryoRecord m;
            m.embryo_id = r.embryo_id;
            m.patient_id = r.patient_id;
            meta.push_back(std::move(m));
        }
        for (const EmbryoRecord& r : dataset.kid) {
            EmbryoRecord m;
            m.embryo_id = r.embryo_id;
            m.patient_id = r.patient_id;
            meta.push_back(std::move(m));
        }
        assignment = grouped_kfold(meta, cfg.k_folds, seed);
    } catch (const std::exception& e) {
        throw StageError("folds", e.what());
    }

    // --- stage: per-fold training and out-of-fold scoring -------------------
    std::map<std::string, const EmbryoRecord*> kid_by_id;
    for (const EmbryoRecord& r : dataset.kid) kid_by_id[r.embryo_id] = &r;

    for (std::size_t fold = 0; fold < cfg.k_folds; ++fold) {
        const std::string stage = "fold-" + std::to_string(fold);
        try {
            // runtime leakage guard, independent of the fold_split tests
            std::set<std::string> train_patients, val_patients;
            for (const EmbryoRecord& r : dataset.graded) {
                (assignment.fold_of.at(r.embryo_id) == fold ? val_patients : train_patients)
                    .insert(r.patient_id);
            }
            for (const EmbryoRecord& r : dataset.kid) {
                (assignment.fold_of.at(r.embryo_id) == fold ? val_patients : train_patients)
                    .insert(r.patient_id);
            }
            for (const std::string& p : val_patients) {
                if (train_patients.count(p)) {
                    throw Error("patient '" + p + "' appears on both sides of fold " +
                                std::to_string(fold));
                }
            }

            std::vector<GradedVideo> grade_train;
            for (const EmbryoRecord& r : dataset.graded) {
                if (assignment.fold_of.at(r.embryo_id) == fold) continue;
                grade_train.push_back(
                    {embeddings.at(r.embryo_id), panel_to_distribution(*r.grades)});
            }
            std::vector<LabeledVideo> kid_train;
            std::vector<const EmbryoRecord*> kid_val;
            for (const EmbryoRecord& r : dataset.kid) {
                if (assignment.fold_of.at(r.embryo_id) == fold) {
                    kid_val.push_back(&r);
                } else {
                    kid_train.push_back({embeddings.at(r.embryo_id), *r.kid_label});
                }
            }

            SeqTrainConfig grade_cfg;
            grade_cfg.epochs = cfg.grade_epochs;
            grade_cfg.batch_size = cfg.grade_batch_size;
            grade_cfg.lr = cfg.grade_lr;
            grade_cfg.hidden_dim = cfg.hidden_dim;
            grade_cfg.seed = derive_seed(seed, 1000 + fold);
            SeqTrainResult grade_model = train_grade_model(grade_train, grade_cfg);

            SeqTrainConfig binary_cfg;
            binary_cfg.epochs = cfg.binary_epochs;
            binary_cfg.batch_size = cfg.binary_batch_size;
            binary_cfg.lr = cfg.binary_lr;
            binary_cfg.hidden_dim = cfg.hidden_dim;
            binary_cfg.trunk_lr_scale = cfg.trunk_lr_scale;
            binary_cfg.seed = derive_seed(seed, 2000 + fold);
            SeqTrainResult binary_model = transfer_binary_head(
                grade_model.model, kid_train, cfg.transfer_policy, binary_cfg);

            io::FoldReport fr;
            fr.fold = fold;
            fr.n_train_graded = grade_train.size();
            fr.n_train_kid = kid_train.size();
            fr.n_val_kid = kid_val.size();
            fr.grade_loss_initial = first_or_zero(grade_model.loss_history);
            fr.grade_loss_final = last_or_zero(grade_model.loss_history);
            fr.binary_loss_initial = first_or_zero(binary_model.loss_history);
            fr.binary_loss_final = last_or_zero(binary_model.loss_history);

            std::vector<ScoredExample> val_examples;
            for (const EmbryoRecord* r : kid_val) {
                const double score =
                    predict_implantation(binary_model.model, embeddings.at(r->embryo_id))
                        .probability;
                report.predictions.push_back({r->embryo_id, fold, score,
                                              panel_score(*r->grades), *r->kid_label});
                val_examples.push_back({score, *r->kid_label == 1});
            }
            const bool has_pos = std::any_of(val_examples.begin(), val_examples.end(),
                                             [](const ScoredExample& e) { return e.positive; });
            const bool has_neg = std::any_of(val_examples.begin(), val_examples.end(),
                                             [](const ScoredExample& e) { return !e.positive; });
            if (has_pos && has_neg) {
                fr.val_auc = auc(roc_curve(val_examples));
            }
            report.folds.push_back(std::move(fr));
        } catch (const StageError&) {
            throw;
        } catch (const std::exception& e) {
            throw StageError(stage, e.what());
        }
    }

    // --- stage: evaluate -----------------------------------------------------
    try {
        std::vector<ScoredExample> model_examples;
        std::vector<ScoredExample> panel_examples;
        std::array<std::vector<ScoredExample>, 5> grader_examples;
        for (const io::PredictionRow& row : report.predictions) {
            const EmbryoRecord* r = kid_by_id.at(row.embryo_id);
            const bool positive = row.label == 1;
            model_examples.push_back({row.score, positive});
            panel_examples.push_back({row.panel_mean, positive});
            for (std::size_t g = 0; g < 5; ++g) {
                grader_examples[g].push_back(
                    {static_cast<double>((*r->grades)[g]), positive});
            }
        }

        report.model = evaluate_method(model_examples, 0.5, cfg.bootstrap_repetitions,
                                       derive_seed(seed, 3000));
        report.panel.mean_score = evaluate_method(
            panel_examples, 3.0, cfg.bootstrap_repetitions, derive_seed(seed, 3001));
        double grader_sum = 0.0;
        for (std::size_t g = 0; g < 5; ++g) {
            report.panel.per_grader_auc[g] = auc_pair_oracle(grader_examples[g]);
            grader_sum += report.panel.per_grader_auc[g];
        }
        report.panel.per_grader_mean = grader_sum / 5.0;
        double var = 0.0;
        for (double a : report.panel.per_grader_auc) {
            var += (a - report.panel.per_grader_mean) * (a - report.panel.per_grader_mean);
        }
        report.panel.per_grader_std = std::sqrt(var / 5.0);

        report.baseline = random_baseline(model_examples);

        double fold_auc_sum = 0.0;
        std::size_t fold_auc_count = 0;
        for (const io::FoldReport& f : report.folds) {
            if (f.val_auc) {
                fold_auc_sum += *f.val_auc;
                ++fold_auc_count;
            }
        }
        if (fold_auc_count > 0) report.fold_mean_auc = fold_auc_sum / fold_auc_count;
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError("evaluate", e.what());
    }

    return report;
}

} // namespace ovum
