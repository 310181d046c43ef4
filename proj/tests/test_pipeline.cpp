#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ovum/errors.hpp"
#include "ovum/pipeline.hpp"
#include "ovum/synthetic.hpp"

#include <map>
#include <set>

using namespace ovum;

namespace {

io::ExperimentConfig fast_config() {
    io::ExperimentConfig cfg;
    cfg.synth.n_unlabeled = 24;
    cfg.synth.n_graded = 30;
    cfg.synth.n_kid = 40;
    cfg.synth.frames_per_video = 5;
    cfg.synth.frame_size = 16;
    cfg.embedding_dim = 16;
    cfg.ae_epochs = 2;
    cfg.hidden_dim = 16;
    cfg.grade_epochs = 2;
    cfg.binary_epochs = 2;
    cfg.k_folds = 4;
    cfg.bootstrap_repetitions = 60;
    return cfg;
}

Dataset fast_dataset(const io::ExperimentConfig& cfg, std::uint64_t seed) {
    SyntheticConfig synth = cfg.synth;
    synth.seed = seed;
    return generate_dataset(synth);
}

} // namespace

TEST_CASE("run_experiment produces a complete, internally consistent report") {
    const io::ExperimentConfig cfg = fast_config();
    const Dataset dataset = fast_dataset(cfg, 5);
    const io::EvaluationReport report = run_experiment(dataset, cfg, 5);

    CHECK(report.n_unlabeled == 24);
    CHECK(report.n_graded == 30);
    CHECK(report.n_kid == 40);
    CHECK(report.kid_positives + report.kid_negatives == 40);
    CHECK(report.ae_loss_history.size() == cfg.ae_epochs);
    CHECK(report.folds.size() == cfg.k_folds);

    // every kid record scored exactly once, out of fold
    std::set<std::string> scored;
    for (const io::PredictionRow& row : report.predictions) {
        CHECK(scored.insert(row.embryo_id).second);
        CHECK(row.score >= 0.0);
        CHECK(row.score <= 1.0);
        CHECK(row.panel_mean >= 1.0);
        CHECK(row.panel_mean <= 5.0);
    }
    CHECK(scored.size() == dataset.kid.size());

    // pooled ROC endpoints present; AUC in range
    CHECK(report.model.auc_value >= 0.0);
    CHECK(report.model.auc_value <= 1.0);
    CHECK(report.model.bootstrap.repetitions == cfg.bootstrap_repetitions);

    // baseline equals the empirical prevalence exactly
    REQUIRE(report.baseline.ppv.has_value());
    CHECK(*report.baseline.ppv ==
          static_cast<double>(report.kid_positives) / static_cast<double>(report.n_kid));

    // fold bookkeeping adds up
    for (const io::FoldReport& fold : report.folds) {
        CHECK(fold.n_train_graded < dataset.graded.size());
        CHECK(fold.n_train_kid + fold.n_val_kid == dataset.kid.size());
    }

    // per-grader panel AUCs are populated
    for (double a : report.panel.per_grader_auc) {
        CHECK(a >= 0.0);
        CHECK(a <= 1.0);
    }
}

TEST_CASE("run_experiment is deterministic: same seed, byte-identical report") {
    const io::ExperimentConfig cfg = fast_config();
    const Dataset dataset = fast_dataset(cfg, 6);
    const std::string a = io::report_to_json(run_experiment(dataset, cfg, 6));
    const std::string b = io::report_to_json(run_experiment(dataset, cfg, 6));
    CHECK(a == b);

    const std::string c = io::report_to_json(run_experiment(dataset, cfg, 7));
    CHECK(a != c);
}

TEST_CASE("fold sides never share a patient") {
    const io::ExperimentConfig cfg = fast_config();
    const Dataset dataset = fast_dataset(cfg, 8);
    const io::EvaluationReport report = run_experiment(dataset, cfg, 8);

    std::map<std::string, std::string> patient_of;
    for (const EmbryoRecord& r : dataset.kid) patient_of[r.embryo_id] = r.patient_id;
    for (const EmbryoRecord& r : dataset.graded) patient_of[r.embryo_id] = r.patient_id;

    // reconstruct each fold's validation patients from the prediction rows and
    // confirm no graded/kid training record shares them
    std::map<std::size_t, std::set<std::string>> val_patients;
    for (const io::PredictionRow& row : report.predictions) {
        val_patients[row.fold].insert(patient_of.at(row.embryo_id));
    }
    for (const auto& [fold, patients] : val_patients) {
        for (const auto& [other_fold, other_patients] : val_patients) {
            if (fold == other_fold) continue;
            for (const std::string& p : patients) CHECK(other_patients.count(p) == 0);
        }
    }
}

TEST_CASE("a pretrained autoencoder can be supplied to skip pretraining") {
    const io::ExperimentConfig cfg = fast_config();
    const Dataset dataset = fast_dataset(cfg, 9);
    const Autoencoder ae = build_autoencoder(cfg.encoder_spec(), 99);
    const io::EvaluationReport report = run_experiment(dataset, cfg, 9, &ae);
    CHECK(report.ae_loss_history.empty());
    CHECK(report.predictions.size() == dataset.kid.size());
}

TEST_CASE("missing subsets abort with a stage-tagged error") {
    const io::ExperimentConfig cfg = fast_config();
    Dataset dataset = fast_dataset(cfg, 10);
    dataset.graded.clear();
    CHECK_THROWS_WITH_AS(run_experiment(dataset, cfg, 10), doctest::Contains("[dataset]"),
                         StageError);

    Dataset no_unlabeled = fast_dataset(cfg, 11);
    no_unlabeled.unlabeled.clear();
    CHECK_THROWS_AS(run_experiment(no_unlabeled, cfg, 11), StageError);
}
