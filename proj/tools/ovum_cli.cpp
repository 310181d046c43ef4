#include "ovum/errors.hpp"
#include "ovum/io/checkpoint.hpp"
#include "ovum/io/config.hpp"
#include "ovum/io/dataset_io.hpp"
#include "ovum/io/report.hpp"
#include "ovum/pipeline.hpp"
#include "ovum/sequence_model.hpp"
#include "ovum/synthetic.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace ovum;

namespace {

io::ExperimentConfig load_config(const std::string& path) {
    if (path.empty()) return io::ExperimentConfig{};
    return io::ExperimentConfig::from_entries(io::KeyValueConfig::parse_file(path));
}

Dataset load_data(const std::string& dir) {
    Dataset dataset = io::load_dataset(dir);
    if (dataset.unlabeled.empty() && dataset.graded.empty() && dataset.kid.empty()) {
        throw IoError("dataset at " + dir + " is empty");
    }
    return dataset;
}

SyntheticConfig synth_config(const io::ExperimentConfig& cfg, std::uint64_t seed) {
    SyntheticConfig s = cfg.synth;
    s.seed = seed;
    return s;
}

int run_synth(const std::string& config_path, std::uint64_t seed, const std::string& out) {
    const io::ExperimentConfig cfg = load_config(config_path);
    const Dataset dataset = generate_dataset(synth_config(cfg, seed));
    io::save_dataset(dataset, out);
    std::cout << "wrote dataset: " << dataset.unlabeled.size() << " unlabeled, "
              << dataset.graded.size() << " graded, " << dataset.kid.size() << " kid -> "
              << out << "\n";
    return 0;
}

int run_pretrain(const std::string& data, const std::string& config_path,
                 std::uint64_t seed, const std::string& out) {
    const io::ExperimentConfig cfg = load_config(config_path);
    const Dataset dataset = load_data(data);
    if (dataset.unlabeled.empty()) throw StageError("pretrain", "no unlabeled records");

    AeTrainConfig ae_cfg;
    ae_cfg.epochs = cfg.ae_epochs;
    ae_cfg.batch_size = cfg.ae_batch_size;
    ae_cfg.lr = cfg.ae_lr;
    ae_cfg.seed = derive_seed(seed, 10);
    const std::vector<Frame> frames = all_unlabeled_frames(dataset, cfg, seed);
    AeTrainResult result = train_autoencoder(
        build_autoencoder(cfg.encoder_spec(), derive_seed(seed, 11)), frames, ae_cfg);

    io::CheckpointMeta meta{seed, static_cast<std::uint32_t>(cfg.ae_epochs),
                            result.loss_history.empty() ? 0.0 : result.loss_history.back()};
    io::save_checkpoint(io::make_checkpoint(result.model, meta), out);
    std::cout << "pretrained autoencoder on " << frames.size() << " frames, final L2 "
              << meta.final_loss << " -> " << out << "\n";
    return 0;
}

int run_train_grader(const std::string& data, const std::string& ae_path,
                     const std::string& config_path, std::uint64_t seed,
                     const std::string& out) {
    const io::ExperimentConfig cfg = load_config(config_path);
    const Dataset dataset = load_data(data);
    if (dataset.graded.empty()) throw StageError("train-grader", "no graded records");
    const Autoencoder ae = io::autoencoder_from_checkpoint(io::load_checkpoint(ae_path));

    std::vector<GradedVideo> train;
    for (const EmbryoRecord& r : dataset.graded) {
        train.push_back({embed_video(ae, r.frames), panel_to_distribution(*r.grades)});
    }
    SeqTrainConfig seq_cfg;
    seq_cfg.epochs = cfg.grade_epochs;
    seq_cfg.batch_size = cfg.grade_batch_size;
    seq_cfg.lr = cfg.grade_lr;
    seq_cfg.hidden_dim = cfg.hidden_dim;
    seq_cfg.seed = derive_seed(seed, 1);
    SeqTrainResult result = train_grade_model(train, seq_cfg);

    io::CheckpointMeta meta{seed, static_cast<std::uint32_t>(cfg.grade_epochs),
                            result.loss_history.empty() ? 0.0 : result.loss_history.back()};
    io::save_checkpoint(io::make_checkpoint(result.model, meta), out);
    std::cout << "trained grade model on " << train.size() << " videos, final CE "
              << meta.final_loss << " -> " << out << "\n";
    return 0;
}

int run_finetune(const std::string& data, const std::string& ae_path,
                 const std::string& grader_path, const std::string& config_path,
                 std::uint64_t seed, const std::string& out) {
    const io::ExperimentConfig cfg = load_config(config_path);
    const Dataset dataset = load_data(data);
    if (dataset.kid.empty()) throw StageError("finetune", "no kid records");
    const Autoencoder ae = io::autoencoder_from_checkpoint(io::load_checkpoint(ae_path));
    const SequenceModel grader =
        io::sequence_model_from_checkpoint(io::load_checkpoint(grader_path));

    std::vector<LabeledVideo> train;
    for (const EmbryoRecord& r : dataset.kid) {
        train.push_back({embed_video(ae, r.frames), *r.kid_label});
    }
    SeqTrainConfig seq_cfg;
    seq_cfg.epochs = cfg.binary_epochs;
    seq_cfg.batch_size = cfg.binary_batch_size;
    seq_cfg.lr = cfg.binary_lr;
    seq_cfg.hidden_dim = cfg.hidden_dim;
    seq_cfg.trunk_lr_scale = cfg.trunk_lr_scale;
    seq_cfg.seed = derive_seed(seed, 2);
    SeqTrainResult result = transfer_binary_head(grader, train, cfg.transfer_policy, seq_cfg);

    io::CheckpointMeta meta{seed, static_cast<std::uint32_t>(cfg.binary_epochs),
                            result.loss_history.empty() ? 0.0 : result.loss_history.back()};
    io::save_checkpoint(io::make_checkpoint(result.model, meta), out);
    std::cout << "transferred binary head (" << transfer_policy_name(cfg.transfer_policy)
              << ") on " << train.size() << " videos, final BCE " << meta.final_loss
              << " -> " << out << "\n";
    return 0;
}

int run_evaluate(const std::string& data, const std::string& config_path,
                 std::uint64_t seed, const std::string& out, const std::string& ae_path) {
    const io::ExperimentConfig cfg = load_config(config_path);
    const Dataset dataset = load_data(data);

    io::EvaluationReport report;
    if (!ae_path.empty()) {
        const Autoencoder ae = io::autoencoder_from_checkpoint(io::load_checkpoint(ae_path));
        report = run_experiment(dataset, cfg, seed, &ae);
    } else {
        report = run_experiment(dataset, cfg, seed);
    }
    report.dataset_dir = data;
    io::save_report(report, out);
    std::cout << "pooled AUC " << report.model.auc_value << " +/- "
              << report.model.bootstrap.std << " (panel "
              << report.panel.mean_score.auc_value << ") -> " << out << "\n";
    return 0;
}

int run_report(const std::string& report_path, const std::string& out) {
    const io::EvaluationReport report = io::load_report(report_path);
    io::emit_report(report, out);
    std::cout << "emitted report files to " << out << "\n";
    return 0;
}

int run_all(const std::string& config_path, std::uint64_t seed, const std::string& out) {
    const io::ExperimentConfig cfg = load_config(config_path);
    const fs::path base = out;
    std::error_code ec;
    fs::create_directories(base, ec);
    if (ec) throw IoError("cannot create output directory " + base.string());

    const Dataset dataset = generate_dataset(synth_config(cfg, seed));
    io::save_dataset(dataset, base / "dataset");
    std::cout << "dataset -> " << (base / "dataset").string() << "\n";

    io::EvaluationReport report = run_experiment(dataset, cfg, seed);
    report.dataset_dir = (base / "dataset").string();
    io::emit_report(report, base / "report");
    std::cout << "pooled AUC " << report.model.auc_value << " +/- "
              << report.model.bootstrap.std << " (panel "
              << report.panel.mean_score.auc_value << ", baseline PPV "
              << (report.baseline.ppv ? *report.baseline.ppv : 0.0) << ")\n";
    std::cout << "report -> " << (base / "report").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"embryo implantation prediction pipeline on synthetic time-lapse data"};
    app.require_subcommand(1);

    std::string config_path, out, data, ae_path, grader_path, report_path;
    std::uint64_t seed = 42;

    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    synth->add_option("--config", config_path, "flat key=value config file");
    synth->add_option("--seed", seed, "master seed");
    synth->add_option("--out", out, "dataset output directory")->required();

    auto* pretrain = app.add_subcommand("pretrain", "train the frame autoencoder");
    pretrain->add_option("--data", data, "dataset directory")->required();
    pretrain->add_option("--config", config_path, "flat key=value config file");
    pretrain->add_option("--seed", seed, "master seed");
    pretrain->add_option("--out", out, "checkpoint output path")->required();

    auto* grader = app.add_subcommand("train-grader", "train the grade model on all graded videos");
    grader->add_option("--data", data, "dataset directory")->required();
    grader->add_option("--ae", ae_path, "autoencoder checkpoint")->required();
    grader->add_option("--config", config_path, "flat key=value config file");
    grader->add_option("--seed", seed, "master seed");
    grader->add_option("--out", out, "checkpoint output path")->required();

    auto* finetune = app.add_subcommand("finetune", "transfer a binary head on all kid videos");
    finetune->add_option("--data", data, "dataset directory")->required();
    finetune->add_option("--ae", ae_path, "autoencoder checkpoint")->required();
    finetune->add_option("--grader", grader_path, "grade model checkpoint")->required();
    finetune->add_option("--config", config_path, "flat key=value config file");
    finetune->add_option("--seed", seed, "master seed");
    finetune->add_option("--out", out, "checkpoint output path")->required();

    auto* evaluate = app.add_subcommand("evaluate", "run the full cross-validated protocol");
    evaluate->add_option("--data", data, "dataset directory")->required();
    evaluate->add_option("--config", config_path, "flat key=value config file");
    evaluate->add_option("--seed", seed, "master seed");
    evaluate->add_option("--out", out, "report.json output path")->required();
    evaluate->add_option("--ae", ae_path, "reuse a pretrained autoencoder checkpoint");

    auto* report = app.add_subcommand("report", "emit CSV tables and the SVG figure");
    report->add_option("--report", report_path, "report.json produced by evaluate")->required();
    report->add_option("--out", out, "output directory")->required();

    auto* runall = app.add_subcommand("run-all", "synth + evaluate + report in one go");
    runall->add_option("--config", config_path, "flat key=value config file");
    runall->add_option("--seed", seed, "master seed");
    runall->add_option("--out", out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) return run_synth(config_path, seed, out);
        if (pretrain->parsed()) return run_pretrain(data, config_path, seed, out);
        if (grader->parsed()) return run_train_grader(data, ae_path, config_path, seed, out);
        if (finetune->parsed())
            return run_finetune(data, ae_path, grader_path, config_path, seed, out);
        if (evaluate->parsed()) return run_evaluate(data, config_path, seed, out, ae_path);
        if (report->parsed()) return run_report(report_path, out);
        if (runall->parsed()) return run_all(config_path, seed, out);
    } catch (const StageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
