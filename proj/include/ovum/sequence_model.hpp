#pragma once

#include "ovum/autoencoder.hpp"
#include "ovum/nn/lstm.hpp"
#include "ovum/nn/params.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace ovum {

/// Probability vector over panel grades 1..5; sums to 1 within 1e-9.
struct GradeDistribution {
    std::array<double, 5> probs{};
};

/// Empirical histogram of the five panel votes.
GradeDistribution panel_to_distribution(const std::array<int, 5>& grades);

enum class HeadKind { Grade, Binary };
enum class TransferPolicy { HeadOnly, FullFinetune };

TransferPolicy transfer_policy_from_name(const std::string& name);
std::string transfer_policy_name(TransferPolicy policy);

/// LSTM trunk over per-frame embeddings with exactly one head attached: a
/// 5-way grade-distribution head or a binary implantation head. The head
/// reads the final hidden state h_T.
struct SequenceModel {
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 0;
    HeadKind head = HeadKind::Grade;
    nn::ParameterStore trunk;       // LSTM gate parameters
    nn::ParameterStore head_params; // head_w [K,U], head_b [K]
};

SequenceModel make_sequence_model(std::size_t input_dim, std::size_t hidden_dim,
                                  HeadKind head, std::uint64_t seed);

struct ImplantationPrediction {
    double probability = 0.0; // in [0,1]
};

struct GradedVideo {
    std::vector<FrameEmbedding> embeddings;
    GradeDistribution target;
};

struct LabeledVideo {
    std::vector<FrameEmbedding> embeddings;
    int label = 0; // 1 = implanted
};

struct SeqTrainConfig {
    std::size_t epochs = 15;
    std::size_t batch_size = 8;
    double lr = 3e-3;
    std::size_t hidden_dim = 64;
    double trunk_lr_scale = 0.1; // full-finetune trains the trunk at lr * this
    std::uint64_t seed = 0;
};

struct SeqTrainResult {
    SequenceModel model;
    std::vector<double> loss_history; // mean loss per epoch
};

/// Trains trunk + grade head against panel grade distributions with
/// softmax cross-entropy. Deterministic in cfg.seed.
SeqTrainResult train_grade_model(const std::vector<GradedVideo>& data,
                                 const SeqTrainConfig& cfg);

GradeDistribution predict_grades(const SequenceModel& model,
                                 const std::vector<FrameEmbedding>& embeddings);

/// Re-heads a trained grade model with a fresh binary head and trains it on
/// implantation labels. Head-only leaves the trunk bit-identical; full
/// finetune trains it at a reduced learning rate. Positive examples are
/// weighted n_neg/n_pos in the loss to counter class imbalance.
SeqTrainResult transfer_binary_head(const SequenceModel& grade_model,
                                    const std::vector<LabeledVideo>& data,
                                    TransferPolicy policy, const SeqTrainConfig& cfg);

ImplantationPrediction predict_implantation(const SequenceModel& model,
                                            const std::vector<FrameEmbedding>& embeddings);

/// Loss and gradients for one labeled video; exposed for gradient-flow checks.
struct BinaryGrads {
    nn::GradientMap trunk;
    nn::GradientMap head;
    double loss = 0.0;
};

BinaryGrads binary_backward(const SequenceModel& model, const LabeledVideo& video,
                            double pos_weight);

} // namespace ovum
