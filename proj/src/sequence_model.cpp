#include "ovum/sequence_model.hpp"

#include "ovum/errors.hpp"
#include "ovum/nn/losses.hpp"
#include "ovum/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ovum {

namespace {

constexpr const char* kHeadWeight = "head_w";
constexpr const char* kHeadBias = "head_b";

std::vector<Tensor> embedding_tensors(const std::vector<FrameEmbedding>& embeddings,
                                      std::size_t expected_dim) {
    if (embeddings.empty()) throw ValueError("sequence model: empty embedding list");
    std::vector<Tensor> xs;
    xs.reserve(embeddings.size());
    for (const FrameEmbedding& e : embeddings) {
        if (e.vec.size() != expected_dim) {
            throw ShapeError("embedding size " + std::to_string(e.vec.size()) +
                             " does not match model input_dim " +
                             std::to_string(expected_dim));
        }
        xs.push_back(e.vec);
    }
    return xs;
}

nn::ParameterStore clone_values(const nn::ParameterStore& src) {
    nn::ParameterStore out;
    for (const auto& [name, st] : src) out.add(name, st.value);
    return out;
}

struct ForwardCache {
    nn::LstmSequenceCache lstm;
    Tensor h_final;
    Tensor logits;
};

Tensor forward_logits(const SequenceModel& model, const std::vector<FrameEmbedding>& embeddings,
                      ForwardCache* cache) {
    const std::vector<Tensor> xs = embedding_tensors(embeddings, model.input_dim);
    nn::LstmState state =
        nn::lstm_forward(xs, model.trunk, cache ? &cache->lstm : nullptr);
    Tensor logits = nn::dense(state.h, model.head_params.value(kHeadWeight),
                              model.head_params.value(kHeadBias));
    if (cache) {
        cache->h_final = state.h;
        cache->logits = logits;
    }
    return logits;
}

/// Pushes a gradient on the logits down through head and trunk.
void backward_from_logits(const SequenceModel& model, const ForwardCache& cache,
                          const Tensor& grad_logits, nn::GradientMap& trunk_grads,
                          nn::GradientMap& head_grads) {
    nn::DenseGrads hg = nn::dense_backward(grad_logits, cache.h_final,
                                           model.head_params.value(kHeadWeight));
    nn::accumulate_grad(head_grads, kHeadWeight, hg.grad_weight);
    nn::accumulate_grad(head_grads, kHeadBias, hg.grad_bias);
    nn::GradientMap tg = nn::lstm_backward(hg.grad_input, cache.lstm, model.trunk);
    for (const auto& [name, g] : tg) nn::accumulate_grad(trunk_grads, name, g);
}

} // namespace

GradeDistribution panel_to_distribution(const std::array<int, 5>& grades) {
    GradeDistribution dist;
    for (int g : grades) {
        if (g < 1 || g > 5) {
            throw ValueError("panel grade " + std::to_string(g) + " outside 1..5");
        }
        dist.probs[static_cast<std::size_t>(g - 1)] += 0.2;
    }
    return dist;
}

TransferPolicy transfer_policy_from_name(const std::string& name) {
    if (name == "head-only") return TransferPolicy::HeadOnly;
    if (name == "full-finetune") return TransferPolicy::FullFinetune;
    throw ConfigError("unknown transfer policy '" + name +
                      "' (expected head-only or full-finetune)");
}

std::string transfer_policy_name(TransferPolicy policy) {
    return policy == TransferPolicy::HeadOnly ? "head-only" : "full-finetune";
}

SequenceModel make_sequence_model(std::size_t input_dim, std::size_t hidden_dim,
                                  HeadKind head, std::uint64_t seed) {
    if (input_dim == 0 || hidden_dim == 0) {
        throw ValueError("sequence model dims must be positive");
    }
    SequenceModel model;
    model.input_dim = input_dim;
    model.hidden_dim = hidden_dim;
    model.head = head;
    Rng rng = make_rng(seed);
    model.trunk = nn::make_lstm_params(input_dim, hidden_dim, rng);
    const std::size_t k = head == HeadKind::Grade ? 5 : 1;
    model.head_params.add(kHeadWeight,
                          nn::glorot_uniform({k, hidden_dim}, hidden_dim, k, rng));
    model.head_params.add(kHeadBias, Tensor({k}));
    return model;
}

GradeDistribution predict_grades(const SequenceModel& model,
                                 const std::vector<FrameEmbedding>& embeddings) {
    if (model.head != HeadKind::Grade) {
        throw HeadError("predict_grades: model has the wrong head (binary)");
    }
    const Tensor probs = nn::softmax(forward_logits(model, embeddings, nullptr));
    GradeDistribution dist;
    for (std::size_t i = 0; i < 5; ++i) dist.probs[i] = probs[i];
    return dist;
}

ImplantationPrediction predict_implantation(const SequenceModel& model,
                                            const std::vector<FrameEmbedding>& embeddings) {
    if (model.head != HeadKind::Binary) {
        throw HeadError("predict_implantation: model has the wrong head (grade)");
    }
    const Tensor logits = forward_logits(model, embeddings, nullptr);
    return ImplantationPrediction{nn::sigmoid(logits[0])};
}

SeqTrainResult train_grade_model(const std::vector<GradedVideo>& data,
                                 const SeqTrainConfig& cfg) {
    if (data.empty()) throw ValueError("train_grade_model: empty training set");
    if (cfg.batch_size == 0) throw ValueError("train_grade_model: batch_size must be positive");
    const std::size_t input_dim = data.front().embeddings.empty()
                                      ? 0
                                      : data.front().embeddings.front().vec.size();
    if (input_dim == 0) throw ValueError("train_grade_model: first video has no embeddings");

    SeqTrainResult result;
    result.model = make_sequence_model(input_dim, cfg.hidden_dim, HeadKind::Grade,
                                       derive_seed(cfg.seed, 0x67726164u /* "grad" */));
    SequenceModel& model = result.model;

    nn::AdamConfig adam;
    adam.lr = cfg.lr;
    Rng shuffle_rng = make_rng(cfg.seed, 0x67736875u);

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(start + cfg.batch_size, order.size());
            const double inv = 1.0 / static_cast<double>(end - start);
            nn::GradientMap trunk_grads, head_grads;
            for (std::size_t j = start; j < end; ++j) {
                const GradedVideo& video = data[order[j]];
                ForwardCache cache;
                forward_logits(model, video.embeddings, &cache);
                Tensor target({5}, {video.target.probs[0], video.target.probs[1],
                                    video.target.probs[2], video.target.probs[3],
                                    video.target.probs[4]});
                nn::LossValue loss = nn::softmax_cross_entropy(cache.logits, target);
                epoch_loss += loss.value;
                for (double& g : loss.gradient.values()) g *= inv;
                backward_from_logits(model, cache, loss.gradient, trunk_grads, head_grads);
            }
            adam_step(model.trunk, trunk_grads, adam);
            adam_step(model.head_params, head_grads, adam);
        }
        result.loss_history.push_back(epoch_loss / static_cast<double>(data.size()));
    }
    return result;
}

BinaryGrads binary_backward(const SequenceModel& model, const LabeledVideo& video,
                            double pos_weight) {
    BinaryGrads out;
    ForwardCache cache;
    forward_logits(model, video.embeddings, &cache);
    nn::LossValue loss = nn::binary_cross_entropy(cache.logits[0], video.label);
    const double w = video.label == 1 ? pos_weight : 1.0;
    out.loss = w * loss.value;
    Tensor grad_logits({1}, {w * loss.gradient[0]});
    backward_from_logits(model, cache, grad_logits, out.trunk, out.head);
    return out;
}

SeqTrainResult transfer_binary_head(const SequenceModel& grade_model,
                                    const std::vector<LabeledVideo>& data,
                                    TransferPolicy policy, const SeqTrainConfig& cfg) {
    if (data.empty()) throw ValueError("transfer_binary_head: empty training set");
    std::size_t n_pos = 0, n_neg = 0;
    for (const LabeledVideo& v : data) (v.label == 1 ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0) {
        throw ValueError("transfer_binary_head: training data is single-class (" +
                         std::to_string(n_pos) + " positive / " + std::to_string(n_neg) +
                         " negative); the loss is degenerate");
    }
    const double pos_weight = static_cast<double>(n_neg) / static_cast<double>(n_pos);

    SeqTrainResult result;
    SequenceModel& model = result.model;
    model.input_dim = grade_model.input_dim;
    model.hidden_dim = grade_model.hidden_dim;
    model.head = HeadKind::Binary;
    model.trunk = clone_values(grade_model.trunk); // fresh optimizer state
    Rng head_rng = make_rng(cfg.seed, 0x62696eu /* "bin" */);
    model.head_params.add(kHeadWeight,
                          nn::glorot_uniform({1, model.hidden_dim}, model.hidden_dim, 1,
                                             head_rng));
    model.head_params.add(kHeadBias, Tensor({1}));

    nn::AdamConfig head_adam;
    head_adam.lr = cfg.lr;
    nn::AdamConfig trunk_adam;
    trunk_adam.lr = cfg.lr * cfg.trunk_lr_scale;

    Rng shuffle_rng = make_rng(cfg.seed, 0x62736875u);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(start + cfg.batch_size, order.size());
            const double inv = 1.0 / static_cast<double>(end - start);
            nn::GradientMap trunk_grads, head_grads;
            for (std::size_t j = start; j < end; ++j) {
                BinaryGrads g = binary_backward(model, data[order[j]], pos_weight);
                epoch_loss += g.loss;
                for (const auto& [name, grad] : g.head) {
                    nn::accumulate_grad(head_grads, name, grad, inv);
                }
                if (policy == TransferPolicy::FullFinetune) {
                    for (const auto& [name, grad] : g.trunk) {
                        nn::accumulate_grad(trunk_grads, name, grad, inv);
                    }
                }
            }
            adam_step(model.head_params, head_grads, head_adam);
            if (policy == TransferPolicy::FullFinetune) {
                adam_step(model.trunk, trunk_grads, trunk_adam);
            }
        }
        result.loss_history.push_back(epoch_loss / static_cast<double>(data.size()));
    }
    return result;
}

} // namespace ovum
