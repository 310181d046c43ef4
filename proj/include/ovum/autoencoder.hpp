#pragma once

#include "ovum/dataset.hpp"
#include "ovum/nn/params.hpp"
#include "ovum/tensor.hpp"

#include <cstdint>
#include <vector>

namespace ovum {

enum class LayerKind { Conv, Pool, Flatten, Dense };

/// One encoder layer descriptor. Conv layers use channels/kernel/stride/padding,
/// pool layers kernel==stride windows, dense layers units.
struct LayerDesc {
    LayerKind kind;
    std::size_t channels = 0;
    std::size_t kernel = 0;
    std::size_t stride = 1;
    std::size_t padding = 0;
    std::size_t units = 0;

    static LayerDesc conv(std::size_t channels, std::size_t kernel, std::size_t stride,
                          std::size_t padding) {
        return {LayerKind::Conv, channels, kernel, stride, padding, 0};
    }
    static LayerDesc pool(std::size_t window) {
        return {LayerKind::Pool, 0, window, window, 0, 0};
    }
    static LayerDesc flatten() { return {LayerKind::Flatten, 0, 0, 1, 0, 0}; }
    static LayerDesc dense(std::size_t units) {
        return {LayerKind::Dense, 0, 0, 1, 0, units};
    }
};

struct EncoderSpec {
    std::size_t frame_size = 32;
    std::size_t embedding_dim = 32;
    std::vector<LayerDesc> layers;

    std::size_t layer_count() const { return layers.size(); }
};

/// Small configuration used throughout CI: 32x32 frames, 32-d embedding.
EncoderSpec desk_encoder_spec();

/// Full-scale preset: 256x256 frames, 10 layers, 968-d embedding. Shipped as
/// configuration; too heavy to train in CI.
EncoderSpec full_scale_encoder_spec();

/// Encoder layer with resolved input/output shapes.
struct PlannedLayer {
    LayerDesc desc;
    std::vector<std::size_t> in_shape;
    std::vector<std::size_t> out_shape;
};

enum class DecoderKind { Dense, Reshape, Deconv, Upsample };

/// Decoder layer mirroring one encoder layer (transposed shapes).
struct PlannedDecoderLayer {
    DecoderKind kind;
    LayerDesc src;
    std::vector<std::size_t> in_shape;
    std::vector<std::size_t> out_shape;
};

/// Validates the layer chain against frame_size/embedding_dim; throws
/// ConfigError naming the offending layer.
std::vector<PlannedLayer> plan_encoder(const EncoderSpec& spec);

struct Autoencoder {
    EncoderSpec spec;
    std::vector<PlannedLayer> encoder;
    std::vector<PlannedDecoderLayer> decoder;
    nn::ParameterStore params;
};

/// Builds an autoencoder whose decoder mirrors the encoder; deterministic in seed.
Autoencoder build_autoencoder(const EncoderSpec& spec, std::uint64_t seed);

struct FrameEmbedding {
    Tensor vec;
};

/// Encoder output for one frame; pure function of (model, frame).
FrameEmbedding encode_frame(const Autoencoder& model, const Frame& frame);

/// One embedding per frame, order preserving.
std::vector<FrameEmbedding> embed_video(const Autoencoder& model,
                                        const std::vector<Frame>& frames);

/// Full encode+decode pass; output has the frame's shape with values in (0,1).
Tensor reconstruct(const Autoencoder& model, const Frame& frame);

struct AeTrainConfig {
    std::size_t epochs = 12;
    std::size_t batch_size = 16;
    double lr = 1e-3;
    std::uint64_t seed = 0;
};

struct AeTrainResult {
    Autoencoder model;
    std::vector<double> loss_history; // mean reconstruction L2 per epoch
};

/// Minibatch Adam training on the reconstruction L2. Deterministic in seed.
AeTrainResult train_autoencoder(Autoencoder model, const std::vector<Frame>& frames,
                                const AeTrainConfig& cfg);

} // namespace ovum
