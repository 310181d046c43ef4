#include "ovum/autoencoder.hpp"

#include "ovum/errors.hpp"
#include "ovum/nn/losses.hpp"
#include "ovum/nn/ops.hpp"

#include <algorithm>
#include <numeric>

namespace ovum {

namespace {

std::string enc_weight(std::size_t i) { return "enc" + std::to_string(i) + "_w"; }
std::string enc_bias(std::size_t i) { return "enc" + std::to_string(i) + "_b"; }
std::string dec_weight(std::size_t i) { return "dec" + std::to_string(i) + "_w"; }
std::string dec_bias(std::size_t i) { return "dec" + std::to_string(i) + "_b"; }

std::string layer_kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::Conv: return "conv";
        case LayerKind::Pool: return "pool";
        case LayerKind::Flatten: return "flatten";
        case LayerKind::Dense: return "dense";
    }
    return "?";
}

std::size_t product(const std::vector<std::size_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           std::multiplies<>());
}

[[noreturn]] void bad_layer(std::size_t index, const LayerDesc& desc,
                            const std::string& why) {
    throw ConfigError("encoder layer " + std::to_string(index) + " (" +
                      layer_kind_name(desc.kind) + "): " + why);
}

} // namespace

EncoderSpec desk_encoder_spec() {
    EncoderSpec spec;
    spec.frame_size = 32;
    spec.embedding_dim = 32;
    spec.layers = {
        LayerDesc::conv(8, 3, 2, 1),
        LayerDesc::conv(16, 3, 2, 1),
        LayerDesc::conv(32, 3, 2, 1),
        LayerDesc::flatten(),
        LayerDesc::dense(32),
    };
    return spec;
}

EncoderSpec full_scale_encoder_spec() {
    EncoderSpec spec;
    spec.frame_size = 256;
    spec.embedding_dim = 968;
    spec.layers = {
        LayerDesc::conv(8, 3, 2, 1),   // 128
        LayerDesc::conv(16, 3, 2, 1),  // 64
        LayerDesc::conv(32, 3, 2, 1),  // 32
        LayerDesc::conv(64, 3, 2, 1),  // 16
        LayerDesc::conv(64, 3, 2, 1),  // 8
        LayerDesc::pool(2),            // 4
        LayerDesc::conv(128, 3, 1, 1), // 4
        LayerDesc::conv(128, 3, 1, 1), // 4
        LayerDesc::flatten(),          // 2048
        LayerDesc::dense(968),
    };
    return spec;
}

std::vector<PlannedLayer> plan_encoder(const EncoderSpec& spec) {
    if (spec.layers.empty()) throw ConfigError("encoder spec has no layers");
    if (spec.frame_size == 0 || spec.embedding_dim == 0) {
        throw ConfigError("encoder spec needs positive frame_size and embedding_dim");
    }
    std::vector<std::size_t> shape{1, spec.frame_size, spec.frame_size};
    std::vector<PlannedLayer> plan;
    plan.reserve(spec.layers.size());

    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerDesc& d = spec.layers[i];
        PlannedLayer pl{d, shape, {}};
        switch (d.kind) {
            case LayerKind::Conv: {
                if (shape.size() != 3) bad_layer(i, d, "expects a [C,H,W] input");
                if (d.channels == 0 || d.kernel == 0 || d.stride == 0) {
                    bad_layer(i, d, "needs positive channels/kernel/stride");
                }
                const std::size_t h = shape[1], w = shape[2];
                if (d.kernel > h + 2 * d.padding || d.kernel > w + 2 * d.padding) {
                    bad_layer(i, d, "kernel larger than padded input " + shape_to_string(shape));
                }
                pl.out_shape = {d.channels, (h + 2 * d.padding - d.kernel) / d.stride + 1,
                                (w + 2 * d.padding - d.kernel) / d.stride + 1};
                break;
            }
            case LayerKind::Pool: {
                if (shape.size() != 3) bad_layer(i, d, "expects a [C,H,W] input");
                if (d.kernel == 0 || d.stride != d.kernel) {
                    bad_layer(i, d, "needs window == stride > 0 so the decoder can mirror it");
                }
                if (d.kernel > shape[1] || d.kernel > shape[2]) {
                    bad_layer(i, d, "window larger than input " + shape_to_string(shape));
                }
                pl.out_shape = {shape[0], (shape[1] - d.kernel) / d.stride + 1,
                                (shape[2] - d.kernel) / d.stride + 1};
                break;
            }
            case LayerKind::Flatten: {
                if (shape.size() < 2) bad_layer(i, d, "input already flat");
                pl.out_shape = {product(shape)};
                break;
            }
            case LayerKind::Dense: {
                if (shape.size() != 1) bad_layer(i, d, "expects a flat input; add a flatten layer");
                if (d.units == 0) bad_layer(i, d, "needs positive units");
                pl.out_shape = {d.units};
                break;
            }
        }
        shape = pl.out_shape;
        plan.push_back(std::move(pl));
    }

    if (shape.size() != 1 || shape[0] != spec.embedding_dim) {
        const std::size_t last = spec.layers.size() - 1;
        bad_layer(last, spec.layers[last],
                  "chain ends at " + shape_to_string(shape) + ", expected [" +
                      std::to_string(spec.embedding_dim) + "]");
    }
    return plan;
}

namespace {

std::vector<PlannedDecoderLayer> plan_decoder(const std::vector<PlannedLayer>& encoder) {
    std::vector<PlannedDecoderLayer> plan;
    plan.reserve(encoder.size());
    for (auto it = encoder.rbegin(); it != encoder.rend(); ++it) {
        PlannedDecoderLayer dl;
        dl.src = it->desc;
        dl.in_shape = it->out_shape;
        dl.out_shape = it->in_shape;
        switch (it->desc.kind) {
            case LayerKind::Conv: dl.kind = DecoderKind::Deconv; break;
            case LayerKind::Pool: dl.kind = DecoderKind::Upsample; break;
            case LayerKind::Flatten: dl.kind = DecoderKind::Reshape; break;
            case LayerKind::Dense: dl.kind = DecoderKind::Dense; break;
        }
        plan.push_back(std::move(dl));
    }
    return plan;
}

} // namespace

Autoencoder build_autoencoder(const EncoderSpec& spec, std::uint64_t seed) {
    Autoencoder model;
    model.spec = spec;
    model.encoder = plan_encoder(spec);
    model.decoder = plan_decoder(model.encoder);

    Rng rng = make_rng(seed);
    for (std::size_t i = 0; i < model.encoder.size(); ++i) {
        const PlannedLayer& pl = model.encoder[i];
        if (pl.desc.kind == LayerKind::Conv) {
            const std::size_t c_in = pl.in_shape[0];
            const std::size_t k = pl.desc.kernel;
            model.params.add(enc_weight(i),
                             nn::glorot_uniform({pl.desc.channels, c_in, k, k},
                                                c_in * k * k, pl.desc.channels * k * k, rng));
            model.params.add(enc_bias(i), Tensor({pl.desc.channels}));
        } else if (pl.desc.kind == LayerKind::Dense) {
            const std::size_t n_in = pl.in_shape[0];
            model.params.add(enc_weight(i),
                             nn::glorot_uniform({pl.desc.units, n_in}, n_in, pl.desc.units, rng));
            model.params.add(enc_bias(i), Tensor({pl.desc.units}));
        }
    }
    for (std::size_t i = 0; i < model.decoder.size(); ++i) {
        const PlannedDecoderLayer& dl = model.decoder[i];
        if (dl.kind == DecoderKind::Deconv) {
            const std::size_t c_in = dl.in_shape[0];  // feature side
            const std::size_t c_out = dl.out_shape[0];
            const std::size_t k = dl.src.kernel;
            model.params.add(dec_weight(i),
                             nn::glorot_uniform({c_in, c_out, k, k}, c_in * k * k,
                                                c_out * k * k, rng));
            model.params.add(dec_bias(i), Tensor({c_out}));
        } else if (dl.kind == DecoderKind::Dense) {
            const std::size_t n_in = dl.in_shape[0];
            const std::size_t n_out = dl.out_shape[0];
            model.params.add(dec_weight(i),
                             nn::glorot_uniform({n_out, n_in}, n_in, n_out, rng));
            model.params.add(dec_bias(i), Tensor({n_out}));
        }
    }
    return model;
}

namespace {

/// Per-layer inputs and pre-activations kept for the backward pass.
struct AeCache {
    std::vector<Tensor> enc_in;
    std::vector<Tensor> enc_pre;
    std::vector<Tensor> dec_in;
    std::vector<Tensor> dec_pre;
    Tensor embedding;
    Tensor reconstruction;
};

void check_frame_shape(const Autoencoder& model, const Frame& frame) {
    const std::vector<std::size_t> expect{1, model.spec.frame_size, model.spec.frame_size};
    if (frame.pixels.shape() != expect) {
        throw ShapeError("frame shape " + shape_to_string(frame.pixels.shape()) +
                         " does not match encoder spec " + shape_to_string(expect));
    }
}

Tensor run_encoder(const Autoencoder& model, const Frame& frame, AeCache* cache) {
    Tensor x = frame.pixels;
    for (std::size_t i = 0; i < model.encoder.size(); ++i) {
        const PlannedLayer& pl = model.encoder[i];
        if (cache) cache->enc_in.push_back(x);
        const bool last = i + 1 == model.encoder.size();
        switch (pl.desc.kind) {
            case LayerKind::Conv: {
                Tensor z = nn::channel_bias(
                    nn::conv2d(x, model.params.value(enc_weight(i)), pl.desc.stride,
                               pl.desc.padding),
                    model.params.value(enc_bias(i)));
                if (cache) cache->enc_pre.push_back(z);
                x = nn::relu(z);
                break;
            }
            case LayerKind::Pool:
                x = nn::avg_pool2d(x, pl.desc.kernel, pl.desc.stride);
                if (cache) cache->enc_pre.push_back(Tensor{});
                break;
            case LayerKind::Flatten:
                x = x.reshaped(pl.out_shape);
                if (cache) cache->enc_pre.push_back(Tensor{});
                break;
            case LayerKind::Dense: {
                Tensor z = nn::dense(x, model.params.value(enc_weight(i)),
                                     model.params.value(enc_bias(i)));
                if (cache) cache->enc_pre.push_back(z);
                x = last ? z : nn::relu(z); // embedding layer stays linear
                break;
            }
        }
    }
    return x;
}

Tensor run_decoder(const Autoencoder& model, const Tensor& embedding, AeCache* cache) {
    Tensor x = embedding;
    for (std::size_t i = 0; i < model.decoder.size(); ++i) {
        const PlannedDecoderLayer& dl = model.decoder[i];
        if (cache) cache->dec_in.push_back(x);
        const bool last = i + 1 == model.decoder.size();
        switch (dl.kind) {
            case DecoderKind::Dense: {
                Tensor z = nn::dense(x, model.params.value(dec_weight(i)),
                                     model.params.value(dec_bias(i)));
                if (cache) cache->dec_pre.push_back(z);
                x = last ? nn::sigmoid(z) : nn::relu(z);
                break;
            }
            case DecoderKind::Reshape:
                x = x.reshaped(dl.out_shape);
                if (cache) cache->dec_pre.push_back(Tensor{});
                break;
            case DecoderKind::Upsample:
                x = nn::upsample_repeat(x, dl.src.kernel, dl.out_shape);
                if (cache) cache->dec_pre.push_back(Tensor{});
                break;
            case DecoderKind::Deconv: {
                Tensor z = nn::channel_bias(
                    nn::conv2d_transpose(x, model.params.value(dec_weight(i)), dl.src.stride,
                                         dl.src.padding, dl.out_shape),
                    model.params.value(dec_bias(i)));
                if (cache) cache->dec_pre.push_back(z);
                x = last ? nn::sigmoid(z) : nn::relu(z);
                break;
            }
        }
    }
    return x;
}

/// grad_recon is d(loss)/d(reconstruction) after the final activation.
nn::GradientMap ae_backward(const Autoencoder& model, const AeCache& cache,
                            const Tensor& grad_recon) {
    nn::GradientMap grads;
    Tensor g = grad_recon;

    for (std::size_t i = model.decoder.size(); i-- > 0;) {
        const PlannedDecoderLayer& dl = model.decoder[i];
        const bool last = i + 1 == model.decoder.size();
        switch (dl.kind) {
            case DecoderKind::Dense: {
                Tensor dz = last ? nn::sigmoid_backward(g, cache.reconstruction)
                                 : nn::relu_backward(g, cache.dec_pre[i]);
                nn::DenseGrads dg =
                    nn::dense_backward(dz, cache.dec_in[i], model.params.value(dec_weight(i)));
                nn::accumulate_grad(grads, dec_weight(i), dg.grad_weight);
                nn::accumulate_grad(grads, dec_bias(i), dg.grad_bias);
                g = std::move(dg.grad_input);
                break;
            }
            case DecoderKind::Reshape:
                g = g.reshaped(dl.in_shape);
                break;
            case DecoderKind::Upsample:
                g = nn::upsample_repeat_backward(g, dl.src.kernel, dl.in_shape);
                break;
            case DecoderKind::Deconv: {
                Tensor dz = last ? nn::sigmoid_backward(g, cache.reconstruction)
                                 : nn::relu_backward(g, cache.dec_pre[i]);
                nn::accumulate_grad(grads, dec_bias(i), nn::channel_bias_backward(dz));
                nn::Conv2dGrads cg = nn::conv2d_transpose_backward(
                    dz, cache.dec_in[i], model.params.value(dec_weight(i)), dl.src.stride,
                    dl.src.padding);
                nn::accumulate_grad(grads, dec_weight(i), cg.grad_kernel);
                g = std::move(cg.grad_input);
                break;
            }
        }
    }

    for (std::size_t i = model.encoder.size(); i-- > 0;) {
        const PlannedLayer& pl = model.encoder[i];
        const bool last = i + 1 == model.encoder.size();
        switch (pl.desc.kind) {
            case LayerKind::Conv: {
                Tensor dz = nn::relu_backward(g, cache.enc_pre[i]);
                nn::accumulate_grad(grads, enc_bias(i), nn::channel_bias_backward(dz));
                nn::Conv2dGrads cg =
                    nn::conv2d_backward(dz, cache.enc_in[i], model.params.value(enc_weight(i)),
                                        pl.desc.stride, pl.desc.padding);
                nn::accumulate_grad(grads, enc_weight(i), cg.grad_kernel);
                g = std::move(cg.grad_input);
                break;
            }
            case LayerKind::Pool:
                g = nn::avg_pool2d_backward(g, pl.in_shape, pl.desc.kernel, pl.desc.stride);
                break;
            case LayerKind::Flatten:
                g = g.reshaped(pl.in_shape);
                break;
            case LayerKind::Dense: {
                Tensor dz = last ? g : nn::relu_backward(g, cache.enc_pre[i]);
                nn::DenseGrads dg =
                    nn::dense_backward(dz, cache.enc_in[i], model.params.value(enc_weight(i)));
                nn::accumulate_grad(grads, enc_weight(i), dg.grad_weight);
                nn::accumulate_grad(grads, enc_bias(i), dg.grad_bias);
                g = std::move(dg.grad_input);
                break;
            }
        }
    }
    return grads;
}

} // namespace

FrameEmbedding encode_frame(const Autoencoder& model, const Frame& frame) {
    check_frame_shape(model, frame);
    Tensor emb = run_encoder(model, frame, nullptr);
    if (!emb.all_finite()) {
        throw ValueError("encoder produced a non-finite embedding");
    }
    return FrameEmbedding{std::move(emb)};
}

std::vector<FrameEmbedding> embed_video(const Autoencoder& model,
                                        const std::vector<Frame>& frames) {
    if (frames.empty()) throw ValueError("embed_video: empty frame list");
    std::vector<FrameEmbedding> out;
    out.reserve(frames.size());
    for (const Frame& f : frames) out.push_back(encode_frame(model, f));
    return out;
}

Tensor reconstruct(const Autoencoder& model, const Frame& frame) {
    check_frame_shape(model, frame);
    return run_decoder(model, run_encoder(model, frame, nullptr), nullptr);
}

AeTrainResult train_autoencoder(Autoencoder model, const std::vector<Frame>& frames,
                                const AeTrainConfig& cfg) {
    if (frames.empty()) throw ValueError("train_autoencoder: empty frame list");
    for (const Frame& f : frames) check_frame_shape(model, f);
    if (cfg.batch_size == 0) throw ValueError("train_autoencoder: batch_size must be positive");

    AeTrainResult result;
    Rng shuffle_rng = make_rng(cfg.seed, 0x4145u /* "AE" */);
    nn::AdamConfig adam;
    adam.lr = cfg.lr;

    std::vector<std::size_t> order(frames.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(start + cfg.batch_size, order.size());
            const double inv = 1.0 / static_cast<double>(end - start);
            nn::GradientMap batch_grads;
            for (std::size_t j = start; j < end; ++j) {
                const Frame& frame = frames[order[j]];
                AeCache cache;
                cache.embedding = run_encoder(model, frame, &cache);
                cache.reconstruction = run_decoder(model, cache.embedding, &cache);
                nn::LossValue loss = nn::l2_loss(cache.reconstruction, frame.pixels);
                epoch_loss += loss.value;
                nn::GradientMap g = ae_backward(model, cache, loss.gradient);
                for (const auto& [name, grad] : g) {
                    nn::accumulate_grad(batch_grads, name, grad, inv);
                }
            }
            adam_step(model.params, batch_grads, adam);
        }
        result.loss_history.push_back(epoch_loss / static_cast<double>(frames.size()));
    }
    result.model = std::move(model);
    return result;
}

} // namespace ovum
