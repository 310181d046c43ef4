#pragma once

#include "ovum/tensor.hpp"

#include <utility>

namespace ovum::nn {

// ---------------------------------------------------------------------------
// Convolution. Input [C_in, H, W], kernel [C_out, C_in, kH, kW]. Output size
// H' = floor((H + 2*padding - kH)/stride) + 1, same for W'. Borders are
// zero-padded; each output element is the cross-correlation sum over its
// receptive field.
// ---------------------------------------------------------------------------

Tensor conv2d(const Tensor& input, const Tensor& kernel, std::size_t stride,
              std::size_t padding);

struct Conv2dGrads {
    Tensor grad_input;
    Tensor grad_kernel;
};

/// Exact partial derivatives of sum(grad_out * conv2d(input, kernel)).
Conv2dGrads conv2d_backward(const Tensor& grad_out, const Tensor& input,
                            const Tensor& kernel, std::size_t stride,
                            std::size_t padding);

/// Adjoint of conv2d with the same geometry: maps a [C_out, H', W'] tensor
/// back to out_shape = [C_in, H, W]. Used as the decoder's upsampling layer.
Tensor conv2d_transpose(const Tensor& input, const Tensor& kernel, std::size_t stride,
                        std::size_t padding, const std::vector<std::size_t>& out_shape);

Conv2dGrads conv2d_transpose_backward(const Tensor& grad_out, const Tensor& input,
                                      const Tensor& kernel, std::size_t stride,
                                      std::size_t padding);

// ---------------------------------------------------------------------------
// Dense (fully connected): y = W x + b with W [n_out, n_in], b [n_out].
// ---------------------------------------------------------------------------

Tensor dense(const Tensor& input, const Tensor& weight, const Tensor& bias);

struct DenseGrads {
    Tensor grad_input;
    Tensor grad_weight;
    Tensor grad_bias;
};

DenseGrads dense_backward(const Tensor& grad_out, const Tensor& input,
                          const Tensor& weight);

// ---------------------------------------------------------------------------
// Average pooling over non-overlapping-or-strided square windows.
// ---------------------------------------------------------------------------

Tensor avg_pool2d(const Tensor& input, std::size_t window, std::size_t stride);

Tensor avg_pool2d_backward(const Tensor& grad_out, const std::vector<std::size_t>& in_shape,
                           std::size_t window, std::size_t stride);

/// Nearest-neighbor upsampling to an explicit [C,H,W] target; the decoder-side
/// mirror of average pooling. Source index is clamped when factor*in < out.
Tensor upsample_repeat(const Tensor& input, std::size_t factor,
                       const std::vector<std::size_t>& out_shape);

Tensor upsample_repeat_backward(const Tensor& grad_out, std::size_t factor,
                                const std::vector<std::size_t>& in_shape);

// ---------------------------------------------------------------------------
// Per-channel bias for conv feature maps: out[c,h,w] = in[c,h,w] + bias[c].
// ---------------------------------------------------------------------------

Tensor channel_bias(const Tensor& input, const Tensor& bias);
Tensor channel_bias_backward(const Tensor& grad_out);

// ---------------------------------------------------------------------------
// Elementwise activations.
// ---------------------------------------------------------------------------

double sigmoid(double x);

Tensor relu(const Tensor& x);
Tensor relu_backward(const Tensor& grad_out, const Tensor& x);

Tensor sigmoid(const Tensor& x);
/// Derivative expressed through the forward output y = sigmoid(x).
Tensor sigmoid_backward(const Tensor& grad_out, const Tensor& y);

Tensor tanh(const Tensor& x);
Tensor tanh_backward(const Tensor& grad_out, const Tensor& y);

/// Numerically stabilized softmax over a vector of logits.
Tensor softmax(const Tensor& logits);

} // namespace ovum::nn
