#pragma once

#include "ovum/tensor.hpp"

namespace ovum::nn {

/// Scalar loss plus its gradient w.r.t. the prediction.
struct LossValue {
    double value = 0.0;
    Tensor gradient;
};

/// Mean squared error: mean((pred - target)^2). Mean reduction keeps learning
/// rates independent of frame resolution.
LossValue l2_loss(const Tensor& pred, const Tensor& target);

/// Cross-entropy of softmax(logits) against a probability vector target.
/// Gradient w.r.t. logits is softmax(logits) - target.
LossValue softmax_cross_entropy(const Tensor& logits, const Tensor& target);

/// Binary cross-entropy on a single logit; stabilized so it stays finite for
/// |logit| up to at least 500. Gradient is w.r.t. the logit.
LossValue binary_cross_entropy(double logit, int label);

} // namespace ovum::nn
