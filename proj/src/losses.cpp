#include "ovum/nn/losses.hpp"

#include "ovum/errors.hpp"
#include "ovum/nn/ops.hpp"

#include <cmath>

namespace ovum::nn {

LossValue l2_loss(const Tensor& pred, const Tensor& target) {
    require_same_shape(pred, target, "l2_loss");
    const std::size_t n = pred.size();
    LossValue loss;
    loss.gradient = Tensor(pred.shape());
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = pred[i] - target[i];
        sum += d * d;
        loss.gradient[i] = 2.0 * d / static_cast<double>(n);
    }
    loss.value = sum / static_cast<double>(n);
    return loss;
}

LossValue softmax_cross_entropy(const Tensor& logits, const Tensor& target) {
    require_same_shape(logits, target, "softmax_cross_entropy");
    double sum = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        if (target[i] < 0.0) {
            throw ValueError("softmax_cross_entropy target has negative entry " +
                             std::to_string(target[i]));
        }
        sum += target[i];
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ValueError("softmax_cross_entropy target sums to " + std::to_string(sum) +
                         ", expected 1 within 1e-9");
    }

    // log-softmax via the max-shifted log-sum-exp
    double max = logits[0];
    for (std::size_t i = 1; i < logits.size(); ++i) max = std::max(max, logits[i]);
    double lse = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) lse += std::exp(logits[i] - max);
    lse = std::log(lse) + max;

    LossValue loss;
    loss.gradient = softmax(logits);
    loss.value = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (target[i] > 0.0) loss.value -= target[i] * (logits[i] - lse);
        loss.gradient[i] -= target[i];
    }
    return loss;
}

LossValue binary_cross_entropy(double logit, int label) {
    if (label != 0 && label != 1) {
        throw ValueError("binary_cross_entropy label must be 0 or 1, got " +
                         std::to_string(label));
    }
    // -[y log p + (1-y) log(1-p)] = max(x,0) - x*y + log(1 + exp(-|x|))
    const double x = logit;
    const double y = static_cast<double>(label);
    LossValue loss;
    loss.value = std::max(x, 0.0) - x * y + std::log1p(std::exp(-std::abs(x)));
    loss.gradient = Tensor({1}, {sigmoid(x) - y});
    return loss;
}

} // namespace ovum::nn
