#include "ovum/nn/ops.hpp"

#include "ovum/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ovum::nn {

namespace {

struct ConvGeometry {
    std::size_t c_in, h, w;
    std::size_t c_out, kh, kw;
    std::size_t h_out, w_out;
};

ConvGeometry conv_geometry(const std::vector<std::size_t>& in_shape,
                           const std::vector<std::size_t>& k_shape,
                           std::size_t stride, std::size_t padding) {
    if (in_shape.size() != 3) {
        throw ShapeError("conv2d input must be [C,H,W], got " + shape_to_string(in_shape));
    }
    if (k_shape.size() != 4) {
        throw ShapeError("conv2d kernel must be [C_out,C_in,kH,kW], got " +
                         shape_to_string(k_shape));
    }
    if (stride == 0) throw ValueError("conv2d stride must be positive");
    ConvGeometry g{};
    g.c_in = in_shape[0];
    g.h = in_shape[1];
    g.w = in_shape[2];
    g.c_out = k_shape[0];
    g.kh = k_shape[2];
    g.kw = k_shape[3];
    if (k_shape[1] != g.c_in) {
        throw ShapeError("conv2d channel mismatch: kernel " + shape_to_string(k_shape) +
                         " expects C_in=" + std::to_string(k_shape[1]) + ", input " +
                         shape_to_string(in_shape) + " has C_in=" + std::to_string(g.c_in));
    }
    if (g.kh > g.h + 2 * padding || g.kw > g.w + 2 * padding) {
        throw ShapeError("conv2d kernel " + shape_to_string(k_shape) +
                         " larger than padded input " + shape_to_string(in_shape));
    }
    g.h_out = (g.h + 2 * padding - g.kh) / stride + 1;
    g.w_out = (g.w + 2 * padding - g.kw) / stride + 1;
    return g;
}

} // namespace

Tensor conv2d(const Tensor& input, const Tensor& kernel, std::size_t stride,
              std::size_t padding) {
    const ConvGeometry g = conv_geometry(input.shape(), kernel.shape(), stride, padding);
    Tensor out({g.c_out, g.h_out, g.w_out});

    const double* x = input.data();
    const double* k = kernel.data();
    double* y = out.data();

    for (std::size_t oc = 0; oc < g.c_out; ++oc) {
        for (std::size_t oh = 0; oh < g.h_out; ++oh) {
            for (std::size_t ow = 0; ow < g.w_out; ++ow) {
                double sum = 0.0;
                for (std::size_t ic = 0; ic < g.c_in; ++ic) {
                    const double* xc = x + ic * g.h * g.w;
                    const double* kc = k + ((oc * g.c_in + ic) * g.kh) * g.kw;
                    for (std::size_t p = 0; p < g.kh; ++p) {
                        // signed arithmetic: padding can push indices negative
                        const long ih = static_cast<long>(oh * stride + p) -
                                        static_cast<long>(padding);
                        if (ih < 0 || ih >= static_cast<long>(g.h)) continue;
                        for (std::size_t q = 0; q < g.kw; ++q) {
                            const long iw = static_cast<long>(ow * stride + q) -
                                            static_cast<long>(padding);
                            if (iw < 0 || iw >= static_cast<long>(g.w)) continue;
                            sum += xc[ih * static_cast<long>(g.w) + iw] * kc[p * g.kw + q];
                        }
                    }
                }
                y[(oc * g.h_out + oh) * g.w_out + ow] = sum;
            }
        }
    }
    return out;
}

Conv2dGrads conv2d_backward(const Tensor& grad_out, const Tensor& input,
                            const Tensor& kernel, std::size_t stride,
                            std::size_t padding) {
    const ConvGeometry g = conv_geometry(input.shape(), kernel.shape(), stride, padding);
    const std::vector<std::size_t> expect{g.c_out, g.h_out, g.w_out};
    if (grad_out.shape() != expect) {
        throw ShapeError("conv2d_backward grad_out shape " + shape_to_string(grad_out.shape()) +
                         " does not match output shape " + shape_to_string(expect));
    }

    Conv2dGrads grads{Tensor(input.shape()), Tensor(kernel.shape())};
    const double* go = grad_out.data();
    const double* x = input.data();
    const double* k = kernel.data();
    double* gx = grads.grad_input.data();
    double* gk = grads.grad_kernel.data();

    for (std::size_t oc = 0; oc < g.c_out; ++oc) {
        for (std::size_t oh = 0; oh < g.h_out; ++oh) {
            for (std::size_t ow = 0; ow < g.w_out; ++ow) {
                const double gv = go[(oc * g.h_out + oh) * g.w_out + ow];
                if (gv == 0.0) continue;
                for (std::size_t ic = 0; ic < g.c_in; ++ic) {
                    const double* xc = x + ic * g.h * g.w;
                    double* gxc = gx + ic * g.h * g.w;
                    const std::size_t kbase = ((oc * g.c_in + ic) * g.kh) * g.kw;
                    for (std::size_t p = 0; p < g.kh; ++p) {
                        const long ih = static_cast<long>(oh * stride + p) -
                                        static_cast<long>(padding);
                        if (ih < 0 || ih >= static_cast<long>(g.h)) continue;
                        for (std::size_t q = 0; q < g.kw; ++q) {
                            const long iw = static_cast<long>(ow * stride + q) -
                                            static_cast<long>(padding);
                            if (iw < 0 || iw >= static_cast<long>(g.w)) continue;
                            const std::size_t xi = static_cast<std::size_t>(ih) * g.w +
                                                   static_cast<std::size_t>(iw);
                            gk[kbase + p * g.kw + q] += gv * xc[xi];
                            gxc[xi] += gv * k[kbase + p * g.kw + q];
                        }
                    }
                }
            }
        }
    }
    return grads;
}

Tensor conv2d_transpose(const Tensor& input, const Tensor& kernel, std::size_t stride,
                        std::size_t padding, const std::vector<std::size_t>& out_shape) {
    // y = C^T x where C is the conv2d operator going out_shape -> input.shape().
    const ConvGeometry g = conv_geometry(out_shape, kernel.shape(), stride, padding);
    const std::vector<std::size_t> expect{g.c_out, g.h_out, g.w_out};
    if (input.shape() != expect) {
        throw ShapeError("conv2d_transpose input shape " + shape_to_string(input.shape()) +
                         " inconsistent with target " + shape_to_string(out_shape) +
                         " (conv output would be " + shape_to_string(expect) + ")");
    }
    Tensor zero_in(out_shape);
    return conv2d_backward(input, zero_in, kernel, stride, padding).grad_input;
}

Conv2dGrads conv2d_transpose_backward(const Tensor& grad_out, const Tensor& input,
                                      const Tensor& kernel, std::size_t stride,
                                      std::size_t padding) {
    // Forward was y = C^T x, so dx = C dy and dK pairs dy (conv-input side)
    // with x (conv-output side).
    Conv2dGrads grads;
    grads.grad_input = conv2d(grad_out, kernel, stride, padding);
    require_same_shape(grads.grad_input, input, "conv2d_transpose_backward");
    grads.grad_kernel =
        conv2d_backward(input, grad_out, kernel, stride, padding).grad_kernel;
    return grads;
}

Tensor dense(const Tensor& input, const Tensor& weight, const Tensor& bias) {
    if (weight.rank() != 2) {
        throw ShapeError("dense weight must be [n_out,n_in], got " +
                         shape_to_string(weight.shape()));
    }
    const std::size_t n_out = weight.dim(0);
    const std::size_t n_in = weight.dim(1);
    if (input.size() != n_in) {
        throw ShapeError("dense input size " + std::to_string(input.size()) +
                         " does not match weight " + shape_to_string(weight.shape()));
    }
    if (bias.size() != n_out) {
        throw ShapeError("dense bias size " + std::to_string(bias.size()) +
                         " does not match weight " + shape_to_string(weight.shape()));
    }
    Tensor out({n_out});
    const double* x = input.data();
    const double* w = weight.data();
    for (std::size_t i = 0; i < n_out; ++i) {
        double sum = bias[i];
        const double* row = w + i * n_in;
        for (std::size_t j = 0; j < n_in; ++j) sum += row[j] * x[j];
        out[i] = sum;
    }
    return out;
}

DenseGrads dense_backward(const Tensor& grad_out, const Tensor& input,
                          const Tensor& weight) {
    const std::size_t n_out = weight.dim(0);
    const std::size_t n_in = weight.dim(1);
    if (grad_out.size() != n_out) {
        throw ShapeError("dense_backward grad_out size " + std::to_string(grad_out.size()) +
                         " does not match weight " + shape_to_string(weight.shape()));
    }
    DenseGrads g{Tensor(input.shape()), Tensor(weight.shape()), Tensor({n_out})};
    const double* go = grad_out.data();
    const double* x = input.data();
    const double* w = weight.data();
    double* gx = g.grad_input.data();
    double* gw = g.grad_weight.data();
    for (std::size_t i = 0; i < n_out; ++i) {
        const double gv = go[i];
        g.grad_bias[i] = gv;
        const double* row = w + i * n_in;
        double* grow = gw + i * n_in;
        for (std::size_t j = 0; j < n_in; ++j) {
            grow[j] = gv * x[j];
            gx[j] += gv * row[j];
        }
    }
    return g;
}

Tensor avg_pool2d(const Tensor& input, std::size_t window, std::size_t stride) {
    if (input.rank() != 3) {
        throw ShapeError("avg_pool2d input must be [C,H,W], got " +
                         shape_to_string(input.shape()));
    }
    if (window == 0 || stride == 0) throw ValueError("avg_pool2d window/stride must be positive");
    const std::size_t c = input.dim(0), h = input.dim(1), w = input.dim(2);
    if (window > h || window > w) {
        throw ShapeError("avg_pool2d window " + std::to_string(window) +
                         " larger than input " + shape_to_string(input.shape()));
    }
    const std::size_t ho = (h - window) / stride + 1;
    const std::size_t wo = (w - window) / stride + 1;
    Tensor out({c, ho, wo});
    const double scale = 1.0 / static_cast<double>(window * window);
    for (std::size_t ch = 0; ch < c; ++ch) {
        const double* xc = input.data() + ch * h * w;
        double* yc = out.data() + ch * ho * wo;
        for (std::size_t oh = 0; oh < ho; ++oh) {
            for (std::size_t ow = 0; ow < wo; ++ow) {
                double sum = 0.0;
                for (std::size_t p = 0; p < window; ++p)
                    for (std::size_t q = 0; q < window; ++q)
                        sum += xc[(oh * stride + p) * w + ow * stride + q];
                yc[oh * wo + ow] = sum * scale;
            }
        }
    }
    return out;
}

Tensor avg_pool2d_backward(const Tensor& grad_out, const std::vector<std::size_t>& in_shape,
                           std::size_t window, std::size_t stride) {
    if (in_shape.size() != 3) {
        throw ShapeError("avg_pool2d_backward in_shape must be [C,H,W], got " +
                         shape_to_string(in_shape));
    }
    const std::size_t c = in_shape[0], h = in_shape[1], w = in_shape[2];
    const std::size_t ho = (h - window) / stride + 1;
    const std::size_t wo = (w - window) / stride + 1;
    if (grad_out.shape() != std::vector<std::size_t>{c, ho, wo}) {
        throw ShapeError("avg_pool2d_backward grad_out shape " +
                         shape_to_string(grad_out.shape()) + " does not match pooled shape");
    }
    Tensor gx(in_shape);
    const double scale = 1.0 / static_cast<double>(window * window);
    for (std::size_t ch = 0; ch < c; ++ch) {
        const double* gc = grad_out.data() + ch * ho * wo;
        double* xc = gx.data() + ch * h * w;
        for (std::size_t oh = 0; oh < ho; ++oh) {
            for (std::size_t ow = 0; ow < wo; ++ow) {
                const double gv = gc[oh * wo + ow] * scale;
                for (std::size_t p = 0; p < window; ++p)
                    for (std::size_t q = 0; q < window; ++q)
                        xc[(oh * stride + p) * w + ow * stride + q] += gv;
            }
        }
    }
    return gx;
}

Tensor upsample_repeat(const Tensor& input, std::size_t factor,
                       const std::vector<std::size_t>& out_shape) {
    if (input.rank() != 3 || out_shape.size() != 3 || out_shape[0] != input.dim(0)) {
        throw ShapeError("upsample_repeat: input " + shape_to_string(input.shape()) +
                         " vs target " + shape_to_string(out_shape));
    }
    if (factor == 0) throw ValueError("upsample_repeat factor must be positive");
    const std::size_t c = input.dim(0), hi = input.dim(1), wi = input.dim(2);
    const std::size_t ho = out_shape[1], wo = out_shape[2];
    Tensor out(out_shape);
    for (std::size_t ch = 0; ch < c; ++ch) {
        const double* src = input.data() + ch * hi * wi;
        double* dst = out.data() + ch * ho * wo;
        for (std::size_t oh = 0; oh < ho; ++oh) {
            const std::size_t ih = std::min(oh / factor, hi - 1);
            for (std::size_t ow = 0; ow < wo; ++ow) {
                const std::size_t iw = std::min(ow / factor, wi - 1);
                dst[oh * wo + ow] = src[ih * wi + iw];
            }
        }
    }
    return out;
}

Tensor upsample_repeat_backward(const Tensor& grad_out, std::size_t factor,
                                const std::vector<std::size_t>& in_shape) {
    const std::size_t c = in_shape[0], hi = in_shape[1], wi = in_shape[2];
    const std::size_t ho = grad_out.dim(1), wo = grad_out.dim(2);
    Tensor gx(in_shape);
    for (std::size_t ch = 0; ch < c; ++ch) {
        const double* go = grad_out.data() + ch * ho * wo;
        double* dst = gx.data() + ch * hi * wi;
        for (std::size_t oh = 0; oh < ho; ++oh) {
            const std::size_t ih = std::min(oh / factor, hi - 1);
            for (std::size_t ow = 0; ow < wo; ++ow) {
                const std::size_t iw = std::min(ow / factor, wi - 1);
                dst[ih * wi + iw] += go[oh * wo + ow];
            }
        }
    }
    return gx;
}

Tensor channel_bias(const Tensor& input, const Tensor& bias) {
    if (input.rank() != 3 || bias.size() != input.dim(0)) {
        throw ShapeError("channel_bias: input " + shape_to_string(input.shape()) +
                         " vs bias " + shape_to_string(bias.shape()));
    }
    Tensor out = input;
    const std::size_t plane = input.dim(1) * input.dim(2);
    for (std::size_t c = 0; c < input.dim(0); ++c) {
        double* p = out.data() + c * plane;
        for (std::size_t i = 0; i < plane; ++i) p[i] += bias[c];
    }
    return out;
}

Tensor channel_bias_backward(const Tensor& grad_out) {
    const std::size_t c = grad_out.dim(0);
    const std::size_t plane = grad_out.dim(1) * grad_out.dim(2);
    Tensor gb({c});
    for (std::size_t ch = 0; ch < c; ++ch) {
        double sum = 0.0;
        const double* p = grad_out.data() + ch * plane;
        for (std::size_t i = 0; i < plane; ++i) sum += p[i];
        gb[ch] = sum;
    }
    return gb;
}

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

Tensor relu(const Tensor& x) {
    Tensor y = x;
    for (double& v : y.values()) v = v > 0.0 ? v : 0.0;
    return y;
}

Tensor relu_backward(const Tensor& grad_out, const Tensor& x) {
    require_same_shape(grad_out, x, "relu_backward");
    Tensor g = grad_out;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (x[i] <= 0.0) g[i] = 0.0;
    }
    return g;
}

Tensor sigmoid(const Tensor& x) {
    Tensor y = x;
    for (double& v : y.values()) v = sigmoid(v);
    return y;
}

Tensor sigmoid_backward(const Tensor& grad_out, const Tensor& y) {
    require_same_shape(grad_out, y, "sigmoid_backward");
    Tensor g = grad_out;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= y[i] * (1.0 - y[i]);
    return g;
}

Tensor tanh(const Tensor& x) {
    Tensor y = x;
    for (double& v : y.values()) v = std::tanh(v);
    return y;
}

Tensor tanh_backward(const Tensor& grad_out, const Tensor& y) {
    require_same_shape(grad_out, y, "tanh_backward");
    Tensor g = grad_out;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= 1.0 - y[i] * y[i];
    return g;
}

Tensor softmax(const Tensor& logits) {
    Tensor out = logits;
    double max = logits[0];
    for (std::size_t i = 1; i < logits.size(); ++i) max = std::max(max, logits[i]);
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - max);
        sum += out[i];
    }
    for (double& v : out.values()) v /= sum;
    return out;
}

} // namespace ovum::nn
