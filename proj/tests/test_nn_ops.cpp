#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ovum/errors.hpp"
#include "ovum/nn/gradcheck.hpp"
#include "ovum/nn/ops.hpp"
#include "test_support.hpp"

using namespace ovum;
using ovum::test::random_tensor;

TEST_CASE("conv2d all-ones 3x3 kernel sums the receptive field") {
    Tensor input = Tensor::full({1, 3, 3}, 1.0);
    Tensor kernel = Tensor::full({1, 1, 3, 3}, 1.0);
    Tensor out = nn::conv2d(input, kernel, 1, 0);
    CHECK(out.shape() == std::vector<std::size_t>{1, 1, 1});
    CHECK(out[0] == 9.0);
}

TEST_CASE("conv2d 1x1 unit kernel is the identity map") {
    Rng rng = make_rng(3);
    Tensor kernel({1, 1, 1, 1}, {1.0});
    for (int i = 0; i < 5; ++i) {
        std::uniform_int_distribution<std::size_t> dim(1, 7);
        Tensor input = random_tensor({1, dim(rng), dim(rng)}, rng);
        Tensor out = nn::conv2d(input, kernel, 1, 0);
        CHECK(out == input);
    }
    // multi-channel identity: kernel[oc][ic] = delta
    Tensor id({3, 3, 1, 1});
    for (std::size_t c = 0; c < 3; ++c) id[c * 3 + c] = 1.0;
    Tensor input = random_tensor({3, 4, 5}, rng);
    CHECK(nn::conv2d(input, id, 1, 0) == input);
}

TEST_CASE("conv2d output shape formula") {
    Tensor input({1, 32, 32});
    Tensor kernel({8, 1, 3, 3});
    Tensor out = nn::conv2d(input, kernel, 2, 1);
    CHECK(out.shape() == std::vector<std::size_t>{8, 16, 16});
}

TEST_CASE("conv2d channel mismatch names both shapes") {
    Tensor input({2, 4, 4});
    Tensor kernel({1, 3, 3, 3});
    CHECK_THROWS_WITH_AS(nn::conv2d(input, kernel, 1, 0),
                         doctest::Contains("[1, 3, 3, 3]"), ShapeError);
}

TEST_CASE("conv2d forward is deterministic") {
    Rng rng = make_rng(11);
    Tensor input = random_tensor({2, 6, 6}, rng);
    Tensor kernel = random_tensor({3, 2, 3, 3}, rng);
    Tensor a = nn::conv2d(input, kernel, 2, 1);
    Tensor b = nn::conv2d(input, kernel, 2, 1);
    CHECK(a == b);
}

TEST_CASE("conv2d_backward zero upstream gradient gives zero gradients") {
    Rng rng = make_rng(5);
    Tensor input = random_tensor({2, 5, 5}, rng);
    Tensor kernel = random_tensor({3, 2, 3, 3}, rng);
    Tensor out = nn::conv2d(input, kernel, 2, 1);
    nn::Conv2dGrads g = nn::conv2d_backward(Tensor(out.shape()), input, kernel, 2, 1);
    CHECK(g.grad_input == Tensor(input.shape()));
    CHECK(g.grad_kernel == Tensor(kernel.shape()));
}

TEST_CASE("conv2d_backward identity kernel passes the gradient through") {
    Rng rng = make_rng(6);
    Tensor input = random_tensor({1, 4, 4}, rng);
    Tensor kernel({1, 1, 1, 1}, {1.0});
    Tensor grad_out = random_tensor({1, 4, 4}, rng);
    nn::Conv2dGrads g = nn::conv2d_backward(grad_out, input, kernel, 1, 0);
    CHECK(g.grad_input == grad_out);
}

TEST_CASE("conv2d_backward rejects wrong grad_out shape") {
    Tensor input({1, 4, 4});
    Tensor kernel({1, 1, 3, 3});
    CHECK_THROWS_AS(nn::conv2d_backward(Tensor({1, 4, 4}), input, kernel, 1, 0), ShapeError);
}

// finite_diff_grad oracle sanity: exact on linear, O(eps^2) on quadratic
TEST_CASE("finite difference oracle on known functions") {
    Rng rng = make_rng(7);
    Tensor x = random_tensor({6}, rng);

    const auto sum = [](const Tensor& t) {
        double s = 0.0;
        for (double v : t.values()) s += v;
        return s;
    };
    Tensor g1 = nn::finite_diff_grad(sum, x, 1e-3);
    for (double v : g1.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));

    const auto half_norm = [](const Tensor& t) {
        double s = 0.0;
        for (double v : t.values()) s += v * v;
        return 0.5 * s;
    };
    Tensor g2 = nn::finite_diff_grad(half_norm, x, 1e-3);
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(g2[i] == doctest::Approx(x[i]).epsilon(1e-8));
    }
}

namespace {

/// Checks d(sum(w * op(x)))/dx against the finite-difference oracle, where w
/// is a fixed random weighting so every output coordinate matters.
void check_grad_against_fd(const Tensor& analytic, const std::function<double(const Tensor&)>& f,
                           const Tensor& x, double tol = 1e-4) {
    Tensor fd = nn::finite_diff_grad(f, x, 1e-3);
    CHECK(nn::max_relative_difference(analytic, fd) < tol);
}

double weighted_sum(const Tensor& t, const Tensor& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) s += t[i] * w[i];
    return s;
}

} // namespace

TEST_CASE("conv2d gradients match finite differences over 20 seeds") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng = make_rng(seed);
        const std::size_t stride = 1 + seed % 2;
        const std::size_t padding = seed % 2;
        Tensor input = random_tensor({2, 5, 5}, rng);
        Tensor kernel = random_tensor({3, 2, 3, 3}, rng);
        Tensor out = nn::conv2d(input, kernel, stride, padding);
        Tensor w = random_tensor(out.shape(), rng);

        nn::Conv2dGrads g = nn::conv2d_backward(w, input, kernel, stride, padding);
        check_grad_against_fd(
            g.grad_input,
            [&](const Tensor& x) { return weighted_sum(nn::conv2d(x, kernel, stride, padding), w); },
            input);
        check_grad_against_fd(
            g.grad_kernel,
            [&](const Tensor& k) { return weighted_sum(nn::conv2d(input, k, stride, padding), w); },
            kernel);
    }
}

TEST_CASE("conv2d_transpose is the exact adjoint and its gradients check out") {
    Rng rng = make_rng(77);
    const std::vector<std::size_t> in_shape{2, 5, 5};
    Tensor kernel = random_tensor({3, 2, 3, 3}, rng);

    // adjoint identity: <y, C x> == <C^T y, x>
    Tensor x = random_tensor(in_shape, rng);
    Tensor cx = nn::conv2d(x, kernel, 2, 1);
    Tensor y = random_tensor(cx.shape(), rng);
    Tensor cty = nn::conv2d_transpose(y, kernel, 2, 1, in_shape);
    CHECK(weighted_sum(cx, y) == doctest::Approx(weighted_sum(cty, x)).epsilon(1e-12));

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng r2 = make_rng(seed + 100);
        Tensor input = random_tensor({3, 3, 3}, r2);
        Tensor k = random_tensor({3, 2, 3, 3}, r2);
        Tensor out = nn::conv2d_transpose(input, k, 2, 1, in_shape);
        Tensor w = random_tensor(out.shape(), r2);
        nn::Conv2dGrads g = nn::conv2d_transpose_backward(w, input, k, 2, 1);
        check_grad_against_fd(
            g.grad_input,
            [&](const Tensor& t) {
                return weighted_sum(nn::conv2d_transpose(t, k, 2, 1, in_shape), w);
            },
            input);
        check_grad_against_fd(
            g.grad_kernel,
            [&](const Tensor& kk) {
                return weighted_sum(nn::conv2d_transpose(input, kk, 2, 1, in_shape), w);
            },
            k);
    }
}

TEST_CASE("dense gradients match finite differences over 20 seeds") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng = make_rng(seed + 40);
        Tensor x = random_tensor({6}, rng);
        Tensor wgt = random_tensor({4, 6}, rng);
        Tensor bias = random_tensor({4}, rng);
        Tensor w = random_tensor({4}, rng);

        nn::DenseGrads g = nn::dense_backward(w, x, wgt);
        check_grad_against_fd(
            g.grad_input, [&](const Tensor& t) { return weighted_sum(nn::dense(t, wgt, bias), w); },
            x);
        check_grad_against_fd(
            g.grad_weight,
            [&](const Tensor& t) { return weighted_sum(nn::dense(x, t, bias), w); }, wgt);
        check_grad_against_fd(
            g.grad_bias, [&](const Tensor& t) { return weighted_sum(nn::dense(x, wgt, t), w); },
            bias);
    }
}

TEST_CASE("average pooling gradients match finite differences over 20 seeds") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng = make_rng(seed + 60);
        Tensor x = random_tensor({2, 6, 6}, rng);
        Tensor pooled = nn::avg_pool2d(x, 2, 2);
        CHECK(pooled.shape() == std::vector<std::size_t>{2, 3, 3});
        Tensor w = random_tensor(pooled.shape(), rng);
        Tensor g = nn::avg_pool2d_backward(w, x.shape(), 2, 2);
        check_grad_against_fd(
            g, [&](const Tensor& t) { return weighted_sum(nn::avg_pool2d(t, 2, 2), w); }, x);
    }
}

TEST_CASE("upsample_repeat gradients match finite differences") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng = make_rng(seed + 80);
        Tensor x = random_tensor({2, 3, 3}, rng);
        const std::vector<std::size_t> out_shape{2, 6, 6};
        Tensor w = random_tensor(out_shape, rng);
        Tensor g = nn::upsample_repeat_backward(w, 2, x.shape());
        check_grad_against_fd(
            g, [&](const Tensor& t) { return weighted_sum(nn::upsample_repeat(t, 2, out_shape), w); },
            x);
    }
}

TEST_CASE("activation gradients match finite differences") {
    Rng rng = make_rng(90);
    Tensor x = random_tensor({8}, rng, 0.1, 1.0); // away from the relu kink
    Tensor w = random_tensor({8}, rng);

    check_grad_against_fd(
        nn::relu_backward(w, x), [&](const Tensor& t) { return weighted_sum(nn::relu(t), w); },
        x);
    check_grad_against_fd(
        nn::sigmoid_backward(w, nn::sigmoid(x)),
        [&](const Tensor& t) { return weighted_sum(nn::sigmoid(t), w); }, x);
    check_grad_against_fd(
        nn::tanh_backward(w, nn::tanh(x)),
        [&](const Tensor& t) { return weighted_sum(nn::tanh(t), w); }, x);
}

TEST_CASE("softmax output is a distribution and channel bias sums gradients") {
    Rng rng = make_rng(91);
    Tensor logits = random_tensor({5}, rng, -3, 3);
    Tensor p = nn::softmax(logits);
    double sum = 0.0;
    for (double v : p.values()) {
        CHECK(v > 0.0);
        sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

    Tensor x = random_tensor({2, 3, 3}, rng);
    Tensor b = random_tensor({2}, rng);
    Tensor w = random_tensor({2, 3, 3}, rng);
    check_grad_against_fd(
        nn::channel_bias_backward(w),
        [&](const Tensor& t) { return weighted_sum(nn::channel_bias(x, t), w); }, b);
}
