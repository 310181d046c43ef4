#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ovum/errors.hpp"
#include "ovum/nn/params.hpp"

#include <cmath>

using namespace ovum;

namespace {

/// Independent scalar Adam recurrence, straight from the published update
/// rule; the oracle for the convergence check below.
double reference_adam_on_square(double w0, double lr, double beta1, double beta2,
                                double eps, int steps) {
    double w = w0, m = 0.0, v = 0.0;
    for (int t = 1; t <= steps; ++t) {
        const double g = 2.0 * w; // d/dw of w^2
        m = beta1 * m + (1.0 - beta1) * g;
        v = beta2 * v + (1.0 - beta2) * g * g;
        const double m_hat = m / (1.0 - std::pow(beta1, t));
        const double v_hat = v / (1.0 - std::pow(beta2, t));
        w -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
    return w;
}

} // namespace

TEST_CASE("zero gradients leave parameters unchanged and bump the step count") {
    nn::ParameterStore params;
    params.add("w", Tensor({3}, {0.5, -0.25, 1.0}));
    const Tensor before = params.value("w");

    nn::GradientMap grads;
    grads["w"] = Tensor({3});
    adam_step(params, grads, nn::AdamConfig{});

    CHECK(params.value("w") == before);
    CHECK(params.step() == 1);
}

TEST_CASE("first step with unit gradient moves by about lr") {
    nn::ParameterStore params;
    params.add("w", Tensor({1}, {0.0}));
    nn::GradientMap grads;
    grads["w"] = Tensor({1}, {1.0});
    nn::AdamConfig cfg;
    cfg.lr = 0.01;
    adam_step(params, grads, cfg);
    CHECK(std::abs(params.value("w")[0] + cfg.lr) < 1e-6); // moved -lr (descent)
}

TEST_CASE("100 Adam steps on w^2 from w=1 shrink w below 0.1") {
    nn::AdamConfig cfg;
    cfg.lr = 0.1;

    const double w_ref =
        reference_adam_on_square(1.0, cfg.lr, cfg.beta1, cfg.beta2, cfg.eps, 100);
    CHECK(std::abs(w_ref) < 0.1); // the oracle itself converges

    nn::ParameterStore params;
    params.add("w", Tensor({1}, {1.0}));
    for (int t = 0; t < 100; ++t) {
        nn::GradientMap grads;
        grads["w"] = Tensor({1}, {2.0 * params.value("w")[0]});
        adam_step(params, grads, cfg);
    }
    CHECK(std::abs(params.value("w")[0]) < 0.1);
    // float32 parameter rounding only perturbs the trajectory marginally
    CHECK(params.value("w")[0] == doctest::Approx(w_ref).epsilon(1e-3));
    CHECK(params.step() == 100);
}

TEST_CASE("missing or unknown gradients are rejected") {
    nn::ParameterStore params;
    params.add("w", Tensor({1}));
    params.add("b", Tensor({1}));

    nn::GradientMap missing;
    missing["w"] = Tensor({1});
    CHECK_THROWS_WITH_AS(adam_step(params, missing, nn::AdamConfig{}),
                         doctest::Contains("missing gradient"), ValueError);

    nn::GradientMap unknown;
    unknown["w"] = Tensor({1});
    unknown["b"] = Tensor({1});
    unknown["ghost"] = Tensor({1});
    CHECK_THROWS_AS(adam_step(params, unknown, nn::AdamConfig{}), ValueError);
}

TEST_CASE("parameter store keeps values on the float32 grid") {
    nn::ParameterStore params;
    params.add("w", Tensor({1}, {1.0 / 3.0}));
    const double stored = params.value("w")[0];
    CHECK(stored == static_cast<double>(static_cast<float>(stored)));
    CHECK(stored == doctest::Approx(1.0 / 3.0).epsilon(1e-7));
}

TEST_CASE("adam moments track their parameter shapes") {
    nn::ParameterStore params;
    params.add("w", Tensor({2, 3}));
    const nn::ParamState& st = params.state("w");
    CHECK(st.m.shape() == st.value.shape());
    CHECK(st.v.shape() == st.value.shape());
}
