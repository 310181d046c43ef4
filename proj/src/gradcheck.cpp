#include "ovum/nn/gradcheck.hpp"

#include "ovum/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ovum::nn {

Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f, const Tensor& x,
                        double eps) {
    Tensor grad(x.shape());
    Tensor probe = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double orig = probe[i];
        probe[i] = orig + eps;
        const double plus = f(probe);
        probe[i] = orig - eps;
        const double minus = f(probe);
        probe[i] = orig;
        grad[i] = (plus - minus) / (2.0 * eps);
    }
    return grad;
}

double max_relative_difference(const Tensor& a, const Tensor& b, double floor) {
    require_same_shape(a, b, "max_relative_difference");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double denom = std::max({std::abs(a[i]), std::abs(b[i]), floor});
        worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
    }
    return worst;
}

} // namespace ovum::nn
