#pragma once

#include "ovum/tensor.hpp"

#include <functional>

namespace ovum::nn {

/// Central-difference gradient of a scalar function of a tensor:
/// (f(x + eps*e_i) - f(x - eps*e_i)) / (2*eps) per coordinate.
/// f must be deterministic and pure.
Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f, const Tensor& x,
                        double eps = 1e-3);

/// Max over coordinates of |a_i - b_i| / max(|a_i|, |b_i|, floor).
/// The floor keeps near-zero coordinates from dominating the relative error.
double max_relative_difference(const Tensor& a, const Tensor& b, double floor = 1e-6);

} // namespace ovum::nn
