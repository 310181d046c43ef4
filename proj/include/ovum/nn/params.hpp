#pragma once

#include "ovum/rng.hpp"
#include "ovum/tensor.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ovum::nn {

/// One trainable tensor with its Adam first/second moments.
struct ParamState {
    Tensor value;
    Tensor m;
    Tensor v;
};

/// Named map of trainable tensors plus a step count shared across all
/// parameters updated together. Values are kept on the binary32 grid (the
/// checkpoint payload format) so persisted models round-trip bit-exactly.
class ParameterStore {
public:
    /// Registers a tensor (rounded to binary32) with zeroed Adam moments.
    void add(const std::string& name, Tensor value);

    bool contains(const std::string& name) const { return entries_.count(name) != 0; }
    const Tensor& value(const std::string& name) const;
    Tensor& mutable_value(const std::string& name);
    ParamState& state(const std::string& name);

    std::vector<std::string> names() const;
    std::size_t size() const { return entries_.size(); }

    std::int64_t step() const { return step_; }
    void set_step(std::int64_t step) { step_ = step; }

    /// Bitwise equality of all parameter values (moments ignored).
    bool values_equal(const ParameterStore& other) const;

    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

private:
    std::map<std::string, ParamState> entries_; // ordered: deterministic iteration
    std::int64_t step_ = 0;
};

/// Gradients keyed by parameter name.
using GradientMap = std::map<std::string, Tensor>;

/// Accumulates `grad` into `grads[name]` (scaled), creating it on first use.
void accumulate_grad(GradientMap& grads, const std::string& name, const Tensor& grad,
                     double scale = 1.0);

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// One bias-corrected Adam update over every parameter in the store.
/// Every parameter must have a gradient entry; extra gradient names are an
/// error too. Updated values are rounded back to the binary32 grid.
void adam_step(ParameterStore& params, const GradientMap& grads, const AdamConfig& cfg);

/// Uniform(-limit, +limit) init with limit = sqrt(6 / (fan_in + fan_out)).
Tensor glorot_uniform(const std::vector<std::size_t>& shape, std::size_t fan_in,
                      std::size_t fan_out, Rng& rng);

} // namespace ovum::nn
