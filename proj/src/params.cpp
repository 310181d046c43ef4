#include "ovum/nn/params.hpp"

#include "ovum/errors.hpp"

#include <cmath>

namespace ovum::nn {

void ParameterStore::add(const std::string& name, Tensor value) {
    if (entries_.count(name)) {
        throw ValueError("parameter '" + name + "' already registered");
    }
    round_to_float32(value);
    ParamState st;
    st.m = Tensor(value.shape());
    st.v = Tensor(value.shape());
    st.value = std::move(value);
    entries_.emplace(name, std::move(st));
}

const Tensor& ParameterStore::value(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ValueError("unknown parameter '" + name + "'");
    return it->second.value;
}

Tensor& ParameterStore::mutable_value(const std::string& name) {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ValueError("unknown parameter '" + name + "'");
    return it->second.value;
}

ParamState& ParameterStore::state(const std::string& name) {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ValueError("unknown parameter '" + name + "'");
    return it->second;
}

std::vector<std::string> ParameterStore::names() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [name, _] : entries_) out.push_back(name);
    return out;
}

bool ParameterStore::values_equal(const ParameterStore& other) const {
    if (entries_.size() != other.entries_.size()) return false;
    for (const auto& [name, st] : entries_) {
        auto it = other.entries_.find(name);
        if (it == other.entries_.end()) return false;
        if (!(st.value == it->second.value)) return false;
    }
    return true;
}

void accumulate_grad(GradientMap& grads, const std::string& name, const Tensor& grad,
                     double scale) {
    auto it = grads.find(name);
    if (it == grads.end()) {
        Tensor g = grad;
        if (scale != 1.0) {
            for (double& v : g.values()) v *= scale;
        }
        grads.emplace(name, std::move(g));
        return;
    }
    require_same_shape(it->second, grad, "accumulate_grad(" + name + ")");
    for (std::size_t i = 0; i < grad.size(); ++i) it->second[i] += scale * grad[i];
}

void adam_step(ParameterStore& params, const GradientMap& grads, const AdamConfig& cfg) {
    for (const auto& [name, _] : grads) {
        if (!params.contains(name)) {
            throw ValueError("adam_step: gradient for unknown parameter '" + name + "'");
        }
    }
    const std::int64_t t = params.step() + 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));

    for (const std::string& name : params.names()) {
        auto git = grads.find(name);
        if (git == grads.end()) {
            throw ValueError("adam_step: missing gradient for parameter '" + name + "'");
        }
        ParamState& st = params.state(name);
        const Tensor& g = git->second;
        require_same_shape(st.value, g, "adam_step(" + name + ")");
        for (std::size_t i = 0; i < g.size(); ++i) {
            st.m[i] = cfg.beta1 * st.m[i] + (1.0 - cfg.beta1) * g[i];
            st.v[i] = cfg.beta2 * st.v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            const double m_hat = st.m[i] / bc1;
            const double v_hat = st.v[i] / bc2;
            st.value[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
        }
        round_to_float32(st.value);
    }
    params.set_step(t);
}

Tensor glorot_uniform(const std::vector<std::size_t>& shape, std::size_t fan_in,
                      std::size_t fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Tensor t(shape);
    for (double& v : t.values()) v = dist(rng);
    return t;
}

} // namespace ovum::nn
