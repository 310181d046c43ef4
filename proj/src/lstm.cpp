#include "ovum/nn/lstm.hpp"

#include "ovum/errors.hpp"
#include "ovum/nn/ops.hpp"

#include <cmath>

namespace ovum::nn {

namespace {

const char* const kGateNames[4] = {"i", "f", "o", "g"};

std::string weight_name(const char* gate) { return std::string("w_") + gate; }
std::string bias_name(const char* gate) { return std::string("b_") + gate; }

Tensor concat(const Tensor& a, const Tensor& b) {
    Tensor out({a.size() + b.size()});
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[a.size() + i] = b[i];
    return out;
}

void check_dims(const Tensor& x, const Tensor& h, const Tensor& c,
                const ParameterStore& params) {
    for (const char* gate : kGateNames) {
        if (!params.contains(weight_name(gate)) || !params.contains(bias_name(gate))) {
            throw ValueError("lstm_step: params missing gate '" + std::string(gate) + "'");
        }
    }
    const Tensor& w = params.value("w_i");
    if (w.rank() != 2) {
        throw ShapeError("lstm_step: gate weight must be [U,D+U], got " +
                         shape_to_string(w.shape()));
    }
    const std::size_t u = w.dim(0);
    const std::size_t du = w.dim(1);
    if (h.size() != u || c.size() != u || x.size() + h.size() != du) {
        throw ShapeError("lstm_step dimension mismatch: x " + shape_to_string(x.shape()) +
                         ", h " + shape_to_string(h.shape()) + ", c " +
                         shape_to_string(c.shape()) + " vs weights " +
                         shape_to_string(w.shape()));
    }
}

} // namespace

ParameterStore make_lstm_params(std::size_t input_dim, std::size_t hidden_dim, Rng& rng) {
    ParameterStore params;
    const std::size_t du = input_dim + hidden_dim;
    for (const char* gate : kGateNames) {
        params.add(weight_name(gate), glorot_uniform({hidden_dim, du}, du, hidden_dim, rng));
        Tensor b({hidden_dim});
        if (std::string(gate) == "f") {
            for (double& v : b.values()) v = 1.0;
        }
        params.add(bias_name(gate), std::move(b));
    }
    return params;
}

LstmState lstm_step(const Tensor& x, const Tensor& h, const Tensor& c,
                    const ParameterStore& params, LstmStepCache* cache) {
    check_dims(x, h, c, params);
    const Tensor z = concat(x, h);

    const Tensor gate_i = sigmoid(dense(z, params.value("w_i"), params.value("b_i")));
    const Tensor gate_f = sigmoid(dense(z, params.value("w_f"), params.value("b_f")));
    const Tensor gate_o = sigmoid(dense(z, params.value("w_o"), params.value("b_o")));
    const Tensor cand = tanh(dense(z, params.value("w_g"), params.value("b_g")));

    LstmState next;
    next.c = Tensor(c.shape());
    for (std::size_t i = 0; i < c.size(); ++i) {
        next.c[i] = gate_f[i] * c[i] + gate_i[i] * cand[i];
    }
    const Tensor tc = tanh(next.c);
    next.h = Tensor(c.shape());
    for (std::size_t i = 0; i < c.size(); ++i) {
        next.h[i] = gate_o[i] * tc[i];
    }

    if (cache) {
        cache->z = z;
        cache->i = gate_i;
        cache->f = gate_f;
        cache->o = gate_o;
        cache->g = cand;
        cache->c_prev = c;
        cache->c = next.c;
        cache->tanh_c = tc;
    }
    return next;
}

LstmStepGrads lstm_step_backward(const Tensor& grad_h, const Tensor& grad_c,
                                 const LstmStepCache& cache, const ParameterStore& params) {
    const std::size_t u = grad_h.size();
    const std::size_t du = cache.z.size();
    const std::size_t d = du - u;

    // dc accumulates the path through h' = o * tanh(c')
    Tensor dc = grad_c;
    Tensor do_gate({u});
    for (std::size_t i = 0; i < u; ++i) {
        do_gate[i] = grad_h[i] * cache.tanh_c[i];
        dc[i] += grad_h[i] * cache.o[i] * (1.0 - cache.tanh_c[i] * cache.tanh_c[i]);
    }

    Tensor di({u}), df({u}), dg({u});
    LstmStepGrads out;
    out.grad_c_prev = Tensor({u});
    for (std::size_t i = 0; i < u; ++i) {
        di[i] = dc[i] * cache.g[i];
        df[i] = dc[i] * cache.c_prev[i];
        dg[i] = dc[i] * cache.i[i];
        out.grad_c_prev[i] = dc[i] * cache.f[i];
    }

    // back through the gate nonlinearities to pre-activations
    Tensor da_i = sigmoid_backward(di, cache.i);
    Tensor da_f = sigmoid_backward(df, cache.f);
    Tensor da_o = sigmoid_backward(do_gate, cache.o);
    Tensor da_g = tanh_backward(dg, cache.g);

    Tensor dz({du});
    const struct {
        const char* gate;
        const Tensor* da;
    } gates[4] = {{"i", &da_i}, {"f", &da_f}, {"o", &da_o}, {"g", &da_g}};
    for (const auto& [gate, da] : gates) {
        DenseGrads dg2 = dense_backward(*da, cache.z, params.value(weight_name(gate)));
        accumulate_grad(out.params, weight_name(gate), dg2.grad_weight);
        accumulate_grad(out.params, bias_name(gate), dg2.grad_bias);
        for (std::size_t i = 0; i < du; ++i) dz[i] += dg2.grad_input[i];
    }

    out.grad_x = Tensor({d});
    out.grad_h_prev = Tensor({u});
    for (std::size_t i = 0; i < d; ++i) out.grad_x[i] = dz[i];
    for (std::size_t i = 0; i < u; ++i) out.grad_h_prev[i] = dz[d + i];
    return out;
}

LstmState lstm_forward(const std::vector<Tensor>& inputs, const ParameterStore& params,
                       LstmSequenceCache* cache) {
    if (inputs.empty()) throw ValueError("lstm_forward: empty input sequence");
    const std::size_t u = params.value("w_i").dim(0);
    LstmState state{Tensor({u}), Tensor({u})};
    if (cache) {
        cache->steps.clear();
        cache->steps.resize(inputs.size());
    }
    for (std::size_t t = 0; t < inputs.size(); ++t) {
        state = lstm_step(inputs[t], state.h, state.c, params,
                          cache ? &cache->steps[t] : nullptr);
    }
    return state;
}

GradientMap lstm_backward(const Tensor& grad_h_final, const LstmSequenceCache& cache,
                          const ParameterStore& params) {
    if (cache.steps.empty()) throw ValueError("lstm_backward: empty cache");
    const std::size_t u = grad_h_final.size();
    GradientMap grads;
    Tensor dh = grad_h_final;
    Tensor dc({u});
    for (std::size_t t = cache.steps.size(); t-- > 0;) {
        LstmStepGrads step = lstm_step_backward(dh, dc, cache.steps[t], params);
        for (const auto& [name, g] : step.params) accumulate_grad(grads, name, g);
        dh = std::move(step.grad_h_prev);
        dc = std::move(step.grad_c_prev);
    }
    return grads;
}

} // namespace ovum::nn
