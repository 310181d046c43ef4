#pragma once

#include "ovum/nn/params.hpp"
#include "ovum/tensor.hpp"

#include <vector>

namespace ovum::nn {

/// Gate parameter names expected in an LSTM parameter store. Weight matrices
/// are [U, D+U] over the concatenated [x; h] vector; biases are [U].
/// The forget-gate bias is initialized to 1.
ParameterStore make_lstm_params(std::size_t input_dim, std::size_t hidden_dim, Rng& rng);

struct LstmState {
    Tensor h;
    Tensor c;
};

/// Intermediate values kept for backpropagation through one step.
struct LstmStepCache {
    Tensor z;      // [x; h_prev]
    Tensor i, f, o, g;
    Tensor c_prev;
    Tensor c;
    Tensor tanh_c;
};

/// Standard LSTM cell: gates = sigmoid(affine), candidate = tanh(affine),
/// c' = f*c + i*g, h' = o*tanh(c').
LstmState lstm_step(const Tensor& x, const Tensor& h, const Tensor& c,
                    const ParameterStore& params, LstmStepCache* cache = nullptr);

struct LstmStepGrads {
    GradientMap params;
    Tensor grad_x;
    Tensor grad_h_prev;
    Tensor grad_c_prev;
};

/// Backward through one step given upstream gradients on (h', c').
LstmStepGrads lstm_step_backward(const Tensor& grad_h, const Tensor& grad_c,
                                 const LstmStepCache& cache, const ParameterStore& params);

struct LstmSequenceCache {
    std::vector<LstmStepCache> steps;
};

/// Runs the cell over a sequence from zero initial state; returns the final
/// (h_T, c_T). The head reads h_T.
LstmState lstm_forward(const std::vector<Tensor>& inputs, const ParameterStore& params,
                       LstmSequenceCache* cache = nullptr);

/// Backpropagation through time from a gradient on the final hidden state.
GradientMap lstm_backward(const Tensor& grad_h_final, const LstmSequenceCache& cache,
                          const ParameterStore& params);

} // namespace ovum::nn
