#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace molegen::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct ShapeMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonFiniteInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One stacked-LSTM layer. Gate rows are stacked [input; forget; cell; output],
// each block hidden_size rows.
struct LstmLayerParams {
  Matrix w_input; // 4H x D
  Matrix w_recur; // 4H x H
  Matrix bias;    // 4H x 1

  int hidden_size() const { return static_cast<int>(w_recur.cols()); }
  int input_size() const { return static_cast<int>(w_input.cols()); }
};

// Stacked LSTM with a dense projection from the top hidden state to K logits.
// Doubles as the gradient container (same tensor layout).
struct LstmStack {
  std::vector<LstmLayerParams> layers;
  Matrix w_out; // K x H
  Matrix b_out; // K x 1

  int vocab_size() const { return static_cast<int>(w_out.rows()); }
  int hidden_size() const { return layers.empty() ? 0 : layers.front().hidden_size(); }

  template <typename F>
  void for_each_tensor(F f) {
    for (auto& l : layers) {
      f(l.w_input);
      f(l.w_recur);
      f(l.bias);
    }
    f(w_out);
    f(b_out);
  }
  template <typename F>
  void for_each_tensor(F f) const {
    for (const auto& l : layers) {
      f(l.w_input);
      f(l.w_recur);
      f(l.bias);
    }
    f(w_out);
    f(b_out);
  }
};

// Per-layer hidden and cell state, one column per batch item.
struct RnnState {
  std::vector<Matrix> h, c;
};

RnnState zero_state(const LstmStack& params, int batch);

// Uniform [-0.08, 0.08] weights, forget-gate bias 1.0.
LstmStack init_lstm(int layers, int hidden, int vocab, std::uint64_t seed);

LstmStack zeros_like(const LstmStack& params);

// Single step over a batch of symbol indices (columns of the state).
// Advances the state in place and returns the K x B logits. Eval mode
// (no dropout).
Matrix lstm_step(const LstmStack& params, RnnState& state, const std::vector<int>& symbols);

// Softmax with temperature; max subtracted before exponentiation.
Vector softmax(const Vector& logits, double temperature = 1.0);

// Mean -log p(target) in nats per symbol.
double cross_entropy_loss(const std::vector<Vector>& probabilities,
                          const std::vector<int>& targets);

struct BpttResult {
  double loss = 0.0; // mean cross-entropy over all (step, batch) positions
  LstmStack grads;
};

// Exact analytic gradients of the mean next-symbol cross-entropy over an
// unrolled window. inputs/targets are [T][B] symbol indices; the state
// starts at zero. Inverted dropout after each LSTM layer, never on the
// recurrent path; masks drawn from dropout_seed so results are reproducible.
BpttResult bptt_gradients(const LstmStack& params, const std::vector<std::vector<int>>& inputs,
                          const std::vector<std::vector<int>>& targets, double dropout,
                          std::uint64_t dropout_seed);

// Forward-only counterpart (eval mode, no dropout). Returns mean loss.
double window_loss(const LstmStack& params, const std::vector<std::vector<int>>& inputs,
                   const std::vector<std::vector<int>>& targets);

// Scales all gradients by max_norm/norm when the global L2 norm exceeds
// max_norm. Returns the norm before clipping.
double clip_gradients(LstmStack& grads, double max_norm);

struct AdamState {
  LstmStack m, v;
  long step = 0;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

AdamState init_adam(const LstmStack& params, double learning_rate = 0.001);

// Standard bias-corrected update; increments the step counter.
void adam_step(LstmStack& params, const LstmStack& grads, AdamState& state);

} // namespace molegen::nn
