#include <cmath>
#include <random>

#include "molegen/nn/lstm.hpp"

namespace molegen::nn {

namespace {

Matrix sigmoid(const Matrix& x) { return (1.0 / (1.0 + (-x.array()).exp())).matrix(); }

struct StepCache {
  Matrix x_dense;            // layer input after dropout (layers > 0), H x B
  Matrix i, f, g, o;         // gate activations, H x B
  Matrix c, h, tanh_c;       // H x B
  Matrix c_prev, h_prev;     // H x B
  Matrix mask;               // dropout mask applied to this layer's output
};

void check_symbol_range(const std::vector<std::vector<int>>& seq, int vocab) {
  for (const auto& step : seq)
    for (int s : step)
      if (s < 0 || s >= vocab) throw ShapeMismatch("symbol index out of vocabulary range");
}

// One forward step for one layer. For layer 0 the input is one-hot symbol
// indices (column gather instead of a dense product).
void layer_forward(const LstmLayerParams& p, const std::vector<int>* symbols,
                   const Matrix* x_dense, StepCache& cache) {
  const int H = p.hidden_size();
  const int B = static_cast<int>(cache.h_prev.cols());
  Matrix pre = p.w_recur * cache.h_prev;
  pre.colwise() += p.bias.col(0);
  if (symbols) {
    for (int b = 0; b < B; ++b) pre.col(b) += p.w_input.col((*symbols)[b]);
  } else {
    pre += p.w_input * (*x_dense);
  }
  cache.i = sigmoid(pre.topRows(H));
  cache.f = sigmoid(pre.middleRows(H, H));
  cache.g = pre.middleRows(2 * H, H).array().tanh().matrix();
  cache.o = sigmoid(pre.bottomRows(H));
  cache.c = cache.f.cwiseProduct(cache.c_prev) + cache.i.cwiseProduct(cache.g);
  cache.tanh_c = cache.c.array().tanh().matrix();
  cache.h = cache.o.cwiseProduct(cache.tanh_c);
}

} // namespace

RnnState zero_state(const LstmStack& params, int batch) {
  RnnState s;
  for (const auto& l : params.layers) {
    s.h.push_back(Matrix::Zero(l.hidden_size(), batch));
    s.c.push_back(Matrix::Zero(l.hidden_size(), batch));
  }
  return s;
}

LstmStack init_lstm(int layers, int hidden, int vocab, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-0.08, 0.08);
  auto fill = [&](Matrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = dist(rng);
  };
  LstmStack s;
  for (int l = 0; l < layers; ++l) {
    LstmLayerParams p;
    const int in = l == 0 ? vocab : hidden;
    p.w_input = Matrix(4 * hidden, in);
    p.w_recur = Matrix(4 * hidden, hidden);
    p.bias = Matrix::Zero(4 * hidden, 1);
    fill(p.w_input);
    fill(p.w_recur);
    p.bias.block(hidden, 0, hidden, 1).setOnes(); // forget gate
    s.layers.push_back(std::move(p));
  }
  s.w_out = Matrix(vocab, hidden);
  s.b_out = Matrix::Zero(vocab, 1);
  fill(s.w_out);
  return s;
}

LstmStack zeros_like(const LstmStack& params) {
  LstmStack z = params;
  z.for_each_tensor([](Matrix& m) { m.setZero(); });
  return z;
}

Matrix lstm_step(const LstmStack& params, RnnState& state, const std::vector<int>& symbols) {
  if (state.h.size() != params.layers.size()) throw ShapeMismatch("state/layer count mismatch");
  check_symbol_range({symbols}, params.layers.front().input_size());
  const int B = static_cast<int>(symbols.size());
  Matrix below;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    StepCache cache;
    cache.h_prev = state.h[l];
    cache.c_prev = state.c[l];
    if (static_cast<int>(cache.h_prev.cols()) != B) throw ShapeMismatch("state batch mismatch");
    layer_forward(params.layers[l], l == 0 ? &symbols : nullptr, l == 0 ? nullptr : &below,
                  cache);
    state.h[l] = cache.h;
    state.c[l] = cache.c;
    below = cache.h;
  }
  Matrix logits = params.w_out * below;
  logits.colwise() += params.b_out.col(0);
  return logits;
}

Vector softmax(const Vector& logits, double temperature) {
  if (!logits.allFinite()) throw NonFiniteInput("non-finite logits");
  if (temperature <= 0.0) throw NonFiniteInput("temperature must be positive");
  Vector scaled = logits / temperature;
  const double m = scaled.maxCoeff();
  Vector e = (scaled.array() - m).exp();
  return e / e.sum();
}

double cross_entropy_loss(const std::vector<Vector>& probabilities,
                          const std::vector<int>& targets) {
  if (probabilities.size() != targets.size())
    throw ShapeMismatch("probability/target length mismatch");
  if (probabilities.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t t = 0; t < targets.size(); ++t)
    total += -std::log(std::max(probabilities[t](targets[t]), 1e-300));
  return total / static_cast<double>(targets.size());
}

namespace {

struct WindowForward {
  std::vector<std::vector<StepCache>> steps; // [T][L]
  std::vector<Matrix> probs;                 // [T] K x B
  double loss = 0.0;
};

WindowForward forward_window(const LstmStack& params,
                             const std::vector<std::vector<int>>& inputs,
                             const std::vector<std::vector<int>>& targets, double dropout,
                             std::uint64_t dropout_seed) {
  const int T = static_cast<int>(inputs.size());
  const int B = static_cast<int>(inputs[0].size());
  const int L = static_cast<int>(params.layers.size());
  check_symbol_range(inputs, params.layers.front().input_size());
  check_symbol_range(targets, params.vocab_size());

  std::mt19937_64 rng(dropout_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw_mask = [&](int rows) {
    Matrix m = Matrix::Ones(rows, B);
    if (dropout > 0.0) {
      const double keep = 1.0 - dropout;
      for (int j = 0; j < B; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = unit(rng) < keep ? 1.0 / keep : 0.0;
    }
    return m;
  };

  WindowForward fw;
  fw.steps.resize(T, std::vector<StepCache>(L));
  fw.probs.resize(T);
  RnnState state = zero_state(params, B);

  for (int t = 0; t < T; ++t) {
    Matrix below;
    for (int l = 0; l < L; ++l) {
      StepCache& cache = fw.steps[t][l];
      cache.h_prev = state.h[l];
      cache.c_prev = state.c[l];
      if (l > 0) cache.x_dense = below;
      layer_forward(params.layers[l], l == 0 ? &inputs[t] : nullptr,
                    l == 0 ? nullptr : &cache.x_dense, cache);
      state.h[l] = cache.h;
      state.c[l] = cache.c;
      cache.mask = draw_mask(params.layers[l].hidden_size());
      below = cache.h.cwiseProduct(cache.mask);
    }
    Matrix logits = params.w_out * below;
    logits.colwise() += params.b_out.col(0);
    Matrix shifted = logits.rowwise() - logits.colwise().maxCoeff();
    Matrix e = shifted.array().exp();
    fw.probs[t] = e.array().rowwise() / e.colwise().sum().array();
    for (int b = 0; b < B; ++b)
      fw.loss += -std::log(std::max(fw.probs[t](targets[t][b], b), 1e-300));
  }
  fw.loss /= static_cast<double>(T) * B;
  return fw;
}

} // namespace

double window_loss(const LstmStack& params, const std::vector<std::vector<int>>& inputs,
                   const std::vector<std::vector<int>>& targets) {
  return forward_window(params, inputs, targets, 0.0, 0).loss;
}

BpttResult bptt_gradients(const LstmStack& params, const std::vector<std::vector<int>>& inputs,
                          const std::vector<std::vector<int>>& targets, double dropout,
                          std::uint64_t dropout_seed) {
  if (inputs.size() != targets.size()) throw ShapeMismatch("input/target length mismatch");
  if (inputs.empty()) throw ShapeMismatch("empty window");

  const int T = static_cast<int>(inputs.size());
  const int B = static_cast<int>(inputs[0].size());
  const int L = static_cast<int>(params.layers.size());
  const double scale = 1.0 / (static_cast<double>(T) * B);

  WindowForward fw = forward_window(params, inputs, targets, dropout, dropout_seed);

  BpttResult result;
  result.loss = fw.loss;
  result.grads = zeros_like(params);

  std::vector<Matrix> dh_next(L), dc_next(L); // recurrent-path gradients
  for (int l = 0; l < L; ++l) {
    const int H = params.layers[l].hidden_size();
    dh_next[l] = Matrix::Zero(H, B);
    dc_next[l] = Matrix::Zero(H, B);
  }

  // dh from the non-recurrent path (output layer or layer above), per step
  std::vector<std::vector<Matrix>> dh_above(T, std::vector<Matrix>(L));

  for (int t = 0; t < T; ++t) {
    Matrix dy = fw.probs[t] * scale; // K x B
    for (int b = 0; b < B; ++b) dy(targets[t][b], b) -= scale;
    const Matrix dropped =
        fw.steps[t][L - 1].h.cwiseProduct(fw.steps[t][L - 1].mask);
    result.grads.w_out += dy * dropped.transpose();
    result.grads.b_out += dy.rowwise().sum();
    dh_above[t][L - 1] = (params.w_out.transpose() * dy).cwiseProduct(fw.steps[t][L - 1].mask);
  }

  for (int t = T - 1; t >= 0; --t) {
    for (int l = L - 1; l >= 0; --l) {
      const StepCache& cache = fw.steps[t][l];
      const LstmLayerParams& p = params.layers[l];
      LstmLayerParams& gr = result.grads.layers[l];
      const int H = p.hidden_size();

      Matrix dh = dh_next[l];
      if (dh_above[t][l].size() > 0) dh += dh_above[t][l];

      Matrix d_o = dh.cwiseProduct(cache.tanh_c);
      Matrix dc = dc_next[l] +
                  dh.cwiseProduct(cache.o)
                      .cwiseProduct((1.0 - cache.tanh_c.array().square()).matrix());
      Matrix di = dc.cwiseProduct(cache.g);
      Matrix dg = dc.cwiseProduct(cache.i);
      Matrix df = dc.cwiseProduct(cache.c_prev);

      Matrix da(4 * H, B);
      da.topRows(H) = di.cwiseProduct(cache.i).cwiseProduct((1.0 - cache.i.array()).matrix());
      da.middleRows(H, H) =
          df.cwiseProduct(cache.f).cwiseProduct((1.0 - cache.f.array()).matrix());
      da.middleRows(2 * H, H) = dg.cwiseProduct((1.0 - cache.g.array().square()).matrix());
      da.bottomRows(H) =
          d_o.cwiseProduct(cache.o).cwiseProduct((1.0 - cache.o.array()).matrix());

      gr.w_recur += da * cache.h_prev.transpose();
      gr.bias += da.rowwise().sum();
      if (l == 0) {
        for (int b = 0; b < B; ++b) gr.w_input.col(inputs[t][b]) += da.col(b);
      } else {
        gr.w_input += da * cache.x_dense.transpose();
        // propagate through the dropout applied below
        dh_above[t][l - 1] =
            (p.w_input.transpose() * da).cwiseProduct(fw.steps[t][l - 1].mask);
      }
      dh_next[l] = p.w_recur.transpose() * da;
      dc_next[l] = dc.cwiseProduct(cache.f);
    }
  }
  return result;
}

double clip_gradients(LstmStack& grads, double max_norm) {
  double sq = 0.0;
  grads.for_each_tensor([&](const Matrix& m) { sq += m.squaredNorm(); });
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double s = max_norm / norm;
    grads.for_each_tensor([&](Matrix& m) { m *= s; });
  }
  return norm;
}

AdamState init_adam(const LstmStack& params, double learning_rate) {
  AdamState s;
  s.m = zeros_like(params);
  s.v = zeros_like(params);
  s.learning_rate = learning_rate;
  return s;
}

void adam_step(LstmStack& params, const LstmStack& grads, AdamState& state) {
  ++state.step;
  const double b1 = state.beta1, b2 = state.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(state.step));

  // walk the three stacks in lock step
  auto update = [&](Matrix& p, const Matrix& g, Matrix& m, Matrix& v) {
    if (p.rows() != g.rows() || p.cols() != g.cols())
      throw ShapeMismatch("parameter/gradient shape mismatch");
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    const auto m_hat = m.array() / correction1;
    const auto v_hat = v.array() / correction2;
    p.array() -= state.learning_rate * m_hat / (v_hat.sqrt() + state.epsilon);
  };
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    update(params.layers[l].w_input, grads.layers[l].w_input, state.m.layers[l].w_input,
           state.v.layers[l].w_input);
    update(params.layers[l].w_recur, grads.layers[l].w_recur, state.m.layers[l].w_recur,
           state.v.layers[l].w_recur);
    update(params.layers[l].bias, grads.layers[l].bias, state.m.layers[l].bias,
           state.v.layers[l].bias);
  }
  update(params.w_out, grads.w_out, state.m.w_out, state.v.w_out);
  update(params.b_out, grads.b_out, state.m.b_out, state.v.b_out);
}

} // namespace molegen::nn
