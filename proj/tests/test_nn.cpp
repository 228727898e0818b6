#include <doctest.h>

#include <cmath>
#include <random>

#include "molegen/nn/lstm.hpp"

using namespace molegen::nn;

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

LstmStack small_stack(int layers, int hidden, int vocab, std::uint64_t seed) {
  return init_lstm(layers, hidden, vocab, seed);
}

std::vector<std::vector<int>> random_symbols(int T, int B, int vocab, std::mt19937_64& rng) {
  std::vector<std::vector<int>> out(T, std::vector<int>(B));
  for (auto& row : out)
    for (auto& v : row) v = static_cast<int>(rng() % vocab);
  return out;
}

} // namespace

TEST_CASE("zero-weight network: gates at 1/2, cell tanh scaled") {
  LstmStack p = small_stack(1, 2, 3, 0);
  p.for_each_tensor([](Matrix& m) { m.setZero(); });
  RnnState s = zero_state(p, 1);
  Matrix logits = lstm_step(p, s, {0});
  // all-zero weights: i=f=o=0.5, g=0 -> c=0, h=0, logits=0
  CHECK(logits.norm() == doctest::Approx(0.0));
  CHECK(s.c[0].norm() == doctest::Approx(0.0));
  CHECK(s.h[0].norm() == doctest::Approx(0.0));
}

TEST_CASE("one-unit LSTM matches the scalar hand oracle") {
  // H=1, vocab=2, one layer; fixed distinct weights
  LstmStack p;
  p.layers.resize(1);
  auto& l = p.layers[0];
  l.w_input = Matrix(4, 2);
  l.w_input << 0.1, -0.2, // input gate row
      0.3, 0.4,           // forget gate row
      -0.5, 0.6,          // cell candidate row
      0.7, -0.8;          // output gate row
  l.w_recur = Matrix(4, 1);
  l.w_recur << 0.05, -0.15, 0.25, -0.35;
  l.bias = Matrix(4, 1);
  l.bias << 0.01, 1.0, -0.02, 0.03;
  p.w_out = Matrix(2, 1);
  p.w_out << 1.5, -2.5;
  p.b_out = Matrix(2, 1);
  p.b_out << 0.1, 0.2;

  RnnState s = zero_state(p, 1);
  double h = 0.0, c = 0.0;
  std::vector<int> sequence = {0, 1, 1, 0};
  for (int sym : sequence) {
    const double x0 = sym == 0 ? 1.0 : 0.0;
    const double x1 = sym == 1 ? 1.0 : 0.0;
    const double i_g = sigmoid(0.1 * x0 - 0.2 * x1 + 0.05 * h + 0.01);
    const double f_g = sigmoid(0.3 * x0 + 0.4 * x1 - 0.15 * h + 1.0);
    const double g_g = std::tanh(-0.5 * x0 + 0.6 * x1 + 0.25 * h - 0.02);
    const double o_g = sigmoid(0.7 * x0 - 0.8 * x1 - 0.35 * h + 0.03);
    c = f_g * c + i_g * g_g;
    h = o_g * std::tanh(c);

    Matrix logits = lstm_step(p, s, {sym});
    CHECK(s.c[0](0, 0) == doctest::Approx(c).epsilon(1e-12));
    CHECK(s.h[0](0, 0) == doctest::Approx(h).epsilon(1e-12));
    CHECK(logits(0, 0) == doctest::Approx(1.5 * h + 0.1).epsilon(1e-12));
    CHECK(logits(1, 0) == doctest::Approx(-2.5 * h + 0.2).epsilon(1e-12));
  }
}

TEST_CASE("step-by-step recursion equals the unrolled window loss") {
  std::mt19937_64 rng(42);
  LstmStack p = small_stack(2, 6, 5, 7);
  auto inputs = random_symbols(9, 4, 5, rng);
  auto targets = random_symbols(9, 4, 5, rng);

  RnnState s = zero_state(p, 4);
  double total = 0.0;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    Matrix logits = lstm_step(p, s, inputs[t]);
    for (int b = 0; b < 4; ++b) {
      Vector probs = softmax(logits.col(b));
      total += -std::log(probs(targets[t][b]));
    }
  }
  const double mean = total / (inputs.size() * 4);
  CHECK(window_loss(p, inputs, targets) == doctest::Approx(mean).epsilon(1e-10));
}

TEST_CASE("softmax: direct evaluation, temperature, normalization") {
  Vector logits(3);
  logits << 1.0, 2.0, 3.0;
  Vector probs = softmax(logits);
  const double z = std::exp(1.0) + std::exp(2.0) + std::exp(3.0);
  CHECK(probs(0) == doctest::Approx(std::exp(1.0) / z).epsilon(1e-12));
  CHECK(probs(1) == doctest::Approx(std::exp(2.0) / z).epsilon(1e-12));
  CHECK(probs(2) == doctest::Approx(std::exp(3.0) / z).epsilon(1e-12));
  CHECK(std::abs(probs.sum() - 1.0) <= 1e-9);

  // temperature sharpens toward the arg max
  Vector cold = softmax(logits, 1e-3);
  CHECK(cold(2) == doctest::Approx(1.0).epsilon(1e-6));
  // large logits do not overflow thanks to max subtraction
  Vector big(2);
  big << 1000.0, 1001.0;
  Vector big_probs = softmax(big);
  CHECK(std::isfinite(big_probs(0)));
  CHECK(std::abs(big_probs.sum() - 1.0) <= 1e-9);

  Vector bad(2);
  bad << 1.0, std::nan("");
  CHECK_THROWS_AS(softmax(bad), NonFiniteInput);
}

TEST_CASE("uniform prediction scores ln K") {
  Vector logits = Vector::Zero(5);
  std::vector<Vector> probs = {softmax(logits)};
  CHECK(cross_entropy_loss(probs, {3}) == doctest::Approx(std::log(5.0)).epsilon(1e-12));
}

TEST_CASE("analytic gradients match central finite differences") {
  std::mt19937_64 rng(1234);
  LstmStack p = small_stack(2, 8, 5, 99);
  for (int batch = 0; batch < 3; ++batch) {
    auto inputs = random_symbols(6, 3, 5, rng);
    auto targets = random_symbols(6, 3, 5, rng);
    auto result = bptt_gradients(p, inputs, targets, 0.0, 0);
    CHECK(result.loss ==
          doctest::Approx(window_loss(p, inputs, targets)).epsilon(1e-10));

    // per-tensor relative L2 error; central differences bottom out around
    // 1e-11 absolute, so entrywise ratios are meaningless for ~1e-9 entries
    double worst = 0.0;
    auto check_tensor = [&](Matrix& param_tensor, const Matrix& grad_tensor) {
      double diff_sq = 0.0, ref_sq = 0.0;
      for (int i = 0; i < param_tensor.size(); ++i) {
        double* entry = param_tensor.data() + i;
        const double saved = *entry;
        *entry = saved + 1e-5;
        const double up = window_loss(p, inputs, targets);
        *entry = saved - 1e-5;
        const double down = window_loss(p, inputs, targets);
        *entry = saved;
        const double numeric = (up - down) / 2e-5;
        const double analytic = grad_tensor.data()[i];
        diff_sq += (analytic - numeric) * (analytic - numeric);
        ref_sq += numeric * numeric;
      }
      worst = std::max(worst, std::sqrt(diff_sq / std::max(1e-300, ref_sq)));
    };
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
      check_tensor(p.layers[l].w_input, result.grads.layers[l].w_input);
      check_tensor(p.layers[l].w_recur, result.grads.layers[l].w_recur);
      check_tensor(p.layers[l].bias, result.grads.layers[l].bias);
    }
    check_tensor(p.w_out, result.grads.w_out);
    check_tensor(p.b_out, result.grads.b_out);
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("gradient clipping rescales to the max norm and keeps direction") {
  LstmStack g = small_stack(1, 4, 3, 5);
  double norm_sq = 0.0;
  g.for_each_tensor([&](const Matrix& m) { norm_sq += m.squaredNorm(); });
  const double norm = std::sqrt(norm_sq);

  LstmStack clipped = g;
  const double reported = clip_gradients(clipped, norm / 2);
  CHECK(reported == doctest::Approx(norm).epsilon(1e-12));
  double clipped_sq = 0.0;
  clipped.for_each_tensor([&](const Matrix& m) { clipped_sq += m.squaredNorm(); });
  CHECK(std::sqrt(clipped_sq) == doctest::Approx(norm / 2).epsilon(1e-9));
  // direction preserved: clipped = g * 0.5
  CHECK((clipped.w_out - 0.5 * g.w_out).norm() == doctest::Approx(0.0).epsilon(1e-12));

  // below the threshold nothing changes
  LstmStack untouched = g;
  clip_gradients(untouched, norm * 2);
  CHECK((untouched.w_out - g.w_out).norm() == doctest::Approx(0.0));
}

TEST_CASE("first adam step moves by about -lr * sign(gradient)") {
  LstmStack p = small_stack(1, 3, 3, 11);
  LstmStack before = p;
  LstmStack grads = zeros_like(p);
  grads.w_out.setConstant(0.7);   // positive gradient
  grads.b_out.setConstant(-0.3);  // negative gradient
  AdamState adam = init_adam(p, 0.01);
  adam_step(p, grads, adam);
  // m_hat/sqrt(v_hat) = g/|g| on step 1 (up to epsilon)
  CHECK((p.w_out - before.w_out).maxCoeff() == doctest::Approx(-0.01).epsilon(1e-4));
  CHECK((p.b_out - before.b_out).minCoeff() == doctest::Approx(0.01).epsilon(1e-4));
  // zero-gradient tensors stay put
  CHECK((p.layers[0].w_input - before.layers[0].w_input).norm() == doctest::Approx(0.0));
}

TEST_CASE("adam minimizes a quadratic over the output weights") {
  LstmStack p = small_stack(1, 3, 4, 13);
  Matrix target = Matrix::Constant(4, 3, 1.25);
  AdamState adam = init_adam(p, 0.05);
  for (int it = 0; it < 800; ++it) {
    LstmStack grads = zeros_like(p);
    grads.w_out = p.w_out - target; // d/dw of 0.5*||w - target||^2
    adam_step(p, grads, adam);
  }
  CHECK((p.w_out - target).norm() < 1e-3);
}

TEST_CASE("dropout 0 training forward equals eval forward") {
  std::mt19937_64 rng(77);
  LstmStack p = small_stack(3, 5, 4, 17);
  auto inputs = random_symbols(8, 2, 4, rng);
  auto targets = random_symbols(8, 2, 4, rng);
  auto res = bptt_gradients(p, inputs, targets, 0.0, 12345);
  CHECK(res.loss == doctest::Approx(window_loss(p, inputs, targets)).epsilon(1e-12));
}

TEST_CASE("dropout is reproducible from its seed") {
  std::mt19937_64 rng(78);
  LstmStack p = small_stack(2, 6, 4, 19);
  auto inputs = random_symbols(8, 3, 4, rng);
  auto targets = random_symbols(8, 3, 4, rng);
  auto a = bptt_gradients(p, inputs, targets, 0.5, 42);
  auto b = bptt_gradients(p, inputs, targets, 0.5, 42);
  CHECK(a.loss == b.loss);
  CHECK((a.grads.w_out - b.grads.w_out).norm() == 0.0);
  auto c = bptt_gradients(p, inputs, targets, 0.5, 43);
  CHECK(a.loss != c.loss);
}

TEST_CASE("duplicated batch columns give identical logits and the same loss") {
  LstmStack p = small_stack(2, 5, 4, 23);
  std::vector<std::vector<int>> inputs = {{1}, {2}, {0}, {3}};
  std::vector<std::vector<int>> targets = {{2}, {0}, {3}, {1}};
  std::vector<std::vector<int>> inputs3(4), targets3(4);
  for (int t = 0; t < 4; ++t) {
    inputs3[t] = {inputs[t][0], inputs[t][0], inputs[t][0]};
    targets3[t] = {targets[t][0], targets[t][0], targets[t][0]};
  }
  CHECK(window_loss(p, inputs, targets) ==
        doctest::Approx(window_loss(p, inputs3, targets3)).epsilon(1e-12));

  RnnState s1 = zero_state(p, 1), s3 = zero_state(p, 3);
  for (int t = 0; t < 4; ++t) {
    Matrix l1 = lstm_step(p, s1, inputs[t]);
    Matrix l3 = lstm_step(p, s3, inputs3[t]);
    for (int b = 0; b < 3; ++b) CHECK((l3.col(b) - l1.col(0)).norm() == doctest::Approx(0.0));
  }
}
