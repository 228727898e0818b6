#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "molegen/lm/model.hpp"

namespace molegen::lm {

namespace {

std::vector<float> to_floats(const nn::Matrix& m) {
  std::vector<float> out(static_cast<std::size_t>(m.size()));
  std::size_t k = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) out[k++] = static_cast<float>(m(i, j));
  return out;
}

nn::Matrix from_floats(const std::vector<float>& v, Eigen::Index rows, Eigen::Index cols) {
  if (static_cast<Eigen::Index>(v.size()) != rows * cols)
    throw CorruptPayload("tensor element count does not match declared shape");
  nn::Matrix m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = static_cast<double>(v[k++]);
  return m;
}

// Encodes the whole corpus as one symbol stream, EOL after every line,
// tiled if shorter than one window.
std::vector<int> corpus_stream(const std::vector<std::string>& corpus, const Vocabulary& vocab,
                               int window) {
  std::vector<int> stream;
  for (const auto& line : corpus) {
    auto ids = vocab.encode(line, true);
    stream.insert(stream.end(), ids.begin(), ids.end());
  }
  if (stream.empty()) throw EmptyCorpus("corpus encodes to an empty stream");
  const std::size_t need = static_cast<std::size_t>(window) + 1;
  while (stream.size() < need) {
    std::vector<int> copy = stream;
    stream.insert(stream.end(), copy.begin(), copy.end());
  }
  return stream;
}

LanguageModel run_training(LanguageModel model, const std::vector<std::string>& corpus,
                           const TrainingConfig& config, const EpochCallback& on_epoch) {
  const int T = config.unroll;
  const auto stream = corpus_stream(corpus, model.vocab, T);
  const std::size_t n_windows = (stream.size() - 1 + T - 1) / T;

  auto symbol_at = [&](std::size_t pos) { return stream[pos % stream.size()]; };

  std::vector<std::size_t> starts(n_windows);
  for (std::size_t w = 0; w < n_windows; ++w) starts[w] = w * static_cast<std::size_t>(T);

  nn::AdamState adam = nn::init_adam(model.params, config.learning_rate);
  std::uint64_t batch_counter = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::mt19937_64 shuffle_rng(config.seed ^ (0x9e3779b97f4a7c15ULL * epoch));
    std::shuffle(starts.begin(), starts.end(), shuffle_rng);

    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t first = 0; first < n_windows; first += config.batch_size) {
      const int B = static_cast<int>(std::min<std::size_t>(config.batch_size, n_windows - first));
      std::vector<std::vector<int>> inputs(T, std::vector<int>(B));
      std::vector<std::vector<int>> targets(T, std::vector<int>(B));
      for (int b = 0; b < B; ++b) {
        const std::size_t s = starts[first + b];
        for (int t = 0; t < T; ++t) {
          inputs[t][b] = symbol_at(s + t);
          targets[t][b] = symbol_at(s + t + 1);
        }
      }
      auto result = nn::bptt_gradients(model.params, inputs, targets, config.dropout,
                                       config.seed ^ (0xd1b54a32d192ed03ULL * ++batch_counter));
      if (!std::isfinite(result.loss))
        throw NonFiniteLoss("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                            std::to_string(batches));
      nn::clip_gradients(result.grads, config.clip_norm);
      nn::adam_step(model.params, result.grads, adam);
      epoch_loss += result.loss;
      ++batches;
    }
    model.loss_history.push_back(epoch_loss / static_cast<double>(batches));
    if (on_epoch) {
      LanguageModel snapshot = model;
      quantize_params(snapshot.params);
      on_epoch(epoch, model.loss_history.back(), snapshot);
    }
  }

  quantize_params(model.params);
  return model;
}

} // namespace

void quantize_params(nn::LstmStack& params) {
  params.for_each_tensor([](nn::Matrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        m(i, j) = static_cast<double>(static_cast<float>(m(i, j)));
  });
}

Checkpoint to_checkpoint(const LanguageModel& model) {
  Checkpoint ckpt;
  ckpt.meta["kind"] = "language_model";
  ckpt.meta["vocabulary"] = model.vocab.symbols();
  ckpt.meta["architecture"] = {{"layers", model.config.layers},
                               {"hidden", model.config.hidden},
                               {"vocab", model.vocab.size()}};
  ckpt.meta["training"] = {{"dropout", model.config.dropout},
                           {"batch_size", model.config.batch_size},
                           {"unroll", model.config.unroll},
                           {"clip_norm", model.config.clip_norm},
                           {"learning_rate", model.config.learning_rate},
                           {"seed", model.config.seed}};
  ckpt.meta["loss_history"] = model.loss_history;

  for (std::size_t l = 0; l < model.params.layers.size(); ++l) {
    const auto& layer = model.params.layers[l];
    const std::string prefix = "lstm" + std::to_string(l) + ".";
    ckpt.tensors.emplace_back(prefix + "w_input", to_floats(layer.w_input));
    ckpt.tensors.emplace_back(prefix + "w_recur", to_floats(layer.w_recur));
    ckpt.tensors.emplace_back(prefix + "bias", to_floats(layer.bias));
  }
  ckpt.tensors.emplace_back("out.w", to_floats(model.params.w_out));
  ckpt.tensors.emplace_back("out.b", to_floats(model.params.b_out));
  return ckpt;
}

LanguageModel model_from_checkpoint(const Checkpoint& ckpt) {
  if (!ckpt.meta.contains("kind") || ckpt.meta["kind"] != "language_model")
    throw CorruptPayload("checkpoint does not hold a language model");
  LanguageModel model;
  model.vocab = Vocabulary::from_symbols(ckpt.meta["vocabulary"].get<std::vector<std::string>>());
  const auto& arch = ckpt.meta["architecture"];
  model.config.layers = arch["layers"].get<int>();
  model.config.hidden = arch["hidden"].get<int>();
  const auto& tr = ckpt.meta["training"];
  model.config.dropout = tr["dropout"].get<double>();
  model.config.batch_size = tr["batch_size"].get<int>();
  model.config.unroll = tr["unroll"].get<int>();
  model.config.clip_norm = tr["clip_norm"].get<double>();
  model.config.learning_rate = tr["learning_rate"].get<double>();
  model.config.seed = tr["seed"].get<std::uint64_t>();
  model.loss_history = ckpt.meta["loss_history"].get<std::vector<double>>();

  const int H = model.config.hidden;
  const int K = model.vocab.size();
  for (int l = 0; l < model.config.layers; ++l) {
    const std::string prefix = "lstm" + std::to_string(l) + ".";
    nn::LstmLayerParams layer;
    const int in = l == 0 ? K : H;
    layer.w_input = from_floats(ckpt.tensor(prefix + "w_input"), 4 * H, in);
    layer.w_recur = from_floats(ckpt.tensor(prefix + "w_recur"), 4 * H, H);
    layer.bias = from_floats(ckpt.tensor(prefix + "bias"), 4 * H, 1);
    model.params.layers.push_back(std::move(layer));
  }
  model.params.w_out = from_floats(ckpt.tensor("out.w"), K, H);
  model.params.b_out = from_floats(ckpt.tensor("out.b"), K, 1);
  return model;
}

LanguageModel train(const std::vector<std::string>& corpus, const TrainingConfig& config,
                    const EpochCallback& on_epoch) {
  LanguageModel model;
  model.vocab = Vocabulary::from_corpus(corpus);
  model.config = config;
  model.params = nn::init_lstm(config.layers, config.hidden, model.vocab.size(), config.seed);
  return run_training(std::move(model), corpus, config, on_epoch);
}

LanguageModel fine_tune(const LanguageModel& base, const std::vector<std::string>& corpus,
                        const TrainingConfig& config, FineTuneReport* report,
                        const EpochCallback& on_epoch) {
  std::vector<std::string> usable;
  int skipped = 0;
  for (const auto& line : corpus) {
    if (base.vocab.covers(line)) usable.push_back(line);
    else ++skipped;
  }
  if (report) {
    report->lines_used = static_cast<int>(usable.size());
    report->lines_skipped = skipped;
  }
  if (usable.empty())
    throw VocabularyMismatch("all " + std::to_string(skipped) +
                             " fine-tuning lines contain out-of-vocabulary symbols");

  LanguageModel model = base; // vocabulary and architecture fixed
  TrainingConfig run = config;
  run.layers = base.config.layers;
  run.hidden = base.config.hidden;
  model.config = run;
  model.loss_history = base.loss_history;
  if (on_epoch) {
    LanguageModel snapshot = model;
    quantize_params(snapshot.params);
    const double base_loss = base.loss_history.empty() ? 0.0 : base.loss_history.back();
    on_epoch(0, base_loss, snapshot); // epoch 0 = base parameters
  }
  return run_training(std::move(model), usable, run, on_epoch);
}

double corpus_loss(const LanguageModel& model, const std::vector<std::string>& corpus) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& line : corpus) {
    auto ids = model.vocab.encode(line, true);
    ids.insert(ids.begin(), model.vocab.eol_index()); // start-of-line context
    const int T = static_cast<int>(ids.size()) - 1;
    if (T <= 0) continue;
    std::vector<std::vector<int>> inputs(T, std::vector<int>(1)), targets(T, std::vector<int>(1));
    for (int t = 0; t < T; ++t) {
      inputs[t][0] = ids[t];
      targets[t][0] = ids[t + 1];
    }
    total += nn::window_loss(model.params, inputs, targets) * T;
    count += static_cast<std::size_t>(T);
  }
  return count ? total / static_cast<double>(count) : 0.0;
}

std::vector<std::string> sample_stream(const LanguageModel& model, const SampleConfig& config) {
  if ((config.max_symbols > 0) == (config.max_molecules > 0))
    throw std::invalid_argument("exactly one stopping criterion must be set");

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int K = model.vocab.size();
  const int eol = model.vocab.eol_index();

  nn::RnnState state = nn::zero_state(model.params, 1);
  int current = eol;
  std::string line;
  std::vector<std::string> lines;
  long symbols = 0;

  if (config.random_seed_symbol) {
    // Fig-3 style: a uniformly drawn non-EOL symbol starts the first line.
    std::uniform_int_distribution<int> pick(0, K - 2);
    int k = pick(rng);
    if (k >= eol) ++k;
    current = k;
    line += model.vocab.symbol(k);
    ++symbols;
  }

  auto done = [&] {
    if (config.max_symbols > 0) return symbols >= config.max_symbols;
    return static_cast<long>(lines.size()) >= config.max_molecules;
  };

  while (!done()) {
    nn::Matrix logits = nn::lstm_step(model.params, state, {current});
    nn::Vector p = nn::softmax(logits.col(0), config.temperature);
    const double u = unit(rng);
    double acc = 0.0;
    int k = K - 1;
    for (int i = 0; i < K; ++i) {
      acc += p(i);
      if (u < acc) {
        k = i;
        break;
      }
    }
    ++symbols;
    if (k == eol) {
      lines.push_back(line);
      line.clear();
    } else {
      line += model.vocab.symbol(k);
    }
    current = k;
  }
  return lines; // a trailing partial line is not a molecule
}

} // namespace molegen::lm
