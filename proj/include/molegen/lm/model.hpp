#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "molegen/lm/checkpoint.hpp"
#include "molegen/lm/vocabulary.hpp"
#include "molegen/nn/lstm.hpp"

namespace molegen::lm {

struct NonFiniteLoss : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrainingConfig {
  int layers = 3;
  int hidden = 256; // paper scale is 1024; desk-scale default
  double dropout = 0.2;
  int batch_size = 128;
  int unroll = 64;
  double clip_norm = 5.0;
  double learning_rate = 0.001;
  int epochs = 10;
  std::uint64_t seed = 0;
};

struct LanguageModel {
  Vocabulary vocab;
  nn::LstmStack params;
  TrainingConfig config;                 // architecture + last training settings
  std::vector<double> loss_history;      // nats/symbol per epoch, cumulative
};

// Parameters quantized to float32 (the checkpoint precision) so that an
// in-memory model and its saved/loaded copy behave identically.
void quantize_params(nn::LstmStack& params);

Checkpoint to_checkpoint(const LanguageModel& model);
LanguageModel model_from_checkpoint(const Checkpoint& ckpt);

// epoch is 1-based; called after each epoch with the quantized snapshot.
using EpochCallback = std::function<void(int epoch, double loss, const LanguageModel&)>;

// Trains a fresh model on the corpus lines (no trailing newline in each
// line). The concatenated corpus is cut into contiguous unroll-length
// windows, shuffled per epoch; state resets to zero per window.
LanguageModel train(const std::vector<std::string>& corpus, const TrainingConfig& config,
                    const EpochCallback& on_epoch = nullptr);

struct FineTuneReport {
  int lines_used = 0;
  int lines_skipped = 0; // symbols outside the base vocabulary
};

// Continues training from base parameters with fresh optimizer moments.
// Vocabulary and architecture are fixed by the base model; offending lines
// are skipped and counted. Throws VocabularyMismatch when nothing remains.
LanguageModel fine_tune(const LanguageModel& base, const std::vector<std::string>& corpus,
                        const TrainingConfig& config, FineTuneReport* report = nullptr,
                        const EpochCallback& on_epoch = nullptr);

// Mean next-symbol cross-entropy of the model on held-out lines (eval mode).
double corpus_loss(const LanguageModel& model, const std::vector<std::string>& corpus);

struct SampleConfig {
  long max_symbols = 0;   // stop after this many generated symbols, or
  long max_molecules = 0; // stop after this many complete lines (exactly one active)
  double temperature = 1.0;
  std::uint64_t seed = 0;
  bool random_seed_symbol = false; // default: EOL-primed start-of-line
};

// Symbol-by-symbol multinomial sampling; EOL delimits molecules and a
// trailing partial line is discarded. Pure function of (model, config).
std::vector<std::string> sample_stream(const LanguageModel& model, const SampleConfig& config);

} // namespace molegen::lm
