#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "molegen/eval/eval.hpp"
#include "molegen/lm/model.hpp"
#include "molegen/tpm/tpm.hpp"

namespace molegen::pipeline {

struct CorpusTooSmall : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyActivePool : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StateDirLocked : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SplitSpec {
  double train_ratio = 0.5; // used when train_count < 0
  long train_count = -1;    // absolute train size when >= 0
  std::uint64_t seed = 0;
  bool dedup_canonical = true;
};

struct Split {
  std::vector<std::string> train, test;
};

// Seed-reproducible disjoint split; dedup on canonical forms first when
// requested (invalid lines are dropped with the duplicates).
Split split_dataset(const std::vector<std::string>& corpus, const SplitSpec& spec);

struct IterationLog {
  int iteration = 0;
  long sampled = 0;          // lines sampled this iteration
  long valid = 0;
  long unique_count = 0;     // unique valid canonical forms
  long predicted_active = 0;
  long new_actives = 0;      // appended to the pool
  double active_ratio = 0.0; // predicted_active / unique_count
};

struct CycleConfig {
  int iterations = 3;
  long sample_symbols = 10000; // symbols per sampling round (desk scale)
  int finetune_epochs = 5;
  double temperature = 1.0;
  std::uint64_t seed = 0;
  lm::TrainingConfig finetune; // epochs field is ignored (finetune_epochs rules)
};

struct CycleState {
  int completed_iterations = 0; // counts iteration 0 as the first entry
  std::set<std::string> pool;   // cumulative canonical actives
  std::vector<IterationLog> log;
};

// Fig-7 design cycle: iteration 0 samples from the unbiased model; each
// following iteration fine-tunes the latest model on the cumulative pool,
// samples after each epoch, filters predicted actives, and appends them.
// State is checkpointed per iteration under state_dir and the run resumes
// from the last complete iteration when re-invoked with the same manifest.
CycleState run_cycle(const lm::LanguageModel& base, const tpm::ClassifierModel& classifier,
                     const CycleConfig& config, const std::string& state_dir);

struct EpochSample {
  int epoch = 0; // 0 = unbiased base model
  std::vector<std::string> lines;
  eval::GenerationStats stats;
};

// Fine-tunes on the actives corpus, sampling after every epoch (including
// the pre-fine-tuning epoch 0). Stats are computed against the actives as
// the training set. `finetune` optionally overrides the optimizer settings
// (its epochs/seed fields are replaced by the explicit arguments); by
// default the base model's own training config is reused.
std::vector<EpochSample> epoch_sweep(const lm::LanguageModel& base,
                                     const std::vector<std::string>& actives,
                                     int epochs, long per_epoch_symbols,
                                     double temperature, std::uint64_t seed,
                                     const lm::TrainingConfig* finetune = nullptr);

} // namespace molegen::pipeline
