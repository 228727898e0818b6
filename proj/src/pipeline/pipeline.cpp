#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "molegen/io.hpp"
#include "molegen/pipeline/pipeline.hpp"
#include "molegen/smiles/canonical.hpp"
#include "molegen/smiles/parse.hpp"

namespace fs = std::filesystem;

namespace molegen::pipeline {

Split split_dataset(const std::vector<std::string>& corpus, const SplitSpec& spec) {
  std::vector<std::string> pool;
  if (spec.dedup_canonical) {
    std::set<std::string> seen;
    for (const auto& line : corpus) {
      try {
        if (seen.insert(smiles::canonicalize(line)).second) pool.push_back(line);
      } catch (const std::exception&) {
        // unparsable lines cannot be deduped on canonical form; drop them
      }
    }
  } else {
    pool = corpus;
  }
  if (pool.size() < 2) throw CorpusTooSmall("need at least 2 molecules to split");

  std::mt19937_64 rng(spec.seed);
  std::shuffle(pool.begin(), pool.end(), rng);

  long train_n = spec.train_count >= 0
                     ? spec.train_count
                     : static_cast<long>(std::llround(spec.train_ratio * pool.size()));
  train_n = std::clamp<long>(train_n, 1, static_cast<long>(pool.size()) - 1);

  Split split;
  split.train.assign(pool.begin(), pool.begin() + train_n);
  split.test.assign(pool.begin() + train_n, pool.end());
  return split;
}

namespace {

struct FilterResult {
  IterationLog log;
  std::vector<std::string> actives; // canonical, unique, predicted active
};

FilterResult score_samples(const std::vector<std::string>& lines,
                           const tpm::ClassifierModel& classifier, int iteration) {
  FilterResult r;
  r.log.iteration = iteration;
  r.log.sampled = static_cast<long>(lines.size());
  const auto stats = eval::generation_stats(lines, {});
  r.log.valid = stats.valid;
  r.log.unique_count = stats.unique_count;
  const int width = static_cast<int>(classifier.weights.size());
  for (const auto& canonical : stats.unique_canonical) {
    auto fp = chem::ecfp(smiles::parse_smiles(canonical), 2, width);
    if (tpm::predict(classifier, fp).active) {
      ++r.log.predicted_active;
      r.actives.push_back(canonical);
    }
  }
  r.log.active_ratio = r.log.unique_count
                           ? static_cast<double>(r.log.predicted_active) / r.log.unique_count
                           : 0.0;
  return r;
}

std::string iter_dir(const std::string& state_dir, int iteration) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "iter_%03d", iteration);
  return state_dir + "/" + buf;
}

void write_iteration(const std::string& dir, const lm::LanguageModel& model,
                     const std::vector<std::string>& samples, const IterationLog& log,
                     const std::set<std::string>& pool) {
  fs::create_directories(dir);
  lm::save_checkpoint(lm::to_checkpoint(model), dir + "/checkpoint.clm");
  io::write_lines(dir + "/samples.smi", samples);
  io::write_lines(dir + "/pool.smi", {pool.begin(), pool.end()});
  std::string stats;
  stats += "iteration: " + std::to_string(log.iteration) + "\n";
  stats += "sampled: " + std::to_string(log.sampled) + "\n";
  stats += "valid: " + std::to_string(log.valid) + "\n";
  stats += "unique: " + std::to_string(log.unique_count) + "\n";
  stats += "predicted_active: " + std::to_string(log.predicted_active) + "\n";
  stats += "new_actives: " + std::to_string(log.new_actives) + "\n";
  stats += "active_ratio: " + std::to_string(log.active_ratio) + "\n";
  io::write_file(dir + "/stats.txt", stats);
}

IterationLog read_iteration_log(const std::string& dir) {
  IterationLog log;
  for (const auto& line : io::read_lines(dir + "/stats.txt")) {
    const auto colon = line.find(": ");
    if (colon == std::string::npos) continue;
    const std::string key = line.substr(0, colon);
    const std::string value = line.substr(colon + 2);
    if (key == "iteration") log.iteration = std::stoi(value);
    else if (key == "sampled") log.sampled = std::stol(value);
    else if (key == "valid") log.valid = std::stol(value);
    else if (key == "unique") log.unique_count = std::stol(value);
    else if (key == "predicted_active") log.predicted_active = std::stol(value);
    else if (key == "new_actives") log.new_actives = std::stol(value);
    else if (key == "active_ratio") log.active_ratio = std::stod(value);
  }
  return log;
}

nlohmann::json cycle_manifest(const CycleConfig& c) {
  // the iteration target is a stopping point, not part of the run identity:
  // re-invoking with more iterations resumes the same cycle
  return {{"sample_symbols", c.sample_symbols},
          {"finetune_epochs", c.finetune_epochs},
          {"temperature", c.temperature},
          {"seed", c.seed},
          {"learning_rate", c.finetune.learning_rate},
          {"batch_size", c.finetune.batch_size},
          {"unroll", c.finetune.unroll},
          {"dropout", c.finetune.dropout},
          {"clip_norm", c.finetune.clip_norm}};
}

class DirLock {
 public:
  explicit DirLock(std::string path) : path_(std::move(path)) {
    if (fs::exists(path_)) throw StateDirLocked("state directory is locked: " + path_);
    io::write_file(path_, "lock\n");
  }
  ~DirLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }

 private:
  std::string path_;
};

} // namespace

CycleState run_cycle(const lm::LanguageModel& base, const tpm::ClassifierModel& classifier,
                     const CycleConfig& config, const std::string& state_dir) {
  fs::create_directories(state_dir);
  DirLock lock(state_dir + "/lock");

  const std::string manifest_path = state_dir + "/manifest.json";
  const nlohmann::json manifest = cycle_manifest(config);
  if (fs::exists(manifest_path)) {
    if (nlohmann::json::parse(io::read_file(manifest_path)) != manifest)
      throw std::runtime_error("state directory holds a different cycle configuration");
  } else {
    io::write_file(manifest_path, manifest.dump(2) + "\n");
  }

  CycleState state;
  lm::LanguageModel model = base;

  // resume from the last complete iteration
  int resume_from = 0;
  for (int i = 0; i <= config.iterations; ++i) {
    const std::string dir = iter_dir(state_dir, i);
    if (!fs::exists(dir + "/stats.txt")) break;
    state.log.push_back(read_iteration_log(dir));
    for (const auto& s : io::read_lines(dir + "/pool.smi")) state.pool.insert(s);
    model = lm::model_from_checkpoint(lm::load_checkpoint(dir + "/checkpoint.clm"));
    resume_from = i + 1;
  }
  state.completed_iterations = resume_from;

  for (int iter = resume_from; iter <= config.iterations; ++iter) {
    std::vector<std::string> samples;
    if (iter == 0) {
      lm::SampleConfig sc;
      sc.max_symbols = config.sample_symbols;
      sc.temperature = config.temperature;
      sc.seed = config.seed ^ 0xc2b2ae3d27d4eb4fULL;
      samples = lm::sample_stream(model, sc);
    } else {
      // cumulative retraining: fine-tune the latest model on the pool,
      // sampling after each epoch
      lm::TrainingConfig ft = config.finetune;
      ft.epochs = config.finetune_epochs;
      ft.seed = config.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(iter));
      const std::vector<std::string> pool_lines(state.pool.begin(), state.pool.end());
      model = lm::fine_tune(model, pool_lines, ft, nullptr,
                            [&](int epoch, double, const lm::LanguageModel& snapshot) {
                              if (epoch == 0) return;
                              lm::SampleConfig sc;
                              sc.max_symbols = config.sample_symbols;
                              sc.temperature = config.temperature;
                              sc.seed = ft.seed ^ (0xd1b54a32d192ed03ULL *
                                                   static_cast<std::uint64_t>(epoch));
                              auto epoch_lines = lm::sample_stream(snapshot, sc);
                              samples.insert(samples.end(), epoch_lines.begin(),
                                             epoch_lines.end());
                            });
    }

    FilterResult scored = score_samples(samples, classifier, iter);
    for (const auto& canonical : scored.actives)
      if (state.pool.insert(canonical).second) ++scored.log.new_actives;
    state.log.push_back(scored.log);
    state.completed_iterations = iter + 1;

    write_iteration(iter_dir(state_dir, iter), model, samples, scored.log, state.pool);

    if (iter == 0 && state.pool.empty())
      throw EmptyActivePool(
          "no sampled molecule was predicted active by the unbiased model; "
          "consider relaxing the classifier threshold or sampling more symbols");
  }
  return state;
}

std::vector<EpochSample> epoch_sweep(const lm::LanguageModel& base,
                                     const std::vector<std::string>& actives, int epochs,
                                     long per_epoch_symbols, double temperature,
                                     std::uint64_t seed, const lm::TrainingConfig* finetune) {
  std::set<std::string> training_canonical;
  for (const auto& line : actives) {
    try {
      training_canonical.insert(smiles::canonicalize(line));
    } catch (const std::exception&) {
    }
  }

  std::vector<EpochSample> out;
  auto sample_epoch = [&](int epoch, const lm::LanguageModel& model) {
    lm::SampleConfig sc;
    sc.max_symbols = per_epoch_symbols;
    sc.temperature = temperature;
    sc.seed = seed ^ (0xbf58476d1ce4e5b9ULL * static_cast<std::uint64_t>(epoch + 1));
    EpochSample es;
    es.epoch = epoch;
    es.lines = lm::sample_stream(model, sc);
    es.stats = eval::generation_stats(es.lines, training_canonical);
    out.push_back(std::move(es));
  };

  lm::TrainingConfig ft = finetune ? *finetune : base.config;
  ft.epochs = epochs;
  ft.seed = seed;
  lm::fine_tune(base, actives, ft, nullptr,
                [&](int epoch, double, const lm::LanguageModel& snapshot) {
                  sample_epoch(epoch, snapshot);
                });
  return out;
}

} // namespace molegen::pipeline
