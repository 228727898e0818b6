// molegen: character-level SMILES language model toolkit.
// Subcommands cover the full desk-scale design loop: corpus handling,
// training, fine-tuning, sampling, fingerprinting, target prediction,
// evaluation, and the generate-score-retrain cycle.

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "molegen/chem/metrics.hpp"
#include "molegen/eval/eval.hpp"
#include "molegen/io.hpp"
#include "molegen/lm/model.hpp"
#include "molegen/pipeline/pipeline.hpp"
#include "molegen/smiles/canonical.hpp"
#include "molegen/smiles/parse.hpp"
#include "molegen/smiles/valence.hpp"
#include "molegen/tpm/tpm.hpp"

namespace fs = std::filesystem;
using namespace molegen;

namespace {

constexpr const char* kVersion = "0.1.0";

std::vector<std::string> read_input(const std::string& path) {
  if (path == "-") return io::read_lines_stream(std::cin);
  return io::read_lines(path);
}

void write_output(const std::string& path, const std::vector<std::string>& lines) {
  if (path == "-") {
    for (const auto& l : lines) std::cout << l << "\n";
  } else {
    io::write_lines(path, lines);
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") std::cout << text;
  else io::write_file(path, text);
}

// Run manifest: stable key: value lines; re-running a command with the same
// resolved configuration and input digests reproduces outputs bit-identically.
struct Manifest {
  std::string command;
  std::map<std::string, std::string> entries;

  void set(const std::string& key, const std::string& value) { entries[key] = value; }
  void set(const std::string& key, double value) {
    std::ostringstream os;
    os << value;
    entries[key] = os.str();
  }
  void set(const std::string& key, long long value) { entries[key] = std::to_string(value); }
  void input(const std::string& name, const std::string& path) {
    if (path == "-") return;
    entries["input." + name + ".path"] = path;
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(io::file_digest(path)));
    entries["input." + name + ".digest"] = buf;
  }
  void write(const std::string& out_dir) const {
    if (out_dir.empty() || out_dir == "-") return;
    fs::create_directories(out_dir);
    std::ostringstream os;
    os << "command: " << command << "\n";
    os << "toolkit_version: " << kVersion << "\n";
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    os << "timestamp_unix: "
       << std::chrono::duration_cast<std::chrono::seconds>(now).count() << "\n";
    for (const auto& [k, v] : entries) os << k << ": " << v << "\n";
    io::write_file(out_dir + "/manifest.txt", os.str());
  }
};

// Layered config: defaults < --config JSON file < command-line flags.
// The file is applied as defaults before CLI11 parses the flags.
nlohmann::json prescan_config(int argc, char** argv) {
  for (int i = 1; i < argc - 1; ++i) {
    if (std::string(argv[i]) == "--config")
      return nlohmann::json::parse(io::read_file(argv[i + 1]));
  }
  return nlohmann::json::object();
}

template <typename T>
void from_config(const nlohmann::json& cfg, const char* key, T& value) {
  if (cfg.contains(key)) value = cfg[key].get<T>();
}

std::string escape_symbol(const std::string& s) { return s == "\n" ? "\\n" : s; }

std::string fp_csv(const std::vector<std::string>& lines, int radius, int width) {
  std::ostringstream os;
  os << "smiles,molecular_weight,h_bond_donors,h_bond_acceptors,rotatable_bonds,ring_count,"
        "fingerprint_bits\n";
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    smiles::MolGraph g;
    try {
      g = smiles::parse_smiles(lines[i]);
      auto v = smiles::validate(g);
      if (!v.ok) throw std::invalid_argument(v.reason);
    } catch (const std::exception& e) {
      throw std::runtime_error("line " + std::to_string(i + 1) + ": " + e.what());
    }
    const auto d = chem::descriptors(g);
    const auto fp = chem::ecfp(g, radius, width);
    os << smiles::canonical_smiles(g) << "," << d.molecular_weight << "," << d.h_bond_donors
       << "," << d.h_bond_acceptors << "," << d.rotatable_bonds << "," << d.ring_count << ",";
    for (std::size_t b = 0; b < fp.set_bits.size(); ++b)
      os << (b ? ";" : "") << fp.set_bits[b];
    os << "\n";
  }
  return os.str();
}

std::set<std::string> canonical_set(const std::vector<std::string>& lines) {
  std::set<std::string> out;
  for (const auto& l : lines) {
    if (l.empty()) continue;
    try {
      out.insert(smiles::canonicalize(l));
    } catch (const std::exception&) {
    }
  }
  return out;
}

std::vector<tpm::ActivityRecord> read_activity_csv(const std::string& path) {
  auto lines = read_input(path);
  std::vector<tpm::ActivityRecord> records;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty() || (i == 0 && lines[i].rfind("smiles", 0) == 0)) continue;
    std::istringstream is(lines[i]);
    tpm::ActivityRecord r;
    std::string value;
    if (!std::getline(is, r.smiles, ',') || !std::getline(is, r.measure, ',') ||
        !std::getline(is, value))
      throw std::runtime_error(path + ":" + std::to_string(i + 1) +
                               ": expected smiles,measure,value");
    r.value = std::stod(value);
    records.push_back(std::move(r));
  }
  return records;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"character-level SMILES language model toolkit"};
  app.require_subcommand(1);
  app.fallthrough(); // global flags are accepted after the subcommand name

  nlohmann::json cfg;
  try {
    cfg = prescan_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: bad --config file: " << e.what() << "\n";
    return 1;
  }

  std::string config_path, out_dir = ".";
  std::uint64_t seed = 0;
  int threads = 1;
  app.add_option("--config", config_path, "JSON config file (defaults < file < flags)");
  app.add_option("--out-dir", out_dir, "output directory");
  app.add_option("--seed", seed, "RNG seed");
  app.add_option("--threads", threads, "worker cap");
  from_config(cfg, "seed", seed);
  from_config(cfg, "out_dir", out_dir);

  lm::TrainingConfig tc;
  from_config(cfg, "layers", tc.layers);
  from_config(cfg, "hidden", tc.hidden);
  from_config(cfg, "dropout", tc.dropout);
  from_config(cfg, "batch", tc.batch_size);
  from_config(cfg, "unroll", tc.unroll);
  from_config(cfg, "clip", tc.clip_norm);
  from_config(cfg, "lr", tc.learning_rate);
  from_config(cfg, "epochs", tc.epochs);

  auto add_train_flags = [&](CLI::App* cmd) {
    cmd->add_option("--layers", tc.layers, "stacked LSTM layers");
    cmd->add_option("--hidden", tc.hidden, "hidden units per layer");
    cmd->add_option("--dropout", tc.dropout, "dropout between stacked layers");
    cmd->add_option("--batch", tc.batch_size, "batch size");
    cmd->add_option("--unroll", tc.unroll, "BPTT unroll length");
    cmd->add_option("--clip", tc.clip_norm, "gradient norm clip");
    cmd->add_option("--lr", tc.learning_rate, "learning rate");
    cmd->add_option("--epochs", tc.epochs, "training epochs");
  };
  auto manifest_train_config = [&](Manifest& m) {
    m.set("config.layers", (long long)tc.layers);
    m.set("config.hidden", (long long)tc.hidden);
    m.set("config.dropout", tc.dropout);
    m.set("config.batch", (long long)tc.batch_size);
    m.set("config.unroll", (long long)tc.unroll);
    m.set("config.clip", tc.clip_norm);
    m.set("config.lr", tc.learning_rate);
    m.set("config.epochs", (long long)tc.epochs);
    m.set("seed", (long long)seed);
  };

  std::string in_path = "-", out_path = "-";
  std::string base_path, model_path, tpm_path, state_dir;
  std::string generated_path, test_path, random_path, train_path;
  std::string train_out = "train.smi", test_out = "test.smi";
  long n_symbols = 0, n_molecules = 0;
  double temperature = 1.0;
  bool random_seed_symbol = false;
  int fp_radius = 2, fp_width = 2048;
  double split_ratio = 0.5;
  long split_train_count = -1;
  tpm::ThresholdRule rule;
  tpm::ClassifierConfig tpm_cfg;
  pipeline::CycleConfig cycle_cfg;
  int sweep_epochs = 5;
  long sweep_symbols = 10000;

  auto* canon = app.add_subcommand("canon", "canonicalize a corpus");
  canon->add_option("--in", in_path);
  canon->add_option("--out", out_path);

  auto* vocab = app.add_subcommand("vocab", "corpus vocabulary");
  vocab->add_option("--in", in_path);
  vocab->add_option("--out", out_path);

  auto* train = app.add_subcommand("train", "train a language model");
  train->add_option("--in", in_path);
  add_train_flags(train);

  auto* finetune = app.add_subcommand("finetune", "fine-tune a pretrained model");
  finetune->add_option("--base", base_path)->required();
  finetune->add_option("--in", in_path);
  add_train_flags(finetune);

  auto* sample = app.add_subcommand("sample", "sample molecules from a model");
  sample->add_option("--model", model_path)->required();
  sample->add_option("--out", out_path);
  sample->add_option("--symbols", n_symbols, "total symbols to generate");
  sample->add_option("--molecules", n_molecules, "molecule count target");
  sample->add_option("--temperature", temperature);
  sample->add_flag("--random-seed-symbol", random_seed_symbol);

  auto* fp = app.add_subcommand("fp", "fingerprint/descriptor CSV export");
  fp->add_option("--in", in_path);
  fp->add_option("--out", out_path);
  fp->add_option("--radius", fp_radius);
  fp->add_option("--width", fp_width);

  auto* tpm_fit = app.add_subcommand("tpm-fit", "fit the target prediction model");
  tpm_fit->add_option("--in", in_path, "activity CSV: smiles,measure,value");
  tpm_fit->add_option("--out", out_path, "model checkpoint path")->required();
  tpm_fit->add_option("--measure", rule.measure, "p-scale measure (pIC50, pMIC)");
  tpm_fit->add_option("--cutoff", rule.cutoff, "active iff p-value > cutoff");
  tpm_fit->add_option("--width", fp_width);
  tpm_fit->add_option("--l2", tpm_cfg.l2);
  tpm_fit->add_option("--lr", tpm_cfg.learning_rate);
  tpm_fit->add_option("--iterations", tpm_cfg.iterations);

  auto* tpm_predict = app.add_subcommand("tpm-predict", "score molecules with a TPM");
  tpm_predict->add_option("--model", model_path)->required();
  tpm_predict->add_option("--in", in_path);
  tpm_predict->add_option("--out", out_path);
  tpm_predict->add_option("--width", fp_width);

  auto* split = app.add_subcommand("split", "seeded train/test split");
  split->add_option("--in", in_path);
  split->add_option("--train-out", train_out);
  split->add_option("--test-out", test_out);
  split->add_option("--ratio", split_ratio);
  split->add_option("--train-count", split_train_count);

  auto* eval_cmd = app.add_subcommand("eval", "library statistics, EOR, histograms");
  eval_cmd->add_option("--generated", generated_path)->required();
  eval_cmd->add_option("--test", test_path);
  eval_cmd->add_option("--random", random_path, "unbiased-model samples for EOR");
  eval_cmd->add_option("--train", train_path, "training set for novelty/edit distances");

  auto* cycle = app.add_subcommand("cycle", "generate-score-retrain design cycle");
  cycle->add_option("--base", base_path)->required();
  cycle->add_option("--tpm", tpm_path)->required();
  cycle->add_option("--state-dir", state_dir)->required();
  cycle->add_option("--iterations", cycle_cfg.iterations);
  cycle->add_option("--symbols", cycle_cfg.sample_symbols);
  cycle->add_option("--epochs", cycle_cfg.finetune_epochs);
  cycle->add_option("--temperature", cycle_cfg.temperature);

  auto* sweep = app.add_subcommand("sweep", "fine-tune with per-epoch sampling + stats");
  sweep->add_option("--base", base_path)->required();
  sweep->add_option("--actives", in_path)->required();
  sweep->add_option("--epochs", sweep_epochs);
  sweep->add_option("--symbols", sweep_symbols);
  sweep->add_option("--temperature", temperature);
  sweep->add_option("--batch", tc.batch_size);
  sweep->add_option("--lr", tc.learning_rate);
  sweep->add_option("--dropout", tc.dropout);
  sweep->add_option("--unroll", tc.unroll);
  sweep->add_option("--clip", tc.clip_norm);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  tc.seed = seed;

  try {
    if (*canon) {
      auto lines = read_input(in_path);
      std::vector<std::string> out;
      for (std::size_t i = 0; i < lines.size(); ++i) {
        try {
          out.push_back(smiles::canonicalize(lines[i]));
        } catch (const std::exception& e) {
          throw std::runtime_error(in_path + ":" + std::to_string(i + 1) + ": " + e.what());
        }
      }
      write_output(out_path, out);
    } else if (*vocab) {
      auto v = lm::Vocabulary::from_corpus(read_input(in_path));
      std::vector<std::string> out;
      for (const auto& s : v.symbols()) out.push_back(escape_symbol(s));
      write_output(out_path, out);
    } else if (*train) {
      auto corpus = read_input(in_path);
      Manifest m;
      m.command = "train";
      manifest_train_config(m);
      m.input("corpus", in_path);
      auto model = lm::train(corpus, tc);
      fs::create_directories(out_dir);
      lm::save_checkpoint(lm::to_checkpoint(model), out_dir + "/model.clm");
      std::ostringstream loss;
      loss << "epoch,loss\n";
      for (std::size_t e = 0; e < model.loss_history.size(); ++e)
        loss << (e + 1) << "," << model.loss_history[e] << "\n";
      io::write_file(out_dir + "/loss.csv", loss.str());
      m.write(out_dir);
    } else if (*finetune) {
      auto base = lm::model_from_checkpoint(lm::load_checkpoint(base_path));
      auto corpus = read_input(in_path);
      Manifest m;
      m.command = "finetune";
      manifest_train_config(m);
      m.input("base", base_path);
      m.input("corpus", in_path);
      fs::create_directories(out_dir);
      lm::FineTuneReport report;
      auto model = lm::fine_tune(
          base, corpus, tc, &report,
          [&](int epoch, double, const lm::LanguageModel& snapshot) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "epoch_%03d.clm", epoch);
            lm::save_checkpoint(lm::to_checkpoint(snapshot), out_dir + "/" + buf);
          });
      lm::save_checkpoint(lm::to_checkpoint(model), out_dir + "/model.clm");
      if (report.lines_skipped)
        std::cerr << "skipped " << report.lines_skipped
                  << " lines with out-of-vocabulary symbols\n";
      m.set("lines_used", (long long)report.lines_used);
      m.set("lines_skipped", (long long)report.lines_skipped);
      m.write(out_dir);
    } else if (*sample) {
      auto model = lm::model_from_checkpoint(lm::load_checkpoint(model_path));
      lm::SampleConfig sc;
      sc.max_symbols = n_symbols;
      sc.max_molecules = n_molecules;
      sc.temperature = temperature;
      sc.seed = seed;
      sc.random_seed_symbol = random_seed_symbol;
      write_output(out_path, lm::sample_stream(model, sc));
      Manifest m;
      m.command = "sample";
      m.set("seed", (long long)seed);
      m.set("config.symbols", (long long)n_symbols);
      m.set("config.molecules", (long long)n_molecules);
      m.set("config.temperature", temperature);
      m.set("config.random_seed_symbol", (long long)(random_seed_symbol ? 1 : 0));
      m.input("model", model_path);
      m.write(out_dir);
    } else if (*fp) {
      write_text(out_path, fp_csv(read_input(in_path), fp_radius, fp_width));
    } else if (*tpm_fit) {
      auto labeled = tpm::label_by_threshold(read_activity_csv(in_path), rule, fp_width);
      tpm_cfg.seed = seed;
      auto model = tpm::fit(labeled, tpm_cfg);
      lm::save_checkpoint(tpm::tpm_to_checkpoint(model), out_path);
    } else if (*tpm_predict) {
      auto model = tpm::tpm_from_checkpoint(lm::load_checkpoint(model_path));
      auto lines = read_input(in_path);
      std::ostringstream os;
      os << "smiles,probability,active\n";
      for (const auto& line : lines) {
        if (line.empty()) continue;
        auto g = smiles::parse_smiles(line);
        auto p = tpm::predict(model, chem::ecfp(g, 2, (int)model.weights.size()));
        os << line << "," << p.probability << "," << (p.active ? 1 : 0) << "\n";
      }
      write_text(out_path, os.str());
    } else if (*split) {
      pipeline::SplitSpec spec;
      spec.train_ratio = split_ratio;
      spec.train_count = split_train_count;
      spec.seed = seed;
      auto result = pipeline::split_dataset(read_input(in_path), spec);
      io::write_lines(train_out, result.train);
      io::write_lines(test_out, result.test);
    } else if (*eval_cmd) {
      auto generated = read_input(generated_path);
      std::set<std::string> train_set =
          train_path.empty() ? std::set<std::string>{} : canonical_set(read_input(train_path));
      auto stats = eval::generation_stats(generated, train_set);
      std::ostringstream os;
      os << "lines: " << stats.lines << "\n";
      os << "valid: " << stats.valid << "\n";
      os << "valid_ratio: " << stats.valid_ratio << "\n";
      os << "novel: " << stats.novel << "\n";
      os << "unique: " << stats.unique_count << "\n";
      std::set<std::string> gen_set(stats.unique_canonical.begin(),
                                    stats.unique_canonical.end());
      if (!test_path.empty()) {
        auto test_set = canonical_set(read_input(test_path));
        os << "reproduction_ratio: " << eval::reproduction_ratio(gen_set, test_set) << "\n";
        long n = 0;
        for (const auto& s : test_set) n += gen_set.count(s) ? 1 : 0;
        if (!random_path.empty()) {
          auto random_stats = eval::generation_stats(read_input(random_path), train_set);
          std::set<std::string> rand_set(random_stats.unique_canonical.begin(),
                                         random_stats.unique_canonical.end());
          long mm = 0;
          for (const auto& s : test_set) mm += rand_set.count(s) ? 1 : 0;
          auto report = eval::enrichment_over_random(n, (long)gen_set.size(), mm,
                                                     (long)rand_set.size());
          os << "eor: " << (report.infinite ? "inf" : std::to_string(report.eor)) << "\n";
          os << "eor_n: " << report.n << "\n";
          os << "eor_m: " << report.m << "\n";
        }
        // nearest-neighbor similarity of generated molecules against the test set
        std::vector<chem::Fingerprint> gen_fp, test_fp;
        for (const auto& s : gen_set) gen_fp.push_back(chem::ecfp(smiles::parse_smiles(s)));
        for (const auto& s : test_set) test_fp.push_back(chem::ecfp(smiles::parse_smiles(s)));
        if (!gen_fp.empty() && !test_fp.empty()) {
          fs::create_directories(out_dir);
          io::write_file(out_dir + "/nn_similarity_hist.csv",
                         eval::similarity_histogram(gen_fp, test_fp).to_csv());
        }
        if (!train_set.empty()) {
          std::vector<std::string> reproduced;
          for (const auto& s : test_set)
            if (gen_set.count(s)) reproduced.push_back(s);
          if (!reproduced.empty()) {
            fs::create_directories(out_dir);
            io::write_file(
                out_dir + "/edit_distance_hist.csv",
                eval::edit_distance_histogram(reproduced, {train_set.begin(), train_set.end()})
                    .to_csv());
          }
        }
      }
      fs::create_directories(out_dir);
      io::write_file(out_dir + "/report.txt", os.str());
      std::cout << os.str();
    } else if (*cycle) {
      auto base = lm::model_from_checkpoint(lm::load_checkpoint(base_path));
      auto classifier = tpm::tpm_from_checkpoint(lm::load_checkpoint(tpm_path));
      cycle_cfg.seed = seed;
      cycle_cfg.finetune = tc;
      auto state = pipeline::run_cycle(base, classifier, cycle_cfg, state_dir);
      for (const auto& log : state.log)
        std::cout << "iteration " << log.iteration << ": sampled=" << log.sampled
                  << " valid=" << log.valid << " unique=" << log.unique_count
                  << " predicted_active=" << log.predicted_active
                  << " new_actives=" << log.new_actives
                  << " active_ratio=" << log.active_ratio << "\n";
      std::cout << "pool_size: " << state.pool.size() << "\n";
    } else if (*sweep) {
      auto base = lm::model_from_checkpoint(lm::load_checkpoint(base_path));
      auto actives = read_input(in_path);
      // optimizer settings default to the base model's own training config
      lm::TrainingConfig ft = base.config;
      if (sweep->count("--batch")) ft.batch_size = tc.batch_size;
      if (sweep->count("--lr")) ft.learning_rate = tc.learning_rate;
      if (sweep->count("--dropout")) ft.dropout = tc.dropout;
      if (sweep->count("--unroll")) ft.unroll = tc.unroll;
      if (sweep->count("--clip")) ft.clip_norm = tc.clip_norm;
      auto epochs = pipeline::epoch_sweep(base, actives, sweep_epochs, sweep_symbols,
                                          temperature, seed, &ft);
      fs::create_directories(out_dir);
      for (const auto& es : epochs) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "epoch_%03d", es.epoch);
        io::write_lines(out_dir + "/" + buf + ".smi", es.lines);
        std::ostringstream os;
        os << "epoch: " << es.epoch << "\n";
        os << "lines: " << es.stats.lines << "\n";
        os << "valid: " << es.stats.valid << "\n";
        os << "valid_ratio: " << es.stats.valid_ratio << "\n";
        os << "novel: " << es.stats.novel << "\n";
        os << "unique: " << es.stats.unique_count << "\n";
        io::write_file(out_dir + "/" + buf + ".stats.txt", os.str());
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
