#include <cmath>
#include <set>

#include "molegen/smiles/canonical.hpp"
#include "molegen/smiles/parse.hpp"
#include "molegen/tpm/tpm.hpp"

namespace molegen::tpm {

double pic50_from_ic50_nm(double ic50_nm) { return 9.0 - std::log10(ic50_nm); }

namespace {

double to_p_scale(const ActivityRecord& r, const ThresholdRule& rule) {
  if (!std::isfinite(r.value)) throw UnknownMeasure("non-finite activity value");
  if (r.measure == rule.measure) return r.value;
  if (r.measure == "IC50_nM" && rule.measure == "pIC50") return pic50_from_ic50_nm(r.value);
  throw UnknownMeasure("cannot interpret measure '" + r.measure + "' under rule measure '" +
                       rule.measure + "'");
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double linear_score(const ClassifierModel& model, const chem::Fingerprint& fp) {
  if (static_cast<int>(model.weights.size()) != fp.width)
    throw chem::WidthMismatch("classifier/fingerprint width mismatch");
  double z = model.bias;
  for (int bit : fp.set_bits) z += model.weights[bit];
  return z;
}

} // namespace

LabeledSet label_by_threshold(const std::vector<ActivityRecord>& records,
                              const ThresholdRule& rule, int fingerprint_width) {
  LabeledSet set;
  set.rule = rule;
  set.fingerprint_width = fingerprint_width;
  std::set<std::string> seen;
  for (const auto& r : records) {
    const double p = to_p_scale(r, rule);
    auto graph = smiles::parse_smiles(r.smiles);
    LabeledExample ex;
    ex.canonical_smiles = smiles::canonical_smiles(graph);
    if (!seen.insert(ex.canonical_smiles).second) continue;
    ex.fingerprint = chem::ecfp(graph, 2, fingerprint_width);
    ex.p_value = p;
    ex.active = p > rule.cutoff; // strict: boundary values are inactive
    set.examples.push_back(std::move(ex));
  }
  return set;
}

ClassifierModel fit(const LabeledSet& train, const ClassifierConfig& config) {
  bool any_active = false, any_inactive = false;
  for (const auto& ex : train.examples) (ex.active ? any_active : any_inactive) = true;
  if (!any_active || !any_inactive)
    throw SingleClassTrainingSet("training set must contain both classes");

  ClassifierModel model;
  model.config = config;
  model.weights.assign(train.fingerprint_width, 0.0);
  const double n = static_cast<double>(train.examples.size());

  for (int it = 0; it < config.iterations; ++it) {
    std::vector<double> grad_w(model.weights.size(), 0.0);
    double grad_b = 0.0;
    for (const auto& ex : train.examples) {
      const double err = sigmoid(linear_score(model, ex.fingerprint)) - (ex.active ? 1.0 : 0.0);
      for (int bit : ex.fingerprint.set_bits) grad_w[bit] += err;
      grad_b += err;
    }
    for (std::size_t j = 0; j < model.weights.size(); ++j) {
      model.weights[j] -= config.learning_rate * (grad_w[j] / n + config.l2 * model.weights[j]);
    }
    model.bias -= config.learning_rate * grad_b / n;
  }
  return model;
}

Prediction predict(const ClassifierModel& model, const chem::Fingerprint& fp) {
  const double p = sigmoid(linear_score(model, fp));
  return {p, p > 0.5};
}

lm::Checkpoint tpm_to_checkpoint(const ClassifierModel& model) {
  lm::Checkpoint ckpt;
  ckpt.meta["kind"] = "tpm";
  ckpt.meta["tpm"] = {{"width", model.weights.size()},
                      {"l2", model.config.l2},
                      {"learning_rate", model.config.learning_rate},
                      {"iterations", model.config.iterations},
                      {"seed", model.config.seed}};
  std::vector<float> w(model.weights.begin(), model.weights.end());
  ckpt.tensors.emplace_back("tpm.weights", std::move(w));
  ckpt.tensors.emplace_back("tpm.bias", std::vector<float>{static_cast<float>(model.bias)});
  return ckpt;
}

ClassifierModel tpm_from_checkpoint(const lm::Checkpoint& ckpt) {
  if (!ckpt.meta.contains("kind") || ckpt.meta["kind"] != "tpm")
    throw lm::CorruptPayload("checkpoint does not hold a TPM section");
  ClassifierModel model;
  const auto& w = ckpt.tensor("tpm.weights");
  model.weights.assign(w.begin(), w.end());
  model.bias = static_cast<double>(ckpt.tensor("tpm.bias").at(0));
  const auto& cfg = ckpt.meta["tpm"];
  model.config.l2 = cfg["l2"].get<double>();
  model.config.learning_rate = cfg["learning_rate"].get<double>();
  model.config.iterations = cfg["iterations"].get<int>();
  model.config.seed = cfg["seed"].get<std::uint64_t>();
  return model;
}

} // namespace molegen::tpm
