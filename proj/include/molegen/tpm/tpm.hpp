#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "molegen/chem/fingerprint.hpp"
#include "molegen/lm/checkpoint.hpp"

namespace molegen::tpm {

struct UnknownMeasure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingleClassTrainingSet : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ActivityRecord {
  std::string smiles;
  std::string measure; // "pIC50", "IC50_nM", "pMIC"
  double value = 0.0;
};

struct ThresholdRule {
  std::string measure = "pIC50"; // p-scale measure the cutoff applies to
  double cutoff = 7.0;           // active iff p-value strictly exceeds this
};

// pIC50 = -log10(IC50 in mol/l); for nanomolar input that is 9 - log10(nM).
double pic50_from_ic50_nm(double ic50_nm);

struct LabeledExample {
  std::string canonical_smiles;
  chem::Fingerprint fingerprint;
  double p_value = 0.0;
  bool active = false;
};

struct LabeledSet {
  std::vector<LabeledExample> examples; // unique canonical SMILES
  ThresholdRule rule;
  int fingerprint_width = 2048;
};

// Converts measures to the rule's p-scale, fingerprints each molecule, and
// labels active iff p-value > cutoff (strict: boundary values are inactive).
// Duplicate canonical SMILES keep the first record.
LabeledSet label_by_threshold(const std::vector<ActivityRecord>& records,
                              const ThresholdRule& rule, int fingerprint_width = 2048);

struct ClassifierConfig {
  double l2 = 1e-4;
  double learning_rate = 0.1;
  int iterations = 500;
  std::uint64_t seed = 0;
};

// L2-regularized logistic regression over fingerprint bits, fitted by
// full-batch gradient descent (deterministic given the config).
struct ClassifierModel {
  std::vector<double> weights; // one per fingerprint bit
  double bias = 0.0;
  ClassifierConfig config;
};

ClassifierModel fit(const LabeledSet& train, const ClassifierConfig& config = {});

struct Prediction {
  double probability = 0.0;
  bool active = false; // probability > 0.5
};

Prediction predict(const ClassifierModel& model, const chem::Fingerprint& fp);

// Persistence inside the common checkpoint container (section kind "tpm").
lm::Checkpoint tpm_to_checkpoint(const ClassifierModel& model);
ClassifierModel tpm_from_checkpoint(const lm::Checkpoint& ckpt);

} // namespace molegen::tpm
