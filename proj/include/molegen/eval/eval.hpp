#pragma once

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "molegen/chem/fingerprint.hpp"

namespace molegen::eval {

struct EmptyTestSet : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyTraining : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ZeroDenominator : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GenerationStats {
  long lines = 0;        // lines sampled
  long valid = 0;        // parsed and validated
  long novel = 0;        // valid and not in the training set (canonical forms)
  long unique_count = 0; // novel after dedup
  double valid_ratio = 0.0;
  std::vector<std::string> unique_canonical; // post-dedup novel molecules, input order
};

// Pipeline order is fixed: parse/validate -> canonicalize -> novelty filter
// -> dedup. All set membership is on canonical SMILES.
GenerationStats generation_stats(const std::vector<std::string>& samples,
                                 const std::set<std::string>& training_canonical);

// |G n T| / |T|.
double reproduction_ratio(const std::set<std::string>& generated,
                          const std::set<std::string>& test);

struct EnrichmentReport {
  long n = 0;       // |G_N n T|
  long size_g = 0;  // |G_N|
  long m = 0;       // |R_M n T|
  long size_r = 0;  // |R_M|
  double eor = 0.0; // (n/|G_N|) / (m/|R_M|)
  bool infinite = false; // m == 0 with n > 0
};

EnrichmentReport enrichment_over_random(long n, long size_g, long m, long size_r);

struct Histogram {
  std::vector<double> bin_lo, bin_hi; // right-closed bins
  std::vector<long> counts;
  long total() const;
  std::string to_csv() const; // header bin_lo,bin_hi,count
};

// Nearest-neighbor Tanimoto histogram; bins cover [0,1], right-closed,
// value 0 lands in the first bin.
Histogram similarity_histogram(const std::vector<chem::Fingerprint>& generated,
                               const std::vector<chem::Fingerprint>& reference,
                               double bin_width = 0.1);

// Per reproduced string, minimal Levenshtein distance to the training set;
// histogram with unit-width integer bins [0..max].
Histogram edit_distance_histogram(const std::vector<std::string>& reproduced,
                                  const std::vector<std::string>& training);

} // namespace molegen::eval
