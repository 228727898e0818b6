#include <algorithm>
#include <limits>
#include <sstream>

#include "molegen/chem/metrics.hpp"
#include "molegen/eval/eval.hpp"
#include "molegen/smiles/canonical.hpp"
#include "molegen/smiles/parse.hpp"
#include "molegen/smiles/valence.hpp"

namespace molegen::eval {

GenerationStats generation_stats(const std::vector<std::string>& samples,
                                 const std::set<std::string>& training_canonical) {
  GenerationStats stats;
  stats.lines = static_cast<long>(samples.size());
  std::set<std::string> seen;
  for (const auto& line : samples) {
    if (line.empty()) continue;
    std::string canonical;
    try {
      smiles::MolGraph g = smiles::parse_smiles(line);
      if (g.empty() || !smiles::validate(g).ok) continue;
      canonical = smiles::canonical_smiles(g);
    } catch (const smiles::SmilesError&) {
      continue;
    }
    ++stats.valid;
    if (training_canonical.count(canonical)) continue;
    ++stats.novel;
    if (seen.insert(canonical).second) {
      ++stats.unique_count;
      stats.unique_canonical.push_back(canonical);
    }
  }
  stats.valid_ratio = stats.lines ? static_cast<double>(stats.valid) / stats.lines : 0.0;
  return stats;
}

double reproduction_ratio(const std::set<std::string>& generated,
                          const std::set<std::string>& test) {
  if (test.empty()) throw EmptyTestSet("empty test set");
  long n = 0;
  for (const auto& s : test) n += generated.count(s) ? 1 : 0;
  return static_cast<double>(n) / static_cast<double>(test.size());
}

EnrichmentReport enrichment_over_random(long n, long size_g, long m, long size_r) {
  if (size_g <= 0) throw ZeroDenominator("|G_N| must be positive");
  if (size_r <= 0) throw ZeroDenominator("|R_M| must be positive");
  EnrichmentReport report;
  report.n = n;
  report.size_g = size_g;
  report.m = m;
  report.size_r = size_r;
  if (m == 0) {
    report.infinite = n > 0;
    report.eor = n > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  } else {
    report.eor = (static_cast<double>(n) / size_g) / (static_cast<double>(m) / size_r);
  }
  return report;
}

long Histogram::total() const {
  long t = 0;
  for (long c : counts) t += c;
  return t;
}

std::string Histogram::to_csv() const {
  std::ostringstream os;
  os << "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < counts.size(); ++i)
    os << bin_lo[i] << "," << bin_hi[i] << "," << counts[i] << "\n";
  return os.str();
}

Histogram similarity_histogram(const std::vector<chem::Fingerprint>& generated,
                               const std::vector<chem::Fingerprint>& reference,
                               double bin_width) {
  if (reference.empty()) throw chem::EmptyReference("empty reference set");
  const int bins = static_cast<int>(std::ceil(1.0 / bin_width - 1e-12));
  Histogram h;
  for (int i = 0; i < bins; ++i) {
    h.bin_lo.push_back(i * bin_width);
    h.bin_hi.push_back(std::min(1.0, (i + 1) * bin_width));
    h.counts.push_back(0);
  }
  for (double s : chem::nearest_neighbor_similarity(generated, reference)) {
    // right-closed bins (lo, hi]; zero lands in the first bin
    int idx = static_cast<int>(std::ceil(s / bin_width - 1e-12)) - 1;
    idx = std::clamp(idx, 0, bins - 1);
    ++h.counts[idx];
  }
  return h;
}

Histogram edit_distance_histogram(const std::vector<std::string>& reproduced,
                                  const std::vector<std::string>& training) {
  if (training.empty()) throw EmptyTraining("empty training set");
  std::vector<int> minima;
  int max_d = 0;
  for (const auto& r : reproduced) {
    int best = std::numeric_limits<int>::max();
    for (const auto& t : training) best = std::min(best, chem::levenshtein(r, t));
    minima.push_back(best);
    max_d = std::max(max_d, best);
  }
  Histogram h;
  for (int d = 0; d <= max_d; ++d) {
    h.bin_lo.push_back(d);
    h.bin_hi.push_back(d);
    h.counts.push_back(0);
  }
  for (int d : minima) ++h.counts[d];
  return h;
}

} // namespace molegen::eval
