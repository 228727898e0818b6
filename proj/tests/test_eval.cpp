#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "molegen/chem/metrics.hpp"
#include "molegen/eval/eval.hpp"
#include "molegen/smiles/canonical.hpp"
#include "molegen/smiles/parse.hpp"
#include "random_mol.hpp"

using namespace molegen;
using namespace molegen::eval;

TEST_CASE("generation stats on a hand-audited fixture") {
  // training set: ethanol (canonical form of CCO)
  std::set<std::string> training = {smiles::canonicalize("CCO")};
  std::vector<std::string> samples = {
      "CCO",      // valid, not novel (in training)
      "OCC",      // valid, same molecule: not novel
      "CCN",      // valid, novel
      "NCC",      // valid, novel, duplicate of CCN after canonicalization
      "CCC",      // valid, novel
      "C1CC",     // invalid: unmatched ring closure
      "C(C)(C)(C)(C)C", // parses but fails valence validation
      "",         // empty line: invalid
      "xyz",      // lexer error
      "c1ccccc1", // valid, novel
  };
  auto stats = generation_stats(samples, training);
  CHECK(stats.lines == 10);
  CHECK(stats.valid == 6);
  CHECK(stats.valid_ratio == doctest::Approx(0.6));
  CHECK(stats.novel == 4);        // CCN, NCC, CCC, benzene
  CHECK(stats.unique_count == 3); // CCN==NCC
  REQUIRE(stats.unique_canonical.size() == 3);
  CHECK(stats.unique_canonical[0] == smiles::canonicalize("CCN"));
  CHECK(stats.unique_canonical[1] == smiles::canonicalize("CCC"));
  CHECK(stats.unique_canonical[2] == smiles::canonicalize("c1ccccc1"));
}

TEST_CASE("reproduction ratio arithmetic") {
  std::set<std::string> test = {"a", "b", "c", "d"};
  std::set<std::string> generated = {"b", "d", "e"};
  CHECK(reproduction_ratio(generated, test) == doctest::Approx(0.5));
  CHECK(reproduction_ratio({}, test) == doctest::Approx(0.0));
  CHECK_THROWS_AS(reproduction_ratio(generated, {}), EmptyTestSet);
}

TEST_CASE("enrichment over random") {
  // n/|G| = 10/1000, m/|R| = 2/1000 -> EOR 5
  auto r = enrichment_over_random(10, 1000, 2, 1000);
  CHECK(r.eor == doctest::Approx(5.0));
  CHECK_FALSE(r.infinite);

  auto inf = enrichment_over_random(3, 1000, 0, 1000);
  CHECK(inf.infinite);

  auto zero = enrichment_over_random(0, 1000, 0, 1000);
  CHECK_FALSE(zero.infinite);
  CHECK(zero.eor == doctest::Approx(0.0));

  CHECK_THROWS_AS(enrichment_over_random(1, 0, 1, 10), ZeroDenominator);
  CHECK_THROWS_AS(enrichment_over_random(1, 10, 1, 0), ZeroDenominator);
}

TEST_CASE("similarity histogram bins are right-closed and conserve totals") {
  // craft fingerprints with known pairwise similarities by using explicit bits
  auto fp_with_bits = [](std::vector<int> bits) {
    chem::Fingerprint fp;
    fp.width = 64;
    std::sort(bits.begin(), bits.end());
    fp.set_bits = bits;
    return fp;
  };
  std::vector<chem::Fingerprint> reference = {fp_with_bits({0, 1, 2, 3, 4})};
  std::vector<chem::Fingerprint> queries = {
      fp_with_bits({0, 1, 2, 3, 4}),   // similarity 1.0
      fp_with_bits({0, 1, 2, 3, 40}),  // 4/6 = 0.667
      fp_with_bits({0, 40, 41, 42}),   // 1/8 = 0.125
      fp_with_bits({40, 41}),          // 0.0
      fp_with_bits({0, 1, 2, 3, 4, 40, 41, 42, 43, 44}), // 5/10 = 0.5 (boundary)
  };
  auto hist = similarity_histogram(queries, reference, 0.1);
  REQUIRE(hist.counts.size() == 10);
  CHECK(hist.total() == 5);
  CHECK(hist.counts[0] == 1); // 0.0 lands in the first bin
  CHECK(hist.counts[1] == 1); // 0.125 in (0.1, 0.2]
  CHECK(hist.counts[4] == 1); // 0.5 in (0.4, 0.5] (right-closed boundary)
  CHECK(hist.counts[6] == 1); // 0.667 in (0.6, 0.7]
  CHECK(hist.counts[9] == 1); // 1.0 in (0.9, 1.0]
  // csv shape: header + one row per bin
  const auto csv = hist.to_csv();
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);
  CHECK(csv.rfind("bin_lo,bin_hi,count", 0) == 0);
}

TEST_CASE("similarity histogram matches a quadratic oracle on random molecules") {
  std::mt19937_64 rng(211);
  std::vector<chem::Fingerprint> generated, reference;
  for (int i = 0; i < 40; ++i)
    generated.push_back(chem::ecfp(testsupport::random_molecule(rng)));
  for (int i = 0; i < 25; ++i)
    reference.push_back(chem::ecfp(testsupport::random_molecule(rng)));
  auto hist = similarity_histogram(generated, reference, 0.1);
  CHECK(hist.total() == 40);

  std::vector<long> expected(10, 0);
  for (const auto& g : generated) {
    double best = 0.0;
    for (const auto& r : reference) best = std::max(best, chem::tanimoto(g, r));
    int bin = 0;
    // right-closed: find the first bin whose upper edge >= best, value 0 -> bin 0
    while (bin < 9 && best > (bin + 1) * 0.1 + 1e-12) ++bin;
    expected[bin]++;
  }
  for (int b = 0; b < 10; ++b) CHECK(hist.counts[b] == expected[b]);
}

TEST_CASE("edit distance histogram against a quadratic oracle") {
  std::vector<std::string> training = {"CCO", "CCCC", "c1ccccc1"};
  std::vector<std::string> reproduced = {"CCO", "CCN", "c1ccncc1", "CC"};
  auto hist = edit_distance_histogram(reproduced, training);
  CHECK(hist.total() == 4);

  // oracle: min Levenshtein per reproduced string
  std::vector<int> expected_distance;
  for (const auto& r : reproduced) {
    int best = 1 << 20;
    for (const auto& t : training) best = std::min(best, chem::levenshtein(r, t));
    expected_distance.push_back(best);
  }
  CHECK(expected_distance == std::vector<int>{0, 1, 1, 1});
  // integer bins: bin i covers distance i
  CHECK(hist.counts[0] == 1);
  CHECK(hist.counts[1] == 3);
  CHECK(hist.bin_lo.size() == hist.counts.size());

  CHECK_THROWS_AS(edit_distance_histogram(reproduced, {}), EmptyTraining);
  auto empty = edit_distance_histogram({}, training);
  CHECK(empty.total() == 0);
}

TEST_CASE("stats pipeline respects order: validity before novelty before dedup") {
  // duplicate of a training molecule is counted valid but never novel/unique
  std::set<std::string> training = {smiles::canonicalize("CCO")};
  auto stats = generation_stats({"CCO", "CCO", "OCC"}, training);
  CHECK(stats.valid == 3);
  CHECK(stats.novel == 0);
  CHECK(stats.unique_count == 0);
}
