#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "molegen/smiles/graph.hpp"

namespace molegen::chem {

struct WidthMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyReference : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Circular (Morgan-style) fingerprint. raw_ids holds one 64-bit identifier
// per (atom, radius) neighborhood before folding; set_bits is the
// (id mod width) image.
struct Fingerprint {
  int width = 2048;
  std::vector<std::uint64_t> raw_ids;  // sorted multiset
  std::vector<int> set_bits;           // sorted, unique, < width
};

// Seedless 64-bit mixing function used for substructure identifiers
// (splitmix64 finalizer over an accumulating combine); fixed across
// platforms so fingerprints are stable.
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value);

// ECFP with diameter 2*radius. Round-0 identifiers hash the atom invariants
// (element, degree, H count, charge, aromatic flag, in-ring flag); round r
// hashes (r, previous id, sorted (bond order, neighbor previous id) pairs).
// Atoms without neighbors contribute only their round-0 identifier.
Fingerprint ecfp(const smiles::MolGraph& g, int radius = 2, int width = 2048);

// |intersection| / |union| of set bits; 1.0 when both empty (degenerate,
// by convention).
double tanimoto(const Fingerprint& a, const Fingerprint& b);

// One value per query: max Tanimoto against the reference set.
std::vector<double> nearest_neighbor_similarity(const std::vector<Fingerprint>& queries,
                                                const std::vector<Fingerprint>& reference);

} // namespace molegen::chem
