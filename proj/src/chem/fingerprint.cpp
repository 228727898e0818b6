#include <algorithm>
#include <set>

#include "molegen/chem/fingerprint.hpp"

namespace molegen::chem {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_string(const std::string& s) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (unsigned char c : s) h = splitmix64(h ^ c);
  return h;
}

} // namespace

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  return splitmix64(seed ^ splitmix64(value));
}

Fingerprint ecfp(const smiles::MolGraph& g, int radius, int width) {
  const int n = static_cast<int>(g.atoms.size());
  auto adj = g.adjacency();
  const auto in_ring = smiles::cycle_atoms(g);

  std::vector<std::uint64_t> id(n);
  for (int i = 0; i < n; ++i) {
    const smiles::Atom& a = g.atoms[i];
    std::uint64_t h = hash_string(a.element);
    h = hash_combine(h, static_cast<std::uint64_t>(adj[i].size()));
    h = hash_combine(h, static_cast<std::uint64_t>(a.h_count));
    h = hash_combine(h, static_cast<std::uint64_t>(a.charge + 16));
    h = hash_combine(h, a.aromatic ? 1 : 0);
    h = hash_combine(h, in_ring[i] ? 1 : 0);
    id[i] = h;
  }

  Fingerprint fp;
  fp.width = width;
  fp.raw_ids.assign(id.begin(), id.end());

  for (int r = 1; r <= radius; ++r) {
    std::vector<std::uint64_t> next = id;
    for (int i = 0; i < n; ++i) {
      if (adj[i].empty()) continue; // nothing to grow
      std::vector<std::pair<int, std::uint64_t>> nbrs;
      for (auto [v, e] : adj[i])
        nbrs.emplace_back(static_cast<int>(g.bonds[e].order), id[v]);
      std::sort(nbrs.begin(), nbrs.end());
      std::uint64_t h = hash_combine(static_cast<std::uint64_t>(r), id[i]);
      for (auto& [order, nid] : nbrs) {
        h = hash_combine(h, static_cast<std::uint64_t>(order));
        h = hash_combine(h, nid);
      }
      next[i] = h;
      fp.raw_ids.push_back(h);
    }
    id = std::move(next);
  }

  std::sort(fp.raw_ids.begin(), fp.raw_ids.end());
  std::set<int> bits;
  for (std::uint64_t rid : fp.raw_ids) bits.insert(static_cast<int>(rid % width));
  fp.set_bits.assign(bits.begin(), bits.end());
  return fp;
}

double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  if (a.width != b.width) throw WidthMismatch("fingerprint width mismatch");
  if (a.set_bits.empty() && b.set_bits.empty()) return 1.0; // degenerate
  std::vector<int> inter;
  std::set_intersection(a.set_bits.begin(), a.set_bits.end(), b.set_bits.begin(),
                        b.set_bits.end(), std::back_inserter(inter));
  const double i = static_cast<double>(inter.size());
  const double u = static_cast<double>(a.set_bits.size() + b.set_bits.size()) - i;
  return i / u;
}

std::vector<double> nearest_neighbor_similarity(const std::vector<Fingerprint>& queries,
                                                const std::vector<Fingerprint>& reference) {
  if (reference.empty()) throw EmptyReference("empty reference set");
  std::vector<double> out;
  out.reserve(queries.size());
  for (const auto& q : queries) {
    double best = 0.0;
    for (const auto& r : reference) best = std::max(best, tanimoto(q, r));
    out.push_back(best);
  }
  return out;
}

} // namespace molegen::chem
