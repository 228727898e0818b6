#include <algorithm>
#include <cmath>
#include <map>

#include "molegen/chem/metrics.hpp"
#include "molegen/smiles/canonical.hpp"
#include "molegen/smiles/valence.hpp"

namespace molegen::chem {

namespace {

// Standard atomic weights for the elements the toolkit handles natively.
const std::map<std::string, double>& atomic_weights() {
  static const std::map<std::string, double> w = {
      {"H", 1.008},   {"B", 10.811},  {"C", 12.011},  {"N", 14.007},
      {"O", 15.999},  {"F", 18.998},  {"P", 30.974},  {"S", 32.06},
      {"Cl", 35.453}, {"Br", 79.904}, {"I", 126.904}, {"Si", 28.086},
      {"Se", 78.971}, {"As", 74.922},
  };
  return w;
}

smiles::MolGraph keep_atoms(const smiles::MolGraph& g, const std::vector<bool>& keep) {
  smiles::MolGraph out;
  std::vector<int> remap(g.atoms.size(), -1);
  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    if (!keep[i]) continue;
    remap[i] = static_cast<int>(out.atoms.size());
    out.atoms.push_back(g.atoms[i]);
  }
  for (const smiles::Bond& b : g.bonds)
    if (keep[b.a] && keep[b.b]) out.bonds.push_back({remap[b.a], remap[b.b], b.order});
  smiles::refresh_ring_bonds(out);
  return out;
}

void reinfer_hydrogens(smiles::MolGraph& g) {
  std::vector<double> bond_sum(g.atoms.size(), 0.0);
  for (const smiles::Bond& b : g.bonds) {
    bond_sum[b.a] += smiles::bond_value(b.order);
    bond_sum[b.b] += smiles::bond_value(b.order);
  }
  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    smiles::Atom& a = g.atoms[i];
    if (a.bracketed) continue;
    const int bs = static_cast<int>(std::ceil(bond_sum[i] - 1e-9));
    const int target = smiles::ValenceTable::standard().implicit_target(a.element, bs);
    a.h_count = target < 0 ? 0 : target - bs;
  }
}

} // namespace

Scaffold murcko_scaffold(const smiles::MolGraph& g) {
  smiles::MolGraph cur = g;
  for (;;) {
    const auto in_ring = smiles::cycle_atoms(cur);
    std::vector<int> degree(cur.atoms.size(), 0);
    for (const smiles::Bond& b : cur.bonds) {
      ++degree[b.a];
      ++degree[b.b];
    }
    std::vector<bool> keep(cur.atoms.size(), true);
    bool changed = false;
    for (std::size_t i = 0; i < cur.atoms.size(); ++i) {
      if (degree[i] <= 1 && !in_ring[i]) {
        keep[i] = false;
        changed = true;
      }
    }
    if (!changed) break;
    cur = keep_atoms(cur, keep);
  }
  reinfer_hydrogens(cur);

  Scaffold s;
  s.graph = cur;
  s.empty = cur.atoms.empty();
  s.smiles = s.empty ? "" : smiles::canonical_smiles(cur);
  return s;
}

double scaffold_jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::vector<std::string> inter, uni;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(uni));
  if (uni.empty()) return 0.0;
  return static_cast<double>(inter.size()) / static_cast<double>(uni.size());
}

int levenshtein(const std::string& a, const std::string& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<int> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1,
                         prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

DescriptorVector descriptors(const smiles::MolGraph& g) {
  DescriptorVector d;
  const auto& weights = atomic_weights();
  const auto cb = smiles::cycle_bonds(g);
  std::vector<int> degree(g.atoms.size(), 0);
  for (const smiles::Bond& b : g.bonds) {
    ++degree[b.a];
    ++degree[b.b];
  }

  for (const smiles::Atom& a : g.atoms) {
    auto it = weights.find(a.element);
    if (it != weights.end()) d.molecular_weight += it->second;
    d.molecular_weight += a.h_count * weights.at("H");
    if (a.element == "N" || a.element == "O") {
      ++d.h_bond_acceptors;
      if (a.h_count > 0) ++d.h_bond_donors;
    }
  }
  for (std::size_t i = 0; i < g.bonds.size(); ++i) {
    const smiles::Bond& b = g.bonds[i];
    if (b.order == smiles::BondOrder::Single && !cb[i] && degree[b.a] > 1 && degree[b.b] > 1)
      ++d.rotatable_bonds;
  }
  d.ring_count = smiles::ring_count(g);
  return d;
}

} // namespace molegen::chem
