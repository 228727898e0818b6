#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>

#include "molegen/smiles/canonical.hpp"
#include "molegen/smiles/parse.hpp"
#include "molegen/smiles/valence.hpp"
#include "molegen/smiles/write.hpp"

namespace molegen::smiles {

namespace {

using Adjacency = std::vector<std::vector<std::pair<int, int>>>;

// Dense ranks from arbitrary sortable keys: rank = count of strictly
// smaller keys, so equal ranks mark one refinement class.
template <typename Key>
std::vector<int> ranks_from_keys(const std::vector<Key>& keys) {
  std::vector<Key> sorted = keys;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<int> rank(keys.size());
  std::map<Key, int> first_of;
  int acc = 0;
  for (const Key& k : sorted) first_of[k] = acc, acc += static_cast<int>(
      std::count(keys.begin(), keys.end(), k));
  for (std::size_t i = 0; i < keys.size(); ++i) rank[i] = first_of[keys[i]];
  return rank;
}

std::vector<int> refine(const MolGraph& g, const Adjacency& adj, std::vector<int> rank) {
  using Key = std::pair<int, std::vector<std::pair<int, int>>>;
  for (;;) {
    std::vector<Key> keys(g.atoms.size());
    for (std::size_t i = 0; i < g.atoms.size(); ++i) {
      std::vector<std::pair<int, int>> nbrs;
      for (auto [v, e] : adj[i])
        nbrs.emplace_back(static_cast<int>(g.bonds[e].order), rank[v]);
      std::sort(nbrs.begin(), nbrs.end());
      keys[i] = {rank[i], std::move(nbrs)};
    }
    auto next = ranks_from_keys(keys);
    if (next == rank) return rank;
    rank = std::move(next);
  }
}

std::vector<int> initial_ranks(const MolGraph& g, const Adjacency& adj) {
  using Key = std::tuple<std::string, bool, int, int, int, int>;
  std::vector<Key> keys(g.atoms.size());
  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    const Atom& a = g.atoms[i];
    keys[i] = {a.element, a.aromatic, a.charge, a.h_count, a.isotope,
               static_cast<int>(adj[i].size())};
  }
  return ranks_from_keys(keys);
}

// Branch over the smallest still-tied cell and keep the lexicographically
// smallest rendering; invariant under input atom order because the cell
// choice depends only on ranks and every member is tried.
std::string min_string(const MolGraph& g, const Adjacency& adj, const std::vector<int>& rank) {
  int cell_rank = -1;
  std::vector<int> cell;
  for (int r = 0; r < static_cast<int>(rank.size()); ++r) {
    std::vector<int> members;
    for (std::size_t i = 0; i < rank.size(); ++i)
      if (rank[i] == r) members.push_back(static_cast<int>(i));
    if (members.size() > 1) {
      cell_rank = r;
      cell = std::move(members);
      break;
    }
  }
  if (cell_rank < 0) return write_smiles(g, rank); // discrete partition

  std::string best;
  for (int chosen : cell) {
    std::vector<int> labels(rank.size());
    for (std::size_t i = 0; i < rank.size(); ++i)
      labels[i] = rank[i] * 2 + (static_cast<int>(i) == chosen ? 0 : 1);
    auto refined = refine(g, adj, ranks_from_keys(labels));
    std::string s = min_string(g, adj, refined);
    if (best.empty() || s < best) best = std::move(s);
  }
  return best;
}

std::vector<MolGraph> split_components(const MolGraph& g) {
  const int n = static_cast<int>(g.atoms.size());
  std::vector<int> comp(n, -1);
  auto adj = g.adjacency();
  int nc = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[s] != -1) continue;
    std::vector<int> stack{s};
    comp[s] = nc;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (auto [v, e] : adj[u]) {
        (void)e;
        if (comp[v] == -1) {
          comp[v] = nc;
          stack.push_back(v);
        }
      }
    }
    ++nc;
  }
  std::vector<MolGraph> out(nc);
  std::vector<int> local(n);
  for (int i = 0; i < n; ++i) {
    local[i] = static_cast<int>(out[comp[i]].atoms.size());
    out[comp[i]].atoms.push_back(g.atoms[i]);
  }
  for (const Bond& b : g.bonds)
    out[comp[b.a]].bonds.push_back({local[b.a], local[b.b], b.order});
  for (auto& c : out) refresh_ring_bonds(c);
  return out;
}

} // namespace

std::string canonical_smiles(const MolGraph& g) {
  if (g.atoms.empty()) return "";
  std::vector<std::string> parts;
  for (const MolGraph& comp : split_components(g)) {
    auto adj = comp.adjacency();
    parts.push_back(min_string(comp, adj, refine(comp, adj, initial_ranks(comp, adj))));
  }
  std::sort(parts.begin(), parts.end());
  std::string joined = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) joined += "." + parts[i];
  return joined;
}

std::string canonicalize(const std::string& smiles) {
  MolGraph g = parse_smiles(smiles);
  Validity v = validate(g);
  if (!v.ok)
    throw std::invalid_argument("invalid molecule: " + v.reason + " (atom " +
                                std::to_string(v.atom) + ")");
  return canonical_smiles(g);
}

} // namespace molegen::smiles
