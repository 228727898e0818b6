#include "molegen/smiles/graph.hpp"

#include <algorithm>
#include <functional>

namespace molegen::smiles {

std::vector<std::vector<std::pair<int, int>>> MolGraph::adjacency() const {
  std::vector<std::vector<std::pair<int, int>>> adj(atoms.size());
  for (int i = 0; i < static_cast<int>(bonds.size()); ++i) {
    adj[bonds[i].a].emplace_back(bonds[i].b, i);
    adj[bonds[i].b].emplace_back(bonds[i].a, i);
  }
  return adj;
}

int MolGraph::bond_between(int a, int b) const {
  for (int i = 0; i < static_cast<int>(bonds.size()); ++i) {
    if ((bonds[i].a == a && bonds[i].b == b) || (bonds[i].a == b && bonds[i].b == a)) return i;
  }
  return -1;
}

// Bridge finding by DFS low-link; every non-bridge edge lies on a cycle.
std::vector<bool> cycle_bonds(const MolGraph& g) {
  const int n = static_cast<int>(g.atoms.size());
  auto adj = g.adjacency();
  std::vector<bool> on_cycle(g.bonds.size(), false);
  std::vector<int> disc(n, -1), low(n, 0);
  int timer = 0;

  std::function<void(int, int)> dfs = [&](int u, int parent_edge) {
    disc[u] = low[u] = timer++;
    for (auto [v, e] : adj[u]) {
      if (e == parent_edge) continue;
      if (disc[v] != -1) {
        low[u] = std::min(low[u], disc[v]);
        if (disc[v] < disc[u]) on_cycle[e] = true; // back edge
      } else {
        dfs(v, e);
        low[u] = std::min(low[u], low[v]);
        if (low[v] <= disc[u]) on_cycle[e] = true; // tree edge inside a cycle
      }
    }
  };
  for (int u = 0; u < n; ++u)
    if (disc[u] == -1) dfs(u, -1);
  return on_cycle;
}

std::vector<bool> cycle_atoms(const MolGraph& g) {
  auto cb = cycle_bonds(g);
  std::vector<bool> in_ring(g.atoms.size(), false);
  for (std::size_t i = 0; i < g.bonds.size(); ++i) {
    if (cb[i]) {
      in_ring[g.bonds[i].a] = true;
      in_ring[g.bonds[i].b] = true;
    }
  }
  return in_ring;
}

void refresh_ring_bonds(MolGraph& g) {
  auto cb = cycle_bonds(g);
  g.ring_bonds.clear();
  for (int i = 0; i < static_cast<int>(g.bonds.size()); ++i)
    if (cb[i]) g.ring_bonds.push_back(i);
}

int component_count(const MolGraph& g) {
  const int n = static_cast<int>(g.atoms.size());
  auto adj = g.adjacency();
  std::vector<bool> seen(n, false);
  int comps = 0;
  for (int s = 0; s < n; ++s) {
    if (seen[s]) continue;
    ++comps;
    std::vector<int> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (auto [v, e] : adj[u]) {
        (void)e;
        if (!seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
  }
  return comps;
}

int ring_count(const MolGraph& g) {
  if (g.atoms.empty()) return 0;
  return static_cast<int>(g.bonds.size()) - static_cast<int>(g.atoms.size()) + component_count(g);
}

} // namespace molegen::smiles
