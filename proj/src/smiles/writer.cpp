#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "molegen/smiles/valence.hpp"
#include "molegen/smiles/write.hpp"

namespace molegen::smiles {

namespace {

bool organic_subset(const Atom& a) {
  static const std::set<std::string> plain = {"B", "C", "N", "O", "P", "S",
                                              "F", "Cl", "Br", "I"};
  static const std::set<std::string> arom = {"B", "C", "N", "O", "P", "S"};
  return a.aromatic ? arom.count(a.element) > 0 : plain.count(a.element) > 0;
}

std::string element_text(const Atom& a) {
  if (!a.aromatic) return a.element;
  std::string s = a.element;
  s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  return s;
}

// What the parser would infer for this atom if written without brackets.
int inferred_h(const MolGraph& g, const std::vector<double>& bond_sum, int idx) {
  const Atom& a = g.atoms[idx];
  const int bs = static_cast<int>(std::ceil(bond_sum[idx] - 1e-9));
  const int target = ValenceTable::standard().implicit_target(a.element, bs);
  return target < 0 ? 0 : target - bs;
}

std::string atom_text(const MolGraph& g, const std::vector<double>& bond_sum, int idx) {
  const Atom& a = g.atoms[idx];
  const bool needs_bracket = a.charge != 0 || a.isotope != 0 || !organic_subset(a) ||
                             a.h_count != inferred_h(g, bond_sum, idx);
  if (!needs_bracket) return element_text(a);
  std::string s = "[";
  if (a.isotope) s += std::to_string(a.isotope);
  s += element_text(a);
  if (a.h_count == 1) s += "H";
  else if (a.h_count > 1) s += "H" + std::to_string(a.h_count);
  if (a.charge != 0) {
    s += a.charge > 0 ? "+" : "-";
    if (std::abs(a.charge) > 1) s += std::to_string(std::abs(a.charge));
  }
  s += "]";
  return s;
}

// Bond symbol preceding an atom or ring-closure digit; empty when the
// parser's default for this atom pair reproduces the order.
std::string bond_text(const MolGraph& g, const Bond& b) {
  const bool both_arom = g.atoms[b.a].aromatic && g.atoms[b.b].aromatic;
  switch (b.order) {
    case BondOrder::Single: return both_arom ? "-" : "";
    case BondOrder::Double: return "=";
    case BondOrder::Triple: return "#";
    case BondOrder::Aromatic: return both_arom ? "" : ":";
  }
  return "";
}

std::string digit_text(int d) {
  return d < 10 ? std::to_string(d) : "%" + std::to_string(d);
}

} // namespace

std::string write_smiles(const MolGraph& g, const std::vector<int>& atom_rank) {
  const int n = static_cast<int>(g.atoms.size());
  if (n == 0) return "";
  std::vector<int> rank = atom_rank;
  if (rank.empty()) {
    rank.resize(n);
    std::iota(rank.begin(), rank.end(), 0);
  }

  std::vector<double> bond_sum(n, 0.0);
  for (const Bond& b : g.bonds) {
    bond_sum[b.a] += bond_value(b.order);
    bond_sum[b.b] += bond_value(b.order);
  }

  auto adj = g.adjacency();
  for (auto& nbrs : adj)
    std::sort(nbrs.begin(), nbrs.end(),
              [&](const auto& x, const auto& y) { return rank[x.first] < rank[y.first]; });

  std::vector<bool> visited(n, false);
  std::vector<int> preorder;
  std::vector<std::vector<std::pair<int, int>>> children(n); // (child atom, bond idx)
  std::vector<std::vector<int>> closes_at(n), opens_at(n);   // bond indices
  std::vector<bool> edge_used(g.bonds.size(), false);

  std::function<void(int)> discover = [&](int u) {
    visited[u] = true;
    preorder.push_back(u);
    for (auto [v, e] : adj[u]) {
      if (edge_used[e]) continue;
      edge_used[e] = true;
      if (visited[v]) { // back edge: v emitted earlier, opens at v, closes at u
        opens_at[v].push_back(e);
        closes_at[u].push_back(e);
      } else {
        children[u].emplace_back(v, e);
        discover(v);
      }
    }
  };

  // assign ring-closure digits in emission order, lowest free digit first
  auto assign_digits = [&](const std::vector<int>& order) {
    std::map<int, int> digit_of_edge;
    std::set<int> free_digits;
    for (int d = 1; d <= 99; ++d) free_digits.insert(d);
    for (int u : order) {
      for (int e : closes_at[u]) free_digits.insert(digit_of_edge.at(e));
      for (int e : opens_at[u]) {
        if (free_digits.empty()) throw GraphTooLarge("more than 99 open ring closures");
        digit_of_edge[e] = *free_digits.begin();
        free_digits.erase(free_digits.begin());
      }
    }
    return digit_of_edge;
  };

  std::vector<std::string> parts;
  for (;;) {
    int start = -1;
    for (int i = 0; i < n; ++i)
      if (!visited[i] && (start == -1 || rank[i] < rank[start])) start = i;
    if (start == -1) break;

    preorder.clear();
    discover(start);
    const auto digit_of_edge = assign_digits(preorder);

    std::string out;
    std::function<void(int)> emit = [&](int u) {
      out += atom_text(g, bond_sum, u);
      for (int e : closes_at[u]) // closing side carries the bond symbol
        out += bond_text(g, g.bonds[e]) + digit_text(digit_of_edge.at(e));
      for (int e : opens_at[u]) out += digit_text(digit_of_edge.at(e));
      for (std::size_t i = 0; i < children[u].size(); ++i) {
        auto [v, e] = children[u][i];
        const bool last = i + 1 == children[u].size();
        if (!last) out += "(";
        out += bond_text(g, g.bonds[e]);
        emit(v);
        if (!last) out += ")";
      }
    };
    emit(start);
    parts.push_back(std::move(out));
  }

  std::string joined = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) joined += "." + parts[i];
  return joined;
}

} // namespace molegen::smiles
