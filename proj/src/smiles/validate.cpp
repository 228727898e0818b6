#include <algorithm>
#include <cmath>

#include "molegen/smiles/valence.hpp"

namespace molegen::smiles {

const ValenceTable& ValenceTable::standard() {
  static const ValenceTable t = [] {
    ValenceTable v;
    v.table_ = {
        {"B", {3}},  {"C", {4}},    {"N", {3, 5}}, {"O", {2}},
        {"P", {3, 5}}, {"S", {2, 4, 6}}, {"F", {1}},    {"Cl", {1}},
        {"Br", {1}}, {"I", {1}},    {"H", {1}},
    };
    return v;
  }();
  return t;
}

bool ValenceTable::contains(const std::string& element) const {
  return table_.count(element) > 0;
}

std::vector<int> ValenceTable::allowed(const std::string& element, int charge) const {
  auto it = table_.find(element);
  if (it == table_.end()) return {};
  std::vector<int> out;
  for (int v : it->second) {
    const int adj = (element == "B" || element == "C") ? v - std::abs(charge) : v + charge;
    if (adj >= 0) out.push_back(adj);
  }
  return out;
}

int ValenceTable::implicit_target(const std::string& element, int bond_sum) const {
  auto it = table_.find(element);
  if (it == table_.end()) return -1;
  for (int v : it->second)
    if (v >= bond_sum) return v;
  return -1;
}

Validity validate(const MolGraph& g, const ValenceTable& table) {
  std::vector<double> bond_sum(g.atoms.size(), 0.0);
  std::vector<bool> has_aromatic_bond(g.atoms.size(), false);
  for (const Bond& b : g.bonds) {
    bond_sum[b.a] += bond_value(b.order);
    bond_sum[b.b] += bond_value(b.order);
    if (b.order == BondOrder::Aromatic) {
      has_aromatic_bond[b.a] = true;
      has_aromatic_bond[b.b] = true;
    }
  }
  const auto in_ring = cycle_atoms(g);

  for (int i = 0; i < static_cast<int>(g.atoms.size()); ++i) {
    const Atom& a = g.atoms[i];
    if (a.aromatic && !in_ring[i])
      return {false, i, "aromatic atom not in a ring"};
    if (!table.contains(a.element)) {
      if (a.bracketed) continue; // unknown elements pass only with explicit bracket text
      return {false, i, "unknown element " + a.element};
    }
    const auto allowed = table.allowed(a.element, a.charge);
    if (allowed.empty()) return {false, i, "no allowed valence at this charge"};

    const double total = bond_sum[i] + a.h_count;
    bool ok;
    if (a.aromatic || has_aromatic_bond[i]) {
      const int lo = static_cast<int>(std::floor(total + 1e-9));
      const int hi = static_cast<int>(std::ceil(total - 1e-9));
      ok = std::find(allowed.begin(), allowed.end(), lo) != allowed.end() ||
           std::find(allowed.begin(), allowed.end(), hi) != allowed.end();
    } else {
      const int v = static_cast<int>(total + 0.5);
      ok = std::find(allowed.begin(), allowed.end(), v) != allowed.end();
    }
    if (!ok)
      return {false, i,
              "valence " + std::to_string(total) + " not allowed for " + a.element +
                  (a.charge ? " (charge " + std::to_string(a.charge) + ")" : "")};
  }
  return {};
}

} // namespace molegen::smiles
