#pragma once

#include <map>
#include <string>
#include <vector>

#include "molegen/smiles/graph.hpp"

namespace molegen::smiles {

// Allowed valences per element, with a simple charge adjustment:
// B and C lose one slot per unit of charge of either sign (C+ and C- are
// both trivalent); lone-pair elements shift by +charge (N+ -> 4, O- -> 1).
class ValenceTable {
 public:
  static const ValenceTable& standard();

  bool contains(const std::string& element) const;
  std::vector<int> allowed(const std::string& element, int charge) const;

  // Smallest allowed valence >= bond_sum, or -1 if none. Used for implicit
  // hydrogen inference on unbracketed atoms (charge is always 0 there).
  int implicit_target(const std::string& element, int bond_sum) const;

 private:
  std::map<std::string, std::vector<int>> table_;
};

struct Validity {
  bool ok = true;
  int atom = -1;         // offending atom when !ok
  std::string reason;    // violated rule
};

// Accepts iff every atom's bond-order sum plus hydrogens hits an allowed
// (charge-adjusted) valence, and every aromatic atom lies on a cycle.
// Unknown elements pass only when bracketed. Never throws.
Validity validate(const MolGraph& g, const ValenceTable& table = ValenceTable::standard());

} // namespace molegen::smiles
