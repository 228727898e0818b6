#pragma once

#include <set>
#include <string>
#include <vector>

#include "molegen/smiles/graph.hpp"

namespace molegen::chem {

struct Scaffold {
  smiles::MolGraph graph; // ring systems and linkers only
  std::string smiles;     // canonical form, empty for acyclic input
  bool empty = false;     // acyclic molecule had nothing to keep
};

// Bemis-Murcko scaffold: iteratively prune degree-1 atoms that are not in
// rings until fixed point. Hydrogen counts of unbracketed atoms are
// re-inferred after pruning.
Scaffold murcko_scaffold(const smiles::MolGraph& g);

// |A n B| / |A u B| over canonical scaffold strings; 0 when the union is empty.
double scaffold_jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

// Minimal insert/delete/substitute count.
int levenshtein(const std::string& a, const std::string& b);

struct DescriptorVector {
  double molecular_weight = 0.0; // g/mol, includes implicit hydrogens
  int h_bond_donors = 0;         // N/O with at least one hydrogen
  int h_bond_acceptors = 0;      // N/O count
  int rotatable_bonds = 0;       // single non-ring bonds between non-terminal heavy atoms
  int ring_count = 0;            // cyclomatic number
};

DescriptorVector descriptors(const smiles::MolGraph& g);

} // namespace molegen::chem
