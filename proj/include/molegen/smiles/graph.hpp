#pragma once

#include <string>
#include <vector>

namespace molegen::smiles {

enum class BondOrder { Single = 1, Double = 2, Triple = 3, Aromatic = 4 };

// Numeric contribution of a bond to an atom's valence sum. Aromatic bonds
// count 1.5; an aromatic atom passes validation if floor or ceil of its
// total matches an allowed valence.
inline double bond_value(BondOrder o) {
  return o == BondOrder::Aromatic ? 1.5 : static_cast<double>(static_cast<int>(o));
}

struct Atom {
  std::string element;   // "C", "Cl", "Br", ...
  bool aromatic = false;
  int charge = 0;
  int isotope = 0;       // 0 = unspecified
  int h_count = 0;       // total attached hydrogens
  bool bracketed = false; // h_count fixed by bracket text rather than inferred
};

struct Bond {
  int a = -1;
  int b = -1;
  BondOrder order = BondOrder::Single;
};

struct MolGraph {
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  std::vector<int> ring_bonds; // indices into bonds of cycle-closing (non-bridge) edges

  bool empty() const { return atoms.empty(); }

  // adjacency as (neighbor atom, bond index) pairs
  std::vector<std::vector<std::pair<int, int>>> adjacency() const;

  int bond_between(int a, int b) const; // bond index or -1
};

// Marks every bond that lies on a cycle (i.e. is not a bridge).
std::vector<bool> cycle_bonds(const MolGraph& g);
// An atom is in a ring iff it has an incident cycle bond.
std::vector<bool> cycle_atoms(const MolGraph& g);
// Recomputes g.ring_bonds from scratch.
void refresh_ring_bonds(MolGraph& g);

// Number of connected components.
int component_count(const MolGraph& g);
// Cyclomatic number: bonds - atoms + components.
int ring_count(const MolGraph& g);

} // namespace molegen::smiles
