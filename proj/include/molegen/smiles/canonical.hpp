#pragma once

#include <string>
#include <vector>

#include "molegen/smiles/graph.hpp"

namespace molegen::smiles {

// Canonical SMILES of a (stereo-stripped) graph: unique per isomorphism
// class. Iterative refinement of atom invariants (element, degree, charge,
// aromatic flag, H count, isotope, neighbor ranks); remaining ties are
// resolved by branching over the smallest tied cell and keeping the
// lexicographically smallest rendering. Multi-component graphs emit
// per-component canonical strings, sorted, joined by '.'.
std::string canonical_smiles(const MolGraph& g);

// Parse + validate + canonical_smiles. Propagates parse errors; throws
// std::invalid_argument when validation rejects.
std::string canonicalize(const std::string& smiles);

} // namespace molegen::smiles
