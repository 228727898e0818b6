#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "molegen/smiles/graph.hpp"

namespace molegen::smiles {

struct GraphTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Writes a SMILES string that parses back to an isomorphic graph.
// Ring-closure digits are reused after closing, lowest free digit first,
// %NN for two-digit numbers; more than 99 simultaneously open closures
// throws GraphTooLarge.
//
// `atom_rank` optionally fixes the traversal: each component starts at its
// minimal-rank atom and neighbors are visited in ascending rank. Empty rank
// means input index order.
std::string write_smiles(const MolGraph& g, const std::vector<int>& atom_rank = {});

} // namespace molegen::smiles
