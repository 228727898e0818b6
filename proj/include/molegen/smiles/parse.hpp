#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "molegen/smiles/graph.hpp"

namespace molegen::smiles {

enum class TokenKind {
  Atom,
  BracketAtom,
  Bond,
  RingClosure,
  BranchOpen,
  BranchClose,
  Dot,
  Eol,
};

struct Token {
  TokenKind kind;
  std::string text;    // source characters, concatenation reproduces the input
  std::size_t position; // 0-based character offset
  int ring_number = -1; // for RingClosure: 0-99
};

struct SmilesError : std::runtime_error {
  SmilesError(std::string what, std::size_t pos)
      : std::runtime_error(std::move(what)), position(pos) {}
  std::size_t position;
};

struct UnknownCharacter : SmilesError {
  using SmilesError::SmilesError;
};
struct UnclosedBracketAtom : SmilesError {
  using SmilesError::SmilesError;
};
struct UnmatchedRingClosure : SmilesError {
  using SmilesError::SmilesError;
};
struct UnbalancedBranch : SmilesError {
  using SmilesError::SmilesError;
};
struct DanglingBond : SmilesError {
  using SmilesError::SmilesError;
};

// Lexes one SMILES line into a lossless token cover. Two-letter elements
// (Cl, Br) lex as single atom tokens. Stereo bond characters / and \ lex
// as bond tokens and are discarded during graph construction.
std::vector<Token> tokenize(const std::string& input);

// Builds a molecular graph; ring closures matched pairwise, branches
// balanced, implicit hydrogens inferred for unbracketed atoms.
MolGraph parse(const std::vector<Token>& tokens);

MolGraph parse_smiles(const std::string& input);

} // namespace molegen::smiles
