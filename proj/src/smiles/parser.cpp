#include <cctype>
#include <cmath>
#include <map>

#include "molegen/smiles/parse.hpp"
#include "molegen/smiles/valence.hpp"

namespace molegen::smiles {

namespace {

bool is_aromatic_symbol(const std::string& s) {
  return s == "b" || s == "c" || s == "n" || s == "o" || s == "p" || s == "s" ||
         s == "se" || s == "as";
}

std::string upcase_element(const std::string& s) {
  std::string out = s;
  out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

// Bracket grammar: [isotope] symbol [@|@@] [H[count]] [+|-[count]] [:map]
Atom parse_bracket(const std::string& text, std::size_t pos) {
  Atom atom;
  atom.bracketed = true;
  std::size_t i = 1; // skip '['
  const std::size_t end = text.size() - 1; // ']' position

  while (i < end && std::isdigit(static_cast<unsigned char>(text[i])))
    atom.isotope = atom.isotope * 10 + (text[i++] - '0');

  if (i >= end || !std::isalpha(static_cast<unsigned char>(text[i])))
    throw UnknownCharacter("bracket atom lacks element symbol", pos);

  std::string sym(1, text[i++]);
  if (i < end && std::islower(static_cast<unsigned char>(text[i])) &&
      !(sym == "c" || sym == "n" || sym == "o" || sym == "p" || sym == "b")) {
    // two-letter symbol (Cl, Br, Si, Se, ...); aromatic two-letter (se, as)
    sym += text[i++];
  } else if (i < end && (sym == "s" || sym == "a") &&
             (text.compare(i - 1, 2, "se") == 0 || text.compare(i - 1, 2, "as") == 0)) {
    sym += text[i++];
  }
  if (is_aromatic_symbol(sym)) {
    atom.aromatic = true;
    atom.element = upcase_element(sym);
  } else {
    atom.element = sym;
  }

  while (i < end && text[i] == '@') ++i; // chirality stripped

  if (i < end && text[i] == 'H') {
    ++i;
    atom.h_count = 1;
    if (i < end && std::isdigit(static_cast<unsigned char>(text[i])))
      atom.h_count = text[i++] - '0';
  }

  if (i < end && (text[i] == '+' || text[i] == '-')) {
    const int sign = text[i] == '+' ? 1 : -1;
    const char sym_c = text[i];
    ++i;
    int mag = 1;
    if (i < end && std::isdigit(static_cast<unsigned char>(text[i]))) {
      mag = text[i++] - '0';
    } else {
      while (i < end && text[i] == sym_c) {
        ++mag;
        ++i;
      }
    }
    atom.charge = sign * mag;
  }

  if (i < end && text[i] == ':') {
    ++i; // atom map, stripped
    while (i < end && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
  }

  if (i != end) throw UnknownCharacter("trailing characters in bracket atom", pos + i);
  return atom;
}

Atom parse_plain_atom(const std::string& text) {
  Atom atom;
  if (std::islower(static_cast<unsigned char>(text[0]))) {
    atom.aromatic = true;
    atom.element = upcase_element(text);
  } else {
    atom.element = text;
  }
  return atom;
}

BondOrder order_from_char(char c) {
  switch (c) {
    case '=': return BondOrder::Double;
    case '#': return BondOrder::Triple;
    case ':': return BondOrder::Aromatic;
    default: return BondOrder::Single; // '-', '/', '\\' (stereo stripped)
  }
}

struct PendingRing {
  int atom;
  BondOrder order;
  bool order_given;
  std::size_t position;
};

} // namespace

MolGraph parse(const std::vector<Token>& tokens) {
  MolGraph g;
  int prev_atom = -1;
  bool bond_pending = false;
  BondOrder pending_order = BondOrder::Single;
  std::size_t pending_pos = 0;
  std::vector<int> branch_stack;
  std::map<int, PendingRing> open_rings;

  auto add_bond = [&](int a, int b, BondOrder order, std::size_t pos) {
    if (a == b) throw UnmatchedRingClosure("ring closure bonds atom to itself", pos);
    if (g.bond_between(a, b) != -1)
      throw UnmatchedRingClosure("duplicate bond between atom pair", pos);
    g.bonds.push_back({a, b, order});
  };

  auto attach_atom = [&](Atom atom, std::size_t pos) {
    g.atoms.push_back(std::move(atom));
    const int idx = static_cast<int>(g.atoms.size()) - 1;
    if (prev_atom >= 0) {
      BondOrder order = pending_order;
      if (!bond_pending)
        order = (g.atoms[prev_atom].aromatic && g.atoms[idx].aromatic) ? BondOrder::Aromatic
                                                                       : BondOrder::Single;
      add_bond(prev_atom, idx, order, pos);
    }
    bond_pending = false;
    pending_order = BondOrder::Single;
    prev_atom = idx;
  };

  for (const Token& t : tokens) {
    switch (t.kind) {
      case TokenKind::Atom:
        attach_atom(parse_plain_atom(t.text), t.position);
        break;
      case TokenKind::BracketAtom:
        attach_atom(parse_bracket(t.text, t.position), t.position);
        break;
      case TokenKind::Bond:
        if (prev_atom < 0 || bond_pending) throw DanglingBond("bond without preceding atom", t.position);
        bond_pending = true;
        pending_order = order_from_char(t.text[0]);
        pending_pos = t.position;
        break;
      case TokenKind::RingClosure: {
        if (prev_atom < 0) throw DanglingBond("ring closure before any atom", t.position);
        auto it = open_rings.find(t.ring_number);
        if (it == open_rings.end()) {
          open_rings[t.ring_number] = {prev_atom, pending_order, bond_pending, t.position};
        } else {
          PendingRing open = it->second;
          open_rings.erase(it);
          BondOrder order;
          if (bond_pending && open.order_given) {
            if (pending_order != open.order)
              throw UnmatchedRingClosure("conflicting ring-closure bond orders", t.position);
            order = pending_order;
          } else if (bond_pending) {
            order = pending_order;
          } else if (open.order_given) {
            order = open.order;
          } else {
            order = (g.atoms[open.atom].aromatic && g.atoms[prev_atom].aromatic)
                        ? BondOrder::Aromatic
                        : BondOrder::Single;
          }
          add_bond(open.atom, prev_atom, order, t.position);
        }
        bond_pending = false;
        pending_order = BondOrder::Single;
        break;
      }
      case TokenKind::BranchOpen:
        if (prev_atom < 0) throw UnbalancedBranch("branch opens before any atom", t.position);
        if (bond_pending) throw DanglingBond("bond dangling into branch open", t.position);
        branch_stack.push_back(prev_atom);
        break;
      case TokenKind::BranchClose:
        if (branch_stack.empty()) throw UnbalancedBranch("unmatched ')'", t.position);
        if (bond_pending) throw DanglingBond("bond dangling at branch close", t.position);
        prev_atom = branch_stack.back();
        branch_stack.pop_back();
        break;
      case TokenKind::Dot:
        if (bond_pending) throw DanglingBond("bond dangling at '.'", t.position);
        if (!branch_stack.empty()) throw UnbalancedBranch("'.' inside branch", t.position);
        prev_atom = -1;
        break;
      case TokenKind::Eol:
        break;
    }
  }

  if (bond_pending) throw DanglingBond("trailing bond symbol", pending_pos);
  if (!branch_stack.empty())
    throw UnbalancedBranch("unclosed '('", tokens.empty() ? 0 : tokens.back().position);
  if (!open_rings.empty()) {
    const auto& first = *open_rings.begin();
    throw UnmatchedRingClosure("unmatched ring closure " + std::to_string(first.first),
                               first.second.position);
  }

  // implicit hydrogens for unbracketed atoms
  const auto& table = ValenceTable::standard();
  std::vector<double> bond_sum(g.atoms.size(), 0.0);
  for (const Bond& b : g.bonds) {
    bond_sum[b.a] += bond_value(b.order);
    bond_sum[b.b] += bond_value(b.order);
  }
  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    Atom& a = g.atoms[i];
    if (a.bracketed) continue;
    const int bs = static_cast<int>(std::ceil(bond_sum[i] - 1e-9));
    const int target = table.implicit_target(a.element, bs);
    a.h_count = target < 0 ? 0 : target - bs;
  }

  refresh_ring_bonds(g);
  return g;
}

MolGraph parse_smiles(const std::string& input) { return parse(tokenize(input)); }

} // namespace molegen::smiles
