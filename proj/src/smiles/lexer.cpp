#include "molegen/smiles/parse.hpp"

namespace molegen::smiles {

namespace {

bool is_organic_subset_start(char c) {
  switch (c) {
    case 'B': case 'C': case 'N': case 'O': case 'P': case 'S':
    case 'F': case 'I':
    case 'b': case 'c': case 'n': case 'o': case 'p': case 's':
      return true;
    default:
      return false;
  }
}

bool is_bond_char(char c) {
  return c == '-' || c == '=' || c == '#' || c == ':' || c == '/' || c == '\\';
}

} // namespace

std::vector<Token> tokenize(const std::string& input) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = input.size();
  while (i < n) {
    const char c = input[i];
    if (c == '\n') throw UnknownCharacter("interior end-of-line", i);
    if (c == '[') {
      std::size_t j = input.find(']', i);
      if (j == std::string::npos) throw UnclosedBracketAtom("unclosed bracket atom", i);
      out.push_back({TokenKind::BracketAtom, input.substr(i, j - i + 1), i});
      i = j + 1;
    } else if (is_organic_subset_start(c)) {
      // Cl and Br are single atom tokens
      if ((c == 'C' && i + 1 < n && input[i + 1] == 'l') ||
          (c == 'B' && i + 1 < n && input[i + 1] == 'r')) {
        out.push_back({TokenKind::Atom, input.substr(i, 2), i});
        i += 2;
      } else {
        out.push_back({TokenKind::Atom, std::string(1, c), i});
        ++i;
      }
    } else if (c >= '0' && c <= '9') {
      Token t{TokenKind::RingClosure, std::string(1, c), i};
      t.ring_number = c - '0';
      out.push_back(t);
      ++i;
    } else if (c == '%') {
      if (i + 2 >= n || !isdigit(static_cast<unsigned char>(input[i + 1])) ||
          !isdigit(static_cast<unsigned char>(input[i + 2])))
        throw UnknownCharacter("malformed %NN ring closure", i);
      Token t{TokenKind::RingClosure, input.substr(i, 3), i};
      t.ring_number = (input[i + 1] - '0') * 10 + (input[i + 2] - '0');
      out.push_back(t);
      i += 3;
    } else if (is_bond_char(c)) {
      out.push_back({TokenKind::Bond, std::string(1, c), i});
      ++i;
    } else if (c == '(') {
      out.push_back({TokenKind::BranchOpen, "(", i});
      ++i;
    } else if (c == ')') {
      out.push_back({TokenKind::BranchClose, ")", i});
      ++i;
    } else if (c == '.') {
      out.push_back({TokenKind::Dot, ".", i});
      ++i;
    } else {
      throw UnknownCharacter(std::string("unknown character '") + c + "'", i);
    }
  }
  return out;
}

} // namespace molegen::smiles
