#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "molegen/nn/lstm.hpp"

namespace molegen::lm {

struct EmptyCorpus : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct VocabularyMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IndexOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Ordered symbol set with index mapping. Symbols are single characters
// except the two-letter atom symbols Cl and Br; the EOL symbol "\n" is
// always a member. Order is sorted, indices 0..K-1.
class Vocabulary {
 public:
  static constexpr const char* kEol = "\n";

  // Splits one line into vocabulary symbols (Cl/Br kept whole).
  static std::vector<std::string> symbolize(const std::string& line);

  static Vocabulary from_corpus(const std::vector<std::string>& lines);
  static Vocabulary from_symbols(std::vector<std::string> symbols); // checkpoint load

  int size() const { return static_cast<int>(symbols_.size()); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  const std::string& symbol(int index) const;
  int index(const std::string& symbol) const; // throws VocabularyMismatch
  int eol_index() const { return eol_; }

  bool covers(const std::string& line) const;
  // Symbol indices of a line, EOL appended when requested.
  std::vector<int> encode(const std::string& line, bool append_eol) const;

 private:
  std::vector<std::string> symbols_;
  std::map<std::string, int> index_;
  int eol_ = -1;
};

// k-th entry 1, all others 0.
nn::Vector encode_one_hot(int k, int size);

} // namespace molegen::lm
