#include <algorithm>
#include <set>

#include "molegen/lm/vocabulary.hpp"

namespace molegen::lm {

std::vector<std::string> Vocabulary::symbolize(const std::string& line) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < line.size();) {
    if (i + 1 < line.size() &&
        ((line[i] == 'C' && line[i + 1] == 'l') || (line[i] == 'B' && line[i + 1] == 'r'))) {
      out.push_back(line.substr(i, 2));
      i += 2;
    } else {
      out.push_back(std::string(1, line[i]));
      ++i;
    }
  }
  return out;
}

Vocabulary Vocabulary::from_corpus(const std::vector<std::string>& lines) {
  if (lines.empty()) throw EmptyCorpus("empty corpus");
  std::set<std::string> seen{kEol};
  for (const auto& line : lines)
    for (auto& s : symbolize(line)) seen.insert(std::move(s));
  return from_symbols({seen.begin(), seen.end()});
}

Vocabulary Vocabulary::from_symbols(std::vector<std::string> symbols) {
  std::sort(symbols.begin(), symbols.end());
  Vocabulary v;
  v.symbols_ = std::move(symbols);
  for (int i = 0; i < static_cast<int>(v.symbols_.size()); ++i) v.index_[v.symbols_[i]] = i;
  auto it = v.index_.find(kEol);
  if (it == v.index_.end()) throw VocabularyMismatch("vocabulary lacks EOL symbol");
  v.eol_ = it->second;
  return v;
}

const std::string& Vocabulary::symbol(int index) const {
  if (index < 0 || index >= size()) throw IndexOutOfRange("symbol index out of range");
  return symbols_[index];
}

int Vocabulary::index(const std::string& symbol) const {
  auto it = index_.find(symbol);
  if (it == index_.end()) throw VocabularyMismatch("symbol not in vocabulary: " + symbol);
  return it->second;
}

bool Vocabulary::covers(const std::string& line) const {
  for (const auto& s : symbolize(line))
    if (!index_.count(s)) return false;
  return true;
}

std::vector<int> Vocabulary::encode(const std::string& line, bool append_eol) const {
  std::vector<int> out;
  for (const auto& s : symbolize(line)) out.push_back(index(s));
  if (append_eol) out.push_back(eol_);
  return out;
}

nn::Vector encode_one_hot(int k, int size) {
  if (k < 0 || k >= size) throw IndexOutOfRange("one-hot index out of range");
  nn::Vector v = nn::Vector::Zero(size);
  v(k) = 1.0;
  return v;
}

} // namespace molegen::lm
