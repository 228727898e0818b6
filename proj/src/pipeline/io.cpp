#include <fstream>
#include <sstream>
#include <stdexcept>

#include "molegen/io.hpp"
#include "molegen/lm/checkpoint.hpp"

namespace molegen::io {

std::vector<std::string> read_lines_stream(std::istream& is) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  return read_lines_stream(is);
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  for (const auto& l : lines) os << l << "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << content;
}

std::uint64_t file_digest(const std::string& path) {
  const std::string bytes = read_file(path);
  return lm::fnv1a64(bytes.data(), bytes.size());
}

} // namespace molegen::io
