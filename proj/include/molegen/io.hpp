#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace molegen::io {

// One SMILES per line, LF terminated, UTF-8.
std::vector<std::string> read_lines(const std::string& path);
std::vector<std::string> read_lines_stream(std::istream& is);
void write_lines(const std::string& path, const std::vector<std::string>& lines);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// FNV-1a digest of file bytes, for run manifests.
std::uint64_t file_digest(const std::string& path);

} // namespace molegen::io
