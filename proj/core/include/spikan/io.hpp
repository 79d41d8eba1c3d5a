#pragma once

// Small text helpers shared by the file formats.

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace spikan::io {

// Shortest decimal string that parses back to the identical double.
std::string format_double(double v);
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

std::vector<std::string> split_ws(std::string_view line);
std::vector<std::string> split(std::string_view line, char sep);
std::string_view trim(std::string_view s);

// Line reader that tracks 1-based line numbers for ParseError messages.
class LineReader {
 public:
  explicit LineReader(std::istream& is) : is_(is) {}

  bool next(std::string& line);
  std::size_t line_number() const noexcept { return line_; }

 private:
  std::istream& is_;
  std::size_t line_ = 0;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// FNV-1a over the bytes, hex-formatted.
std::string checksum(std::string_view bytes);

}  // namespace spikan::io
