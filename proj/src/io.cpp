#include "parafermion/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>

#include "parafermion/error.hpp"

namespace parafermion::io {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;  // drop the sign of negative zero
  std::array<char, 64> buf{};
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), result.ptr);
}

CsvWriter::CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header)
    : out_(out) {
  for (auto name : header) field(name);
  end_row();
}

void CsvWriter::separator() {
  if (row_started_) out_ << ',';
  row_started_ = true;
}

CsvWriter& CsvWriter::field(double value) {
  separator();
  out_ << format_double(value);
  return *this;
}

CsvWriter& CsvWriter::field(long long value) {
  separator();
  out_ << value;
  return *this;
}

CsvWriter& CsvWriter::field(std::string_view value) {
  separator();
  out_ << value;
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  row_started_ = false;
}

void write_text(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(file), ErrorCode::kIo, "cannot open '" + path + "' for writing");
  file << content;
  file.close();
  require(!file.fail(), ErrorCode::kIo, "failed writing '" + path + "'");
}

}  // namespace parafermion::io
