#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace parafermion::io {

// Shortest decimal string that round-trips to the same double ('.' separator,
// locale independent).
std::string format_double(double value);

// Minimal CSV emitter: header row, comma separated, LF line endings.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header);

  CsvWriter& field(double value);
  CsvWriter& field(long long value);
  CsvWriter& field(std::string_view value);
  void end_row();

 private:
  void separator();

  std::ostream& out_;
  bool row_started_ = false;
};

// Writes `content` to `path` (or stdout when path is empty or "-"); throws
// ErrorCode::kIo on failure.
void write_text(const std::string& path, const std::string& content);

}  // namespace parafermion::io
