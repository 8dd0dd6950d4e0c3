#pragma once

// Minimal CSV plumbing shared by every file format in the project:
// comma delimiter, dot decimal separator, mandatory header, LF line endings,
// floats printed with 6 significant digits.

#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace trajkit::csv {

/// Canonical float text: printf("%.6g"), with negative zero printed as "0".
std::string format_double(double v);
std::string format_list(std::span<const double> values, char sep = ';');

std::optional<long long> parse_int(std::string_view s) noexcept;
/// Finite doubles only.
std::optional<double> parse_double(std::string_view s) noexcept;
std::optional<std::vector<double>> parse_list(std::string_view s, char sep = ';');

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view content);

/// Line-oriented reader over an in-memory CSV document.
class Document {
 public:
  explicit Document(std::string text);
  /// Streams the file line by line instead of holding it in memory.
  static Document open(const std::filesystem::path& p);

  const std::vector<std::string>& header() const noexcept { return header_; }
  std::optional<std::size_t> column(std::string_view name) const;

  /// Advances to the next non-empty data line. Fields stay valid until the
  /// next call.
  bool next();
  const std::vector<std::string_view>& fields() const noexcept { return fields_; }
  /// 1-based line number of the current record (the header is line 1).
  std::size_t line() const noexcept { return line_; }

 private:
  std::string text_;
  std::unique_ptr<std::istream> stream_;
  std::string buffer_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
  std::vector<std::string> header_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string_view> fields_;

  Document() = default;
  void read_header();
  std::optional<std::string_view> next_line();
};

void split(std::string_view line, char sep, std::vector<std::string_view>& out);

/// Appends one CSV row and a trailing LF.
void append_row(std::string& out, std::span<const std::string> cells);

}  // namespace trajkit::csv
