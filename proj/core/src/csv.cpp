#include "trajkit/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace trajkit::csv {

std::string format_double(double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.6g", v);
  std::string s(buf, static_cast<std::size_t>(n));
  if (s == "-0") s = "0";
  return s;
}

std::string format_list(std::span<const double> values, char sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out.push_back(sep);
    out += format_double(values[i]);
  }
  return out;
}

std::optional<long long> parse_int(std::string_view s) noexcept {
  long long v = 0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || p != end || s.empty()) return std::nullopt;
  return v;
}

std::optional<double> parse_double(std::string_view s) noexcept {
  double v = 0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || p != end || s.empty() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::vector<double>> parse_list(std::string_view s, char sep) {
  std::vector<double> out;
  if (s.empty()) return out;
  std::vector<std::string_view> parts;
  split(s, sep, parts);
  for (auto part : parts) {
    auto v = parse_double(part);
    if (!v) return std::nullopt;
    out.push_back(*v);
  }
  return out;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  std::string text(size, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(size))) throw std::runtime_error("cannot read " + p.string());
  return text;
}

void write_file(const std::filesystem::path& p, std::string_view content) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

void split(std::string_view line, char sep, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

void append_row(std::string& out, std::span<const std::string> cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out.push_back(',');
    out += cells[i];
  }
  out.push_back('\n');
}

Document::Document(std::string text) : text_(std::move(text)) { read_header(); }

Document Document::open(const std::filesystem::path& p) {
  auto in = std::make_unique<std::ifstream>(p, std::ios::binary);
  if (!*in) throw std::runtime_error("cannot open " + p.string());
  Document doc;
  doc.stream_ = std::move(in);
  doc.read_header();
  return doc;
}

void Document::read_header() {
  if (auto h = next_line()) {
    std::vector<std::string_view> parts;
    split(*h, ',', parts);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      header_.emplace_back(parts[i]);
      index_.emplace(header_.back(), i);
    }
  }
}

std::optional<std::size_t> Document::column(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string_view> Document::next_line() {
  std::string_view line;
  if (stream_) {
    if (!std::getline(*stream_, buffer_)) return std::nullopt;
    line = buffer_;
  } else {
    if (pos_ >= text_.size()) return std::nullopt;
    const auto nl = text_.find('\n', pos_);
    const auto end = nl == std::string::npos ? text_.size() : nl;
    line = std::string_view(text_.data() + pos_, end - pos_);
    pos_ = end + 1;
  }
  ++line_;
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

bool Document::next() {
  while (auto l = next_line()) {
    if (l->empty()) continue;
    split(*l, ',', fields_);
    return true;
  }
  return false;
}

}  // namespace trajkit::csv
