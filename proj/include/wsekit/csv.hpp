#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wsekit {

/// Minimal comma-separated table: one header row, no quoting. Blank lines are
/// skipped. Numbers are parsed locale-independently.
class CsvTable {
 public:
  static CsvTable parse(std::string_view text, std::string_view source = "<memory>");
  static CsvTable read(const std::filesystem::path& path);

  const std::vector<std::string>& header() const noexcept { return header_; }
  std::size_t size() const noexcept { return rows_.size(); }

  std::optional<std::size_t> find_column(std::string_view name) const;
  /// Throws a format error naming the source if `name` is absent.
  std::size_t column(std::string_view name) const;

  const std::string& text(std::size_t row, std::size_t col) const;
  double number(std::size_t row, std::size_t col) const;

 private:
  std::string source_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace wsekit
