#include "wsekit/csv.hpp"

#include <fstream>
#include <sstream>

#include "wsekit/error.hpp"
#include "wsekit/numfmt.hpp"

namespace wsekit {
namespace {

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    const auto field = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    out.emplace_back(trim(field));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

CsvTable CsvTable::parse(std::string_view text, std::string_view source) {
  CsvTable table;
  table.source_ = std::string(source);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const auto line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (!have_header) {
      table.header_ = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header_.size()) {
      throw Error(ErrorKind::format, table.source_ + ": line " + std::to_string(line_no) + " has " +
                                         std::to_string(fields.size()) + " fields, expected " +
                                         std::to_string(table.header_.size()));
    }
    table.rows_.push_back(std::move(fields));
  }
  if (!have_header) throw Error(ErrorKind::format, table.source_ + ": missing header row");
  return table;
}

CsvTable CsvTable::read(const std::filesystem::path& path) {
  return parse(read_text_file(path), path.string());
}

std::optional<std::size_t> CsvTable::find_column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t CsvTable::column(std::string_view name) const {
  if (auto col = find_column(name)) return *col;
  throw Error(ErrorKind::format, source_ + ": missing column '" + std::string(name) + "'");
}

const std::string& CsvTable::text(std::size_t row, std::size_t col) const { return rows_.at(row).at(col); }

double CsvTable::number(std::size_t row, std::size_t col) const {
  const auto& field = text(row, col);
  if (auto v = parse_double(field)) return *v;
  throw Error(ErrorKind::format, source_ + ": row " + std::to_string(row + 1) + " column '" + header_.at(col) +
                                     "' is not a number: '" + field + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
}

}  // namespace wsekit
