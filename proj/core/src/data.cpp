#include "readerpanel/data.hpp"

#include <fstream>
#include <sstream>

#include "readerpanel/common.hpp"

namespace readerpanel {

std::string shipped_data(std::string_view name) {
  auto text = detail::embedded_file(name);
  if (text.empty()) fail(ErrorKind::lookup, "no shipped data file named '" + std::string(name) + "'");
  return std::string(text);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> parse_line_bank(std::string_view text) {
  std::vector<std::string> entries;
  for (const auto& raw : split_lines(text)) {
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    entries.push_back(std::move(line));
  }
  return entries;
}

std::vector<json> parse_versioned_jsonl(std::string_view text, std::string_view expected_schema) {
  std::vector<json> records;
  bool have_header = false;
  std::size_t line_no = 0;
  for (const auto& raw : split_lines(text)) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(ErrorKind::parse, "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!have_header) {
      if (!record.is_object() || record.value("schema", "") != expected_schema) {
        fail(ErrorKind::schema, "expected header record with schema '" + std::string(expected_schema) + "'");
      }
      if (record.value("version", 0) != 1) {
        fail(ErrorKind::schema, "unsupported " + std::string(expected_schema) + " version");
      }
      have_header = true;
      continue;
    }
    records.push_back(std::move(record));
  }
  if (!have_header) fail(ErrorKind::schema, "missing header record for " + std::string(expected_schema));
  return records;
}

}  // namespace readerpanel
