#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace readerpanel {

using json = nlohmann::json;

namespace detail {
std::string_view embedded_file(std::string_view name);
}

/// Contents of a data file shipped with the library (see core/data/).
/// Throws a lookup error for an unknown name.
std::string shipped_data(std::string_view name);

std::string read_text_file(const std::filesystem::path& path);

/// Line-oriented bank: one entry per line; blank lines and lines starting
/// with '#' are ignored; entries are trimmed.
std::vector<std::string> parse_line_bank(std::string_view text);

/// JSON Lines document whose first record is a header
/// {"schema": <expected_schema>, "version": 1}. Returns the remaining records.
std::vector<json> parse_versioned_jsonl(std::string_view text, std::string_view expected_schema);

}  // namespace readerpanel
