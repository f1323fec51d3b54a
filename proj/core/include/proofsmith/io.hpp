#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace proofsmith {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

std::string read_text_file(const std::filesystem::path& path);

// Writes to a sibling temp file, then renames over `path`.
void write_text_file_atomic(const std::filesystem::path& path, std::string_view content);

// One JSON value per nonempty line. Errors carry "path:line".
std::vector<Json> read_jsonl(const std::filesystem::path& path);
std::vector<Json> parse_jsonl(std::string_view text, std::string_view origin = "<memory>");

template <typename JsonT>
std::string to_jsonl(const std::vector<JsonT>& rows) {
  std::string out;
  for (const auto& row : rows) {
    out += row.dump();
    out += '\n';
  }
  return out;
}

}  // namespace proofsmith
