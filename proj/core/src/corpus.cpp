#include "proofsmith/corpus.hpp"

#include <fstream>
#include <sstream>

#include "proofsmith/errors.hpp"

namespace proofsmith {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<Json> parse_jsonl(std::string_view text, std::string_view origin) {
  std::vector<Json> rows;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    ++line_no;
    std::string_view line = text.substr(start, nl - start);
    start = nl + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      rows.push_back(Json::parse(line));
    } catch (const Json::parse_error& e) {
      throw Error(std::string(origin) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

std::vector<Json> read_jsonl(const std::filesystem::path& path) {
  return parse_jsonl(read_text_file(path), path.string());
}

OrderedJson statement_to_json(const FormalStatement& stmt) {
  OrderedJson row;
  row["id"] = stmt.id;
  row["formal_statement"] = source_text(stmt);
  row["informal_statement"] = stmt.docstring ? OrderedJson(*stmt.docstring) : OrderedJson(nullptr);
  row["provenance"] = std::string(to_string(stmt.provenance));
  return row;
}

FormalStatement statement_from_json(const Json& row) {
  if (!row.is_object() || !row.contains("formal_statement") || !row["formal_statement"].is_string()) {
    throw Error("corpus record lacks a string 'formal_statement'");
  }
  FormalStatement stmt = parse_theorem(row["formal_statement"].get<std::string>());
  stmt.id = row.value("id", stmt.name);
  if (auto it = row.find("informal_statement"); it != row.end() && it->is_string()) {
    stmt.docstring = it->get<std::string>();
  }
  if (auto it = row.find("provenance"); it != row.end() && it->is_string()) {
    stmt.provenance = provenance_from_string(it->get<std::string>());
  }
  return stmt;
}

namespace {

std::vector<CorpusEntry> entries_from_rows(const std::vector<Json>& rows, std::string_view origin) {
  std::vector<CorpusEntry> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    try {
      CorpusEntry entry{statement_from_json(rows[i]), std::nullopt};
      if (auto it = rows[i].find("solved"); it != rows[i].end() && it->is_boolean()) {
        entry.solved = it->get<bool>();
      }
      out.push_back(std::move(entry));
    } catch (const Error& e) {
      throw Error(std::string(origin) + ": record " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

std::vector<CorpusEntry> read_corpus_entries(const std::filesystem::path& path) {
  return entries_from_rows(read_jsonl(path), path.string());
}

std::vector<FormalStatement> read_corpus(const std::filesystem::path& path) {
  std::vector<FormalStatement> out;
  for (auto& e : read_corpus_entries(path)) out.push_back(std::move(e.statement));
  return out;
}

std::vector<FormalStatement> parse_corpus(std::string_view text, std::string_view origin) {
  std::vector<FormalStatement> out;
  for (auto& e : entries_from_rows(parse_jsonl(text, origin), origin)) out.push_back(std::move(e.statement));
  return out;
}

std::string corpus_to_jsonl(const std::vector<FormalStatement>& statements) {
  std::vector<OrderedJson> rows;
  rows.reserve(statements.size());
  for (const auto& s : statements) rows.push_back(statement_to_json(s));
  return to_jsonl(rows);
}

void write_corpus(const std::filesystem::path& path, const std::vector<FormalStatement>& statements) {
  write_text_file_atomic(path, corpus_to_jsonl(statements));
}

}  // namespace proofsmith
