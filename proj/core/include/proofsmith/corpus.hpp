#pragma once

// Statement corpus files: JSON-lines of
// {"id": str, "formal_statement": str, "informal_statement": str|null, "provenance": str}

#include <filesystem>
#include <optional>
#include <vector>

#include "proofsmith/io.hpp"
#include "proofsmith/statements.hpp"

namespace proofsmith {

struct CorpusEntry {
  FormalStatement statement;
  // Optional "solved" field, consumed by informal synthesis.
  std::optional<bool> solved;
};

OrderedJson statement_to_json(const FormalStatement& stmt);
FormalStatement statement_from_json(const Json& row);

std::vector<CorpusEntry> read_corpus_entries(const std::filesystem::path& path);
std::vector<FormalStatement> read_corpus(const std::filesystem::path& path);
std::vector<FormalStatement> parse_corpus(std::string_view text, std::string_view origin = "<memory>");
void write_corpus(const std::filesystem::path& path, const std::vector<FormalStatement>& statements);
std::string corpus_to_jsonl(const std::vector<FormalStatement>& statements);

}  // namespace proofsmith
