#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace proofsmith {

namespace templates {
inline constexpr std::string_view kProverInitial = "prover_initial";
inline constexpr std::string_view kProverInitialInformal = "prover_initial_informal";
inline constexpr std::string_view kProverCorrection = "prover_correction";
inline constexpr std::string_view kFormalizer = "formalizer";
inline constexpr std::string_view kJudgeFaithfulness = "judge_faithfulness";
inline constexpr std::string_view kInformalSolve = "informal_solve";
inline constexpr std::string_view kInformalSimpler = "informal_simpler";
inline constexpr std::string_view kInformalHarder = "informal_harder";
inline constexpr std::string_view kJudgeCorrectnessSimplicity = "judge_correctness_simplicity";
}  // namespace templates

// Prompt templates keyed by id. Templates are opaque text with `{name}`
// placeholders; only names passed to render() are substituted, so other
// braces pass through untouched.
class TemplateRegistry {
 public:
  // The templates compiled into the library.
  static TemplateRegistry builtin();

  // Every `<id>.txt` in `dir` replaces (or adds) template `<id>`.
  void load_directory(const std::filesystem::path& dir);

  void set(std::string id, std::string text);
  bool contains(std::string_view id) const;

  // Throws UnknownTemplate.
  const std::string& get(std::string_view id) const;

  // Single left-to-right pass; substituted values are never rescanned.
  std::string render(std::string_view id, const std::map<std::string, std::string>& values) const;

  // Throws MissingPlaceholder unless `{placeholder}` occurs in the template.
  void require(std::string_view id, std::string_view placeholder) const;

  // Hex SHA-256 of each template, for run manifests.
  std::map<std::string, std::string> digests() const;

 private:
  std::map<std::string, std::string, std::less<>> texts_;
};

std::string substitute(std::string_view text, const std::map<std::string, std::string>& values);

}  // namespace proofsmith
