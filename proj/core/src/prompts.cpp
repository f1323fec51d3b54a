#include "proofsmith/prompts.hpp"

#include <vector>

#include "proofsmith/digest.hpp"
#include "proofsmith/errors.hpp"
#include "proofsmith/io.hpp"

namespace proofsmith {

namespace detail {
const std::vector<std::pair<std::string_view, std::string_view>>& embedded_prompts();
}

TemplateRegistry TemplateRegistry::builtin() {
  TemplateRegistry r;
  for (const auto& [id, text] : detail::embedded_prompts()) r.set(std::string(id), std::string(text));
  return r;
}

void TemplateRegistry::load_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError("prompt directory not found: " + dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      set(entry.path().stem().string(), read_text_file(entry.path()));
    }
  }
}

void TemplateRegistry::set(std::string id, std::string text) { texts_[std::move(id)] = std::move(text); }

bool TemplateRegistry::contains(std::string_view id) const { return texts_.find(id) != texts_.end(); }

const std::string& TemplateRegistry::get(std::string_view id) const {
  const auto it = texts_.find(id);
  if (it == texts_.end()) throw UnknownTemplate(std::string(id));
  return it->second;
}

std::string substitute(std::string_view text, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '{') {
      const std::size_t close = text.find('}', i + 1);
      if (close != std::string_view::npos) {
        const auto it = values.find(std::string(text.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += text[i++];
  }
  return out;
}

std::string TemplateRegistry::render(std::string_view id, const std::map<std::string, std::string>& values) const {
  return substitute(get(id), values);
}

void TemplateRegistry::require(std::string_view id, std::string_view placeholder) const {
  const std::string needle = "{" + std::string(placeholder) + "}";
  if (get(id).find(needle) == std::string::npos) {
    throw MissingPlaceholder(std::string(id), std::string(placeholder));
  }
}

std::map<std::string, std::string> TemplateRegistry::digests() const {
  std::map<std::string, std::string> out;
  for (const auto& [id, text] : texts_) out[id] = sha256_hex(text);
  return out;
}

}  // namespace proofsmith
