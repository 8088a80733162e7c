#include "wazobia/gazetteer.h"

#include <fstream>
#include <sstream>

#include "wazobia/error.h"
#include "wazobia/postprocess.h"

namespace wazobia {

std::size_t TypeSet::size() const {
  std::size_t n = 0;
  for (auto t : kEntityTypes) n += contains(t) ? 1 : 0;
  return n;
}

EntityType TypeSet::first() const {
  for (auto t : kEntityTypes) {
    if (contains(t)) return t;
  }
  return EntityType::kPer;
}

namespace {

std::string join_folded(std::span<const Token> tokens) {
  std::string key;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) key += ' ';
    key += fold_diacritics(tokens[i].text);
  }
  return key;
}

}  // namespace

Gazetteer Gazetteer::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kFileNotFound,
                "cannot open gazetteer " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

Gazetteer Gazetteer::parse(std::string_view content) {
  Gazetteer gaz;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    std::string_view line = content.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw Error(ErrorCode::kBadFormat,
                  "gazetteer line " + std::to_string(line_no) +
                      ": expected TYPE<TAB>phrase");
    }
    auto type = parse_entity_type(line.substr(0, tab));
    if (!type) {
      throw Error(ErrorCode::kBadFormat,
                  "gazetteer line " + std::to_string(line_no) +
                      ": unknown type '" + std::string(line.substr(0, tab)) + "'");
    }
    gaz.add(*type, line.substr(tab + 1));
  }
  return gaz;
}

void Gazetteer::add(EntityType type, std::string_view phrase) {
  const std::vector<Token> tokens = tokenize(phrase);
  if (tokens.empty()) return;
  std::string key;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) key += ' ';
    key += tokens[i].normalized;
  }
  entries_[key].insert(type);
  folded_[join_folded(tokens)].insert(type);
  for (const auto& tok : tokens) {
    if (!tok.is_punct) folded_tokens_[fold_diacritics(tok.text)].insert(type);
  }
  max_phrase_len_ = std::max(max_phrase_len_, tokens.size());
}

TypeSet Gazetteer::types_of(const std::string& normalized_phrase) const {
  auto it = entries_.find(normalized_phrase);
  return it == entries_.end() ? TypeSet{} : it->second;
}

TypeSet Gazetteer::match(std::span<const Token> tokens) const {
  if (tokens.empty() || tokens.size() > max_phrase_len_) return {};
  auto it = folded_.find(join_folded(tokens));
  return it == folded_.end() ? TypeSet{} : it->second;
}

TypeSet Gazetteer::token_types(const Token& token) const {
  if (token.is_punct) return {};
  auto it = folded_tokens_.find(fold_diacritics(token.text));
  return it == folded_tokens_.end() ? TypeSet{} : it->second;
}

std::vector<std::pair<EntityType, std::string>> Gazetteer::list() const {
  std::vector<std::pair<EntityType, std::string>> out;
  for (const auto& [phrase, types] : entries_) {
    for (auto t : kEntityTypes) {
      if (types.contains(t)) out.emplace_back(t, phrase);
    }
  }
  return out;
}

}  // namespace wazobia
