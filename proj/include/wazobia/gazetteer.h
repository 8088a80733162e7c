#ifndef WAZOBIA_GAZETTEER_H_
#define WAZOBIA_GAZETTEER_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wazobia/text.h"

namespace wazobia {

// Bit set over the three entity types.
class TypeSet {
 public:
  TypeSet() = default;

  void insert(EntityType t) { bits_ |= bit(t); }
  bool contains(EntityType t) const { return (bits_ & bit(t)) != 0; }
  bool empty() const { return bits_ == 0; }
  std::size_t size() const;
  // First member in PER, ORG, LOC order. Precondition: !empty().
  EntityType first() const;
  void merge(TypeSet other) { bits_ |= other.bits_; }

  bool operator==(const TypeSet&) const = default;

 private:
  static std::uint8_t bit(EntityType t) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(t));
  }
  std::uint8_t bits_ = 0;
};

// Phrase list keyed by normalize()d, single-space-joined token sequences.
// A diacritic-folded index is kept alongside for variant-tolerant lookup.
//
// File format: UTF-8, one `TYPE<TAB>phrase` per line, TYPE in {PER,ORG,LOC};
// blank lines and lines starting with '#' are ignored.
class Gazetteer {
 public:
  Gazetteer() = default;

  // Throws FILE_NOT_FOUND or BAD_FORMAT (with line number).
  static Gazetteer load(const std::filesystem::path& path);
  static Gazetteer parse(std::string_view content);

  void add(EntityType type, std::string_view phrase);

  bool empty() const { return entries_.empty(); }
  std::size_t max_phrase_len() const { return max_phrase_len_; }
  const std::map<std::string, TypeSet>& entries() const { return entries_; }

  // Exact lookup of a normalized key.
  TypeSet types_of(const std::string& normalized_phrase) const;
  // Diacritic-insensitive lookup of a token sequence.
  TypeSet match(std::span<const Token> tokens) const;
  // Types of any phrase containing this token (folded comparison).
  TypeSet token_types(const Token& token) const;

  // (type, phrase) pairs in a stable order, for serialization.
  std::vector<std::pair<EntityType, std::string>> list() const;

  bool operator==(const Gazetteer& other) const {
    return entries_ == other.entries_;
  }

 private:
  std::map<std::string, TypeSet> entries_;
  std::map<std::string, TypeSet> folded_;
  std::map<std::string, TypeSet> folded_tokens_;
  std::size_t max_phrase_len_ = 0;
};

}  // namespace wazobia

#endif  // WAZOBIA_GAZETTEER_H_
