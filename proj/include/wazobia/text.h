#ifndef WAZOBIA_TEXT_H_
#define WAZOBIA_TEXT_H_

// Tokens, sentences, the BIO label set and span decoding.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wazobia {

enum class Language : std::uint8_t { kHausa, kIgbo, kYoruba, kUnknown };

// "hausa" | "igbo" | "yoruba" | "unknown"; anything else is BAD_LANGUAGE.
Language parse_language(std::string_view name);
std::string_view language_name(Language lang);

struct Token {
  std::string text;
  std::string normalized;
  std::size_t start_char = 0;  // inclusive, scalar values
  std::size_t end_char = 0;    // exclusive
  bool is_punct = false;

  bool operator==(const Token&) const = default;
};

struct Sentence {
  // Source text that token offsets index into.
  std::string text;
  std::vector<Token> tokens;
  Language language = Language::kUnknown;
  std::optional<std::vector<std::string>> pos_tags;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const Sentence&) const = default;
};

enum class EntityType : std::uint8_t { kPer, kOrg, kLoc };
inline constexpr std::array<EntityType, 3> kEntityTypes = {
    EntityType::kPer, EntityType::kOrg, EntityType::kLoc};

std::string_view entity_type_name(EntityType type);
std::optional<EntityType> parse_entity_type(std::string_view name);

// Index order is fixed; every L x L or F x L matrix in the library uses it.
enum class BioLabel : std::uint8_t {
  kO = 0,
  kBPer = 1,
  kIPer = 2,
  kBOrg = 3,
  kIOrg = 4,
  kBLoc = 5,
  kILoc = 6,
};
inline constexpr int kLabelCount = 7;

std::string_view label_name(BioLabel label);
// Throws BAD_LABEL for anything outside the seven labels.
BioLabel parse_label(std::string_view name);
std::optional<BioLabel> try_parse_label(std::string_view name);
inline int label_index(BioLabel label) { return static_cast<int>(label); }
BioLabel label_from_index(int index);

bool is_begin(BioLabel label);
bool is_inside(BioLabel label);
std::optional<EntityType> entity_of(BioLabel label);
BioLabel begin_label(EntityType type);
BioLabel inside_label(EntityType type);

struct EntitySpan {
  EntityType type = EntityType::kPer;
  std::size_t start_tok = 0;  // inclusive
  std::size_t end_tok = 0;    // inclusive
  std::size_t start_char = 0;
  std::size_t end_char = 0;
  std::string surface;

  bool operator==(const EntitySpan&) const = default;
};

// Splits on whitespace; every punctuation or symbol character becomes its
// own token. Offsets are scalar-value offsets into `text`.
std::vector<Token> tokenize(std::string_view text);

// Lowercase, then canonical composition. Tone marks are kept.
std::string normalize(std::string_view text);

Sentence make_sentence(std::string_view text, Language language);

// Token-level spans only (char offsets zero, surface empty). Orphan I-X is
// read as B-X.
std::vector<EntitySpan> decode_bio(std::span<const BioLabel> labels);

// Same, with char offsets and surface filled from the sentence.
std::vector<EntitySpan> decode_bio(std::span<const BioLabel> labels,
                                   const Sentence& sentence);

// Fills start_char/end_char/surface from the sentence's tokens.
void attach_offsets(EntitySpan& span, const Sentence& sentence);

// Throws OVERLAPPING_SPANS if two spans share a token and
// POSITION_OUT_OF_RANGE if a span reaches past `length`.
std::vector<BioLabel> encode_bio(std::span<const EntitySpan> spans,
                                 std::size_t length);

// True when decode_bio needs no repair for this sequence.
bool is_valid_bio(std::span<const BioLabel> labels);

// Rewrites orphan I-X to B-X in place; returns the number of repairs.
std::size_t repair_bio(std::vector<BioLabel>& labels);

// Token index ranges [begin, end) ending after each '.', '!' or '?'.
std::vector<std::pair<std::size_t, std::size_t>> sentence_bounds(
    std::span<const Token> tokens);

}  // namespace wazobia

#endif  // WAZOBIA_TEXT_H_
