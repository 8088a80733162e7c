#include "wazobia/text.h"

#include <algorithm>
#include <string>

#include "wazobia/error.h"
#include "wazobia/unicode.h"

namespace wazobia {

Language parse_language(std::string_view name) {
  if (name == "hausa") return Language::kHausa;
  if (name == "igbo") return Language::kIgbo;
  if (name == "yoruba") return Language::kYoruba;
  if (name == "unknown") return Language::kUnknown;
  throw Error(ErrorCode::kBadLanguage,
              "unknown language '" + std::string(name) + "'");
}

std::string_view language_name(Language lang) {
  switch (lang) {
    case Language::kHausa: return "hausa";
    case Language::kIgbo: return "igbo";
    case Language::kYoruba: return "yoruba";
    case Language::kUnknown: return "unknown";
  }
  return "unknown";
}

std::string_view entity_type_name(EntityType type) {
  switch (type) {
    case EntityType::kPer: return "PER";
    case EntityType::kOrg: return "ORG";
    case EntityType::kLoc: return "LOC";
  }
  return "PER";
}

std::optional<EntityType> parse_entity_type(std::string_view name) {
  if (name == "PER") return EntityType::kPer;
  if (name == "ORG") return EntityType::kOrg;
  if (name == "LOC") return EntityType::kLoc;
  return std::nullopt;
}

namespace {

constexpr std::array<std::string_view, kLabelCount> kLabelNames = {
    "O", "B-PER", "I-PER", "B-ORG", "I-ORG", "B-LOC", "I-LOC"};

}  // namespace

std::string_view label_name(BioLabel label) {
  return kLabelNames[static_cast<std::size_t>(label)];
}

std::optional<BioLabel> try_parse_label(std::string_view name) {
  for (std::size_t i = 0; i < kLabelNames.size(); ++i) {
    if (kLabelNames[i] == name) return static_cast<BioLabel>(i);
  }
  return std::nullopt;
}

BioLabel parse_label(std::string_view name) {
  if (auto label = try_parse_label(name)) return *label;
  throw Error(ErrorCode::kBadLabel, "unknown label '" + std::string(name) + "'");
}

BioLabel label_from_index(int index) {
  if (index < 0 || index >= kLabelCount) {
    throw Error(ErrorCode::kBadLabel,
                "label index " + std::to_string(index) + " out of range");
  }
  return static_cast<BioLabel>(index);
}

bool is_begin(BioLabel label) {
  const int i = label_index(label);
  return i > 0 && i % 2 == 1;
}

bool is_inside(BioLabel label) {
  const int i = label_index(label);
  return i > 0 && i % 2 == 0;
}

std::optional<EntityType> entity_of(BioLabel label) {
  const int i = label_index(label);
  if (i == 0) return std::nullopt;
  return static_cast<EntityType>((i - 1) / 2);
}

BioLabel begin_label(EntityType type) {
  return static_cast<BioLabel>(1 + 2 * static_cast<int>(type));
}

BioLabel inside_label(EntityType type) {
  return static_cast<BioLabel>(2 + 2 * static_cast<int>(type));
}

std::vector<Token> tokenize(std::string_view text) {
  const std::u32string cps = unicode::to_utf32(text);
  std::vector<Token> tokens;
  std::size_t word_start = 0;
  bool in_word = false;

  auto emit = [&](std::size_t begin, std::size_t end, bool punct) {
    Token tok;
    tok.text = unicode::to_utf8(std::u32string_view(cps).substr(begin, end - begin));
    tok.normalized = normalize(tok.text);
    tok.start_char = begin;
    tok.end_char = end;
    tok.is_punct = punct;
    tokens.push_back(std::move(tok));
  };

  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t c = cps[i];
    if (unicode::is_whitespace(c)) {
      if (in_word) emit(word_start, i, false);
      in_word = false;
    } else if (unicode::is_punct(c)) {
      if (in_word) emit(word_start, i, false);
      in_word = false;
      emit(i, i + 1, true);
    } else if (!in_word) {
      in_word = true;
      word_start = i;
    }
  }
  if (in_word) emit(word_start, cps.size(), false);
  return tokens;
}

std::string normalize(std::string_view text) {
  return unicode::nfc(unicode::lowercase(text));
}

Sentence make_sentence(std::string_view text, Language language) {
  Sentence s;
  s.text = std::string(text);
  s.tokens = tokenize(text);
  s.language = language;
  return s;
}

std::vector<EntitySpan> decode_bio(std::span<const BioLabel> labels) {
  std::vector<EntitySpan> spans;
  std::optional<EntityType> open;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    const BioLabel label = labels[t];
    const auto type = entity_of(label);
    if (!type) {
      open.reset();
      continue;
    }
    if (is_inside(label) && open == type) {
      spans.back().end_tok = t;
      continue;
    }
    // B-X, or an orphan I-X promoted to B-X.
    EntitySpan span;
    span.type = *type;
    span.start_tok = t;
    span.end_tok = t;
    spans.push_back(span);
    open = type;
  }
  return spans;
}

void attach_offsets(EntitySpan& span, const Sentence& sentence) {
  if (span.end_tok >= sentence.tokens.size() || span.start_tok > span.end_tok) {
    throw Error(ErrorCode::kPositionOutOfRange, "span outside sentence");
  }
  span.start_char = sentence.tokens[span.start_tok].start_char;
  span.end_char = sentence.tokens[span.end_tok].end_char;
  span.surface = unicode::substr(sentence.text, span.start_char, span.end_char);
}

std::vector<EntitySpan> decode_bio(std::span<const BioLabel> labels,
                                   const Sentence& sentence) {
  if (labels.size() != sentence.tokens.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "label count differs from token count");
  }
  std::vector<EntitySpan> spans = decode_bio(labels);
  for (auto& span : spans) attach_offsets(span, sentence);
  return spans;
}

std::vector<BioLabel> encode_bio(std::span<const EntitySpan> spans,
                                 std::size_t length) {
  std::vector<BioLabel> labels(length, BioLabel::kO);
  std::vector<bool> covered(length, false);
  for (const auto& span : spans) {
    if (span.start_tok > span.end_tok || span.end_tok >= length) {
      throw Error(ErrorCode::kPositionOutOfRange,
                  "span [" + std::to_string(span.start_tok) + ", " +
                      std::to_string(span.end_tok) + "] outside length " +
                      std::to_string(length));
    }
    for (std::size_t t = span.start_tok; t <= span.end_tok; ++t) {
      if (covered[t]) {
        throw Error(ErrorCode::kOverlappingSpans,
                    "spans overlap at token " + std::to_string(t));
      }
      covered[t] = true;
      labels[t] = t == span.start_tok ? begin_label(span.type)
                                      : inside_label(span.type);
    }
  }
  return labels;
}

bool is_valid_bio(std::span<const BioLabel> labels) {
  std::optional<EntityType> prev;
  for (BioLabel label : labels) {
    if (is_inside(label) && prev != entity_of(label)) return false;
    prev = entity_of(label);
  }
  return true;
}

std::size_t repair_bio(std::vector<BioLabel>& labels) {
  std::size_t repairs = 0;
  std::optional<EntityType> prev;
  for (auto& label : labels) {
    if (is_inside(label) && prev != entity_of(label)) {
      label = begin_label(*entity_of(label));
      ++repairs;
    }
    prev = entity_of(label);
  }
  return repairs;
}

std::vector<std::pair<std::size_t, std::size_t>> sentence_bounds(
    std::span<const Token> tokens) {
  std::vector<std::pair<std::size_t, std::size_t>> bounds;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i].text;
    if (tokens[i].is_punct && (t == "." || t == "!" || t == "?")) {
      bounds.emplace_back(begin, i + 1);
      begin = i + 1;
    }
  }
  if (begin < tokens.size()) bounds.emplace_back(begin, tokens.size());
  return bounds;
}

}  // namespace wazobia
