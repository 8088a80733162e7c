#include "wazobia/postprocess.h"

#include <algorithm>
#include <array>
#include <optional>

#include "wazobia/unicode.h"

namespace wazobia {
namespace {

// Dotted letters used in Yoruba and Igbo orthography. Applied to the
// composed form before decomposition so that, e.g., U+1EB9 and
// U+0065 U+0323 fold identically.
constexpr std::array<std::pair<char32_t, char32_t>, 12> kDottedLetterMap = {{
    {U'ẹ', U'e'}, {U'Ẹ', U'E'},  // ẹ Ẹ
    {U'ọ', U'o'}, {U'Ọ', U'O'},  // ọ Ọ
    {U'ṣ', U's'}, {U'Ṣ', U'S'},  // ṣ Ṣ
    {U'ị', U'i'}, {U'Ị', U'I'},  // ị Ị
    {U'ụ', U'u'}, {U'Ụ', U'U'},  // ụ Ụ
    {U'ṅ', U'n'}, {U'Ṅ', U'N'},  // ṅ Ṅ
}};

struct Candidate {
  EntitySpan span;
  bool widened = false;
};

bool overlaps(const EntitySpan& a, const EntitySpan& b) {
  return a.start_tok <= b.end_tok && b.start_tok <= a.end_tok;
}

bool contains(const EntitySpan& outer, const EntitySpan& inner) {
  return outer.start_tok <= inner.start_tok && inner.end_tok <= outer.end_tok;
}

std::size_t length(const EntitySpan& s) { return s.end_tok - s.start_tok + 1; }

}  // namespace

std::string fold_diacritics(std::string_view text) {
  std::u32string cps = unicode::to_utf32(unicode::nfc(text));
  for (auto& c : cps) {
    for (const auto& [from, to] : kDottedLetterMap) {
      if (c == from) {
        c = to;
        break;
      }
    }
  }
  const std::string lowered = unicode::lowercase(unicode::to_utf8(cps));
  std::u32string out;
  for (char32_t c : unicode::to_utf32(unicode::nfd(lowered))) {
    if (!unicode::is_combining_mark(c)) out.push_back(c);
  }
  return unicode::nfc(unicode::to_utf8(out));
}

std::vector<EntitySpan> disambiguate(std::span<const EntitySpan> spans,
                                     const Sentence& sentence,
                                     const Gazetteer& gazetteer) {
  std::vector<EntitySpan> input(spans.begin(), spans.end());
  if (gazetteer.empty()) return input;

  const std::span<const Token> tokens(sentence.tokens);
  auto match = [&](std::size_t begin, std::size_t end_inclusive) {
    return gazetteer.match(tokens.subspan(begin, end_inclusive - begin + 1));
  };

  std::vector<bool> matched(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    matched[i] = !match(input[i].start_tok, input[i].end_tok).empty();
  }

  std::vector<Candidate> candidates;
  const std::size_t n = tokens.size();
  const std::size_t max_len = std::min(gazetteer.max_phrase_len(), n);

  for (std::size_t i = 0; i < input.size(); ++i) {
    const EntitySpan& s = input[i];
    // Longest gazetteer occurrence strictly containing s; ties to leftmost.
    std::optional<EntitySpan> best;
    for (std::size_t len = max_len; len > length(s) && !best; --len) {
      const std::size_t lo = s.end_tok + 1 >= len ? s.end_tok + 1 - len : 0;
      for (std::size_t begin = lo; begin <= s.start_tok && begin + len <= n;
           ++begin) {
        TypeSet types = match(begin, begin + len - 1);
        if (types.empty()) continue;
        EntitySpan w;
        w.type = types.first();
        w.start_tok = begin;
        w.end_tok = begin + len - 1;
        best = w;
        break;
      }
    }
    if (!best) continue;
    // A widening may not cut through a gazetteer-matched span it does not
    // fully cover.
    bool blocked = false;
    for (std::size_t j = 0; j < input.size(); ++j) {
      if (matched[j] && overlaps(*best, input[j]) && !contains(*best, input[j])) {
        blocked = true;
        break;
      }
    }
    if (!blocked) candidates.push_back({*best, true});
  }

  for (std::size_t i = 0; i < input.size(); ++i) {
    EntitySpan s = input[i];
    TypeSet types = match(s.start_tok, s.end_tok);
    if (types.size() == 1 && !types.contains(s.type)) s.type = types.first();
    candidates.push_back({s, false});
  }

  // Longest first, then leftmost; widened before original at equal extent.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     if (length(a.span) != length(b.span)) {
                       return length(a.span) > length(b.span);
                     }
                     if (a.span.start_tok != b.span.start_tok) {
                       return a.span.start_tok < b.span.start_tok;
                     }
                     return a.widened && !b.widened;
                   });

  std::vector<EntitySpan> out;
  for (const auto& c : candidates) {
    bool clash = false;
    for (const auto& kept : out) {
      if (overlaps(kept, c.span)) {
        clash = true;
        break;
      }
    }
    if (!clash) out.push_back(c.span);
  }
  std::sort(out.begin(), out.end(), [](const EntitySpan& a, const EntitySpan& b) {
    return a.start_tok < b.start_tok;
  });
  for (auto& s : out) {
    if (s.end_tok < n) attach_offsets(s, sentence);
  }
  return out;
}

}  // namespace wazobia
