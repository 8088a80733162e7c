#include <string>
#include <vector>

#include "doctest.h"
#include "wazobia/error.h"
#include "wazobia/rng.h"
#include "wazobia/text.h"
#include "wazobia/unicode.h"

using namespace wazobia;

namespace {

struct Expected {
  std::string text;
  std::size_t start, end;
  bool punct;
};

void check_tokens(const std::string& input, const std::vector<Expected>& want) {
  const auto tokens = tokenize(input);
  REQUIRE(tokens.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    CHECK(tokens[i].text == want[i].text);
    CHECK(tokens[i].start_char == want[i].start);
    CHECK(tokens[i].end_char == want[i].end);
    CHECK(tokens[i].is_punct == want[i].punct);
  }
}

EntitySpan span(EntityType type, std::size_t a, std::size_t b) {
  EntitySpan s;
  s.type = type;
  s.start_tok = a;
  s.end_tok = b;
  return s;
}

// A small alphabet that exercises ASCII, Yoruba/Igbo letters, combining
// marks, punctuation, symbols and several kinds of whitespace.
const std::vector<std::string> kPieces = {
    "a", "B", "z", "9", "é", "ọ", "Ṣ", "ị", "̀", "́", ".", ",", "!", "?", "'", "-",
    "$", "€", " ", "  ", "\t", "\n", " ", "　", "ń", "ẹ́", "日", "😀"};

std::string random_text(SplitMix64& rng) {
  std::string s;
  const std::size_t n = rng.uniform_below(25);
  for (std::size_t i = 0; i < n; ++i) s += kPieces[rng.uniform_below(kPieces.size())];
  return s;
}

}  // namespace

TEST_CASE("tokenize splits on whitespace and isolates punctuation") {
  check_tokens("Ngozi gara Abuja.",
               {{"Ngozi", 0, 5, false}, {"gara", 6, 10, false}, {"Abuja", 11, 16, false},
                {".", 16, 17, true}});
  check_tokens("Wa, zo bia",
               {{"Wa", 0, 2, false}, {",", 2, 3, true}, {"zo", 4, 6, false}, {"bia", 7, 10, false}});
  CHECK(tokenize("").empty());
  CHECK(tokenize("  \t\n").empty());
}

TEST_CASE("offsets count scalar values, not bytes") {
  const std::string text = "Adé lọ sí Èkó.";
  const auto tokens = tokenize(text);
  REQUIRE(tokens.size() == 5);
  CHECK(tokens[3].text == "Èkó");
  CHECK(tokens[3].start_char == 10);
  CHECK(tokens[3].end_char == 13);
}

TEST_CASE("token offsets reproduce the source on random Unicode text") {
  SplitMix64 rng(123);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::string text = random_text(rng);
    const auto tokens = tokenize(text);
    const std::u32string cps = unicode::to_utf32(text);
    std::vector<bool> covered(cps.size(), false);
    std::size_t prev_end = 0;
    for (const auto& t : tokens) {
      CHECK(t.end_char > t.start_char);
      CHECK(t.start_char >= prev_end);
      prev_end = t.end_char;
      CHECK(unicode::substr(text, t.start_char, t.end_char) == t.text);
      CHECK_FALSE(t.normalized.empty());
      for (std::size_t i = t.start_char; i < t.end_char; ++i) {
        CHECK_FALSE(unicode::is_whitespace(cps[i]));
        covered[i] = true;
      }
      if (t.is_punct) CHECK(t.end_char - t.start_char == 1);
    }
    for (std::size_t i = 0; i < cps.size(); ++i) {
      if (!unicode::is_whitespace(cps[i])) CHECK(covered[i]);
    }
  }
}

TEST_CASE("normalize lowercases and composes") {
  CHECK(normalize("LAGOS") == "lagos");
  CHECK(normalize("gara") == "gara");
  CHECK(normalize("Àbújá") == "àbújá");
  CHECK(normalize("Àbújá") == "àbújá");
  SplitMix64 rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    const std::string s = random_text(rng);
    CHECK(normalize(normalize(s)) == normalize(s));
  }
}

TEST_CASE("languages and labels parse strictly") {
  CHECK(parse_language("yoruba") == Language::kYoruba);
  CHECK(parse_language("hausa") == Language::kHausa);
  CHECK(parse_language("igbo") == Language::kIgbo);
  CHECK(parse_language("unknown") == Language::kUnknown);
  CHECK_THROWS_AS(parse_language("swahili"), Error);
  CHECK(parse_label("B-LOC") == BioLabel::kBLoc);
  CHECK_THROWS_AS(parse_label("B-DATE"), Error);
  for (int i = 0; i < kLabelCount; ++i) {
    CHECK(label_index(parse_label(label_name(label_from_index(i)))) == i);
  }
  CHECK(label_name(label_from_index(0)) == "O");
}

TEST_CASE("decode_bio examples") {
  using L = BioLabel;
  auto d = decode_bio(std::vector<L>{L::kBPer, L::kIPer, L::kO, L::kBLoc});
  REQUIRE(d.size() == 2);
  CHECK(d[0].type == EntityType::kPer);
  CHECK(d[0].start_tok == 0);
  CHECK(d[0].end_tok == 1);
  CHECK(d[1].type == EntityType::kLoc);
  CHECK(d[1].start_tok == 3);
  CHECK(d[1].end_tok == 3);

  CHECK(decode_bio(std::vector<L>{L::kO, L::kO, L::kO}).empty());

  d = decode_bio(std::vector<L>{L::kILoc, L::kIPer});
  REQUIRE(d.size() == 2);
  CHECK(d[0].type == EntityType::kLoc);
  CHECK(d[0].start_tok == 0);
  CHECK(d[0].end_tok == 0);
  CHECK(d[1].type == EntityType::kPer);
  CHECK(d[1].start_tok == 1);
  CHECK(d[1].end_tok == 1);
}

TEST_CASE("decode_bio with a sentence fills offsets and surface") {
  const Sentence s = make_sentence("Ngozi gara Abuja.", Language::kIgbo);
  using L = BioLabel;
  const auto spans = decode_bio(std::vector<L>{L::kBPer, L::kO, L::kBLoc, L::kO}, s);
  REQUIRE(spans.size() == 2);
  CHECK(spans[1].surface == "Abuja");
  CHECK(spans[1].start_char == 11);
  CHECK(spans[1].end_char == 16);
  CHECK_THROWS_AS(decode_bio(std::vector<L>{L::kO}, s), Error);
}

TEST_CASE("encode_bio examples and errors") {
  using L = BioLabel;
  CHECK(encode_bio(std::vector<EntitySpan>{span(EntityType::kPer, 0, 1)}, 3) ==
        std::vector<L>{L::kBPer, L::kIPer, L::kO});
  CHECK(encode_bio(std::vector<EntitySpan>{}, 2) == std::vector<L>{L::kO, L::kO});
  try {
    encode_bio(std::vector<EntitySpan>{span(EntityType::kPer, 0, 0), span(EntityType::kPer, 0, 0)}, 2);
    FAIL("expected OVERLAPPING_SPANS");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kOverlappingSpans);
  }
  try {
    encode_bio(std::vector<EntitySpan>{span(EntityType::kLoc, 1, 3)}, 3);
    FAIL("expected POSITION_OUT_OF_RANGE");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kPositionOutOfRange);
  }
}

TEST_CASE("BIO round trip and decode invariants on random sequences") {
  SplitMix64 rng(31);
  int valid_seen = 0;
  for (int trial = 0; trial < 5000; ++trial) {
    std::vector<BioLabel> labels(rng.uniform_below(12));
    for (auto& l : labels) l = label_from_index(static_cast<int>(rng.uniform_below(kLabelCount)));
    const auto spans = decode_bio(labels);
    for (std::size_t i = 0; i < spans.size(); ++i) {
      CHECK(spans[i].start_tok <= spans[i].end_tok);
      CHECK(spans[i].end_tok < labels.size());
      if (i > 0) CHECK(spans[i - 1].end_tok < spans[i].start_tok);
    }
    if (is_valid_bio(labels)) {
      ++valid_seen;
      CHECK(encode_bio(spans, labels.size()) == labels);
    } else {
      std::vector<BioLabel> repaired = labels;
      CHECK(repair_bio(repaired) > 0);
      CHECK(is_valid_bio(repaired));
      CHECK(decode_bio(repaired) == spans);
      CHECK(encode_bio(spans, labels.size()) == repaired);
    }
  }
  CHECK(valid_seen > 100);
}

TEST_CASE("sentence bounds end after final punctuation") {
  const auto tokens = tokenize("Musa ya tafi Kano. Aisha ta dawo! Ok");
  const auto bounds = sentence_bounds(tokens);
  REQUIRE(bounds.size() == 3);
  CHECK(bounds[0] == std::pair<std::size_t, std::size_t>{0, 5});
  CHECK(bounds[1] == std::pair<std::size_t, std::size_t>{5, 9});
  CHECK(bounds[2] == std::pair<std::size_t, std::size_t>{9, 10});
  CHECK(sentence_bounds(std::vector<Token>{}).empty());
}
