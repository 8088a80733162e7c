#include <algorithm>
#include <set>

#include "doctest.h"
#include "wazobia/corpus.h"
#include "wazobia/error.h"
#include "wazobia/features.h"
#include "wazobia/rng.h"

using namespace wazobia;

namespace {

bool has(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

Sentence words(std::vector<std::string> toks) {
  return sentence_from_tokens(toks, Language::kUnknown);
}

}  // namespace

TEST_CASE("extract fires the documented templates") {
  const Sentence s = words({"Ngozi", "gara", "Abuja"});
  const auto f = extract(s, 0, Gazetteer{});
  for (const char* want : {"w[0]=ngozi", "w[+1]=gara", "w[+2]=abuja", "w[-1]=<BOS>", "w[-2]=<BOS>",
                           "suf3=ozi", "pre1=n", "shape=Xxxxx", "BOS", "punct=0"}) {
    INFO(want);
    CHECK(has(f, want));
  }
  CHECK_FALSE(has(f, "EOS"));
  CHECK(std::none_of(f.begin(), f.end(), [](const std::string& x) { return x.rfind("pos", 0) == 0; }));
}

TEST_CASE("single token sees both boundaries") {
  const auto f = extract(words({"Eko"}), 0, Gazetteer{});
  CHECK(has(f, "BOS"));
  CHECK(has(f, "EOS"));
}

TEST_CASE("gazetteer membership feature") {
  const Gazetteer g = Gazetteer::parse("LOC\tabuja\n");
  CHECK(has(extract(words({"Abuja"}), 0, g), "gaz=LOC"));
  CHECK_FALSE(has(extract(words({"Kano"}), 0, g), "gaz=LOC"));
}

TEST_CASE("window skips punctuation and POS features appear when tagged") {
  Sentence s = make_sentence("Musa , Kano", Language::kHausa);
  s.pos_tags = std::vector<std::string>{"NNP", "PUNCT", "NNP"};
  const auto f = extract(s, 0, Gazetteer{});
  CHECK(has(f, "w[+1]=kano"));
  CHECK(has(f, "pos[0]=NNP"));
  CHECK(has(f, "pos[+1]=PUNCT"));
  CHECK(has(f, "pos[-1]=<BOS>"));
  CHECK(has(extract(s, 1, Gazetteer{}), "punct=1"));
}

TEST_CASE("extract is deterministic and checks position") {
  const Sentence s = words({"a", "b"});
  CHECK(extract(s, 1, Gazetteer{}) == extract(s, 1, Gazetteer{}));
  try {
    extract(s, 2, Gazetteer{});
    FAIL("expected POSITION_OUT_OF_RANGE");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kPositionOutOfRange);
  }
}

TEST_CASE("word shapes") {
  CHECK(word_shape("Ngozi") == "Xxxxx");
  CHECK(word_shape("Abubakar") == "Xxxxx+");
  CHECK(word_shape("INEC") == "XXXX");
  CHECK(word_shape("2024") == "9999");
  CHECK(word_shape("Àbújá") == "X´xx´xx´");
  CHECK(word_shape(".") == "#");
}

TEST_CASE("build_vocab counts distinct strings") {
  const Sentence one = words({"Eko"});
  const std::vector<Sentence> c1{one};
  const FeatureVocab v1 = build_vocab(c1, Gazetteer{});
  const auto fired = extract(one, 0, Gazetteer{});
  CHECK(v1.size() == std::set<std::string>(fired.begin(), fired.end()).size());
  CHECK(v1.frozen());

  const std::vector<Sentence> twice{one, one};
  CHECK(build_vocab(twice, Gazetteer{}).size() == v1.size());

  // Hand enumeration for two one-token sentences with disjoint words but the
  // same shape: "Eko" fires 5 window + 3 prefix + 3 suffix + shape + punct +
  // BOS + EOS = 15 strings; "Ada" fires the same 15 templates, of which
  // w[-2], w[-1], w[+1], w[+2] (all boundary markers), shape=Xxx, punct=0,
  // BOS and EOS are shared: 15 + 15 - 8 = 22.
  const std::vector<Sentence> two{one, words({"Ada"})};
  CHECK(v1.size() == 15);
  CHECK(build_vocab(two, Gazetteer{}).size() == 22);

  CHECK_THROWS_AS(build_vocab(std::vector<Sentence>{}, Gazetteer{}), Error);
}

TEST_CASE("vectorize drops unknowns, sorts and dedups") {
  const std::vector<Sentence> c{words({"Musa", "ya", "tafi", "Kano"})};
  const FeatureVocab v = build_vocab(c, Gazetteer{});
  const std::vector<std::string> known{"w[0]=kano", "BOS", "w[0]=musa"};
  const FeatureVector fv = vectorize(known, v);
  CHECK(fv.size() == 3);
  CHECK(std::is_sorted(fv.begin(), fv.end()));
  CHECK(vectorize(std::vector<std::string>{"nope", "w[0]=lagos"}, v).empty());
  const std::vector<std::string> mixed{"BOS", "unknown", "BOS", "w[0]=kano"};
  const FeatureVector m = vectorize(mixed, v);
  CHECK(m.size() == 2);
  CHECK(m[0] < m[1]);
}

TEST_CASE("vocabulary closure and frozen size") {
  const auto corpus = read_corpus(WAZOBIA_DATA_DIR_PATH "/mini_corpus.tsv");
  const auto sentences = sentences_of(corpus.sentences);
  const Gazetteer g = Gazetteer::load(WAZOBIA_DATA_DIR_PATH "/gazetteer.tsv");
  FeatureVocab v = build_vocab(sentences, g);
  const std::size_t f = v.size();
  for (const auto& s : sentences) {
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      const auto strings = extract(s, i, g);
      const std::set<std::string> distinct(strings.begin(), strings.end());
      CHECK(vectorize(strings, v).size() == distinct.size());
    }
  }
  SplitMix64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const std::vector<std::string> junk{"w[0]=" + std::to_string(rng.next()), "BOS"};
    vectorize(junk, v);
    CHECK(!v.find(junk[0]).has_value());
  }
  CHECK(v.size() == f);
  v.add("brand-new");
  CHECK(v.size() == f);
}
