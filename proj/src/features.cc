#include "wazobia/features.h"

#include <algorithm>
#include <map>

#include "wazobia/error.h"
#include "wazobia/unicode.h"

namespace wazobia {
namespace {

const std::string kBos = "<BOS>";
const std::string kEos = "<EOS>";

std::string offset_name(int k) {
  if (k > 0) return "[+" + std::to_string(k) + "]";
  return "[" + std::to_string(k) + "]";
}

// Normalized word `k` non-punctuation steps away from `position`.
const std::string& window_word(const Sentence& s, std::size_t position, int k) {
  if (k == 0) return s.tokens[position].normalized;
  const int step = k > 0 ? 1 : -1;
  long t = static_cast<long>(position);
  int remaining = k > 0 ? k : -k;
  while (remaining > 0) {
    t += step;
    if (t < 0) return kBos;
    if (t >= static_cast<long>(s.tokens.size())) return kEos;
    if (!s.tokens[static_cast<std::size_t>(t)].is_punct) --remaining;
  }
  return s.tokens[static_cast<std::size_t>(t)].normalized;
}

}  // namespace

std::string word_shape(std::string_view text) {
  std::u32string out;
  char32_t prev = 0;
  int run = 0;
  for (char32_t c : unicode::to_utf32(unicode::nfd(text))) {
    char32_t cls;
    if (unicode::is_combining_mark(c)) {
      cls = U'´';
    } else if (unicode::is_upper(c)) {
      cls = U'X';
    } else if (unicode::is_lower(c)) {
      cls = U'x';
    } else if (unicode::is_digit(c)) {
      cls = U'9';
    } else {
      cls = U'#';
    }
    if (cls == prev) {
      ++run;
    } else {
      prev = cls;
      run = 1;
    }
    if (run <= 4) {
      out.push_back(cls);
    } else if (run == 5) {
      out.push_back(U'+');
    }
  }
  return unicode::to_utf8(out);
}

std::vector<std::string> extract(const Sentence& sentence, std::size_t position,
                                 const Gazetteer& gazetteer) {
  const std::size_t n = sentence.tokens.size();
  if (position >= n) {
    throw Error(ErrorCode::kPositionOutOfRange,
                "position " + std::to_string(position) + " outside sentence of " +
                    std::to_string(n) + " tokens");
  }
  const Token& tok = sentence.tokens[position];
  std::vector<std::string> f;
  f.reserve(24);

  for (int k = -2; k <= 2; ++k) {
    f.push_back("w" + offset_name(k) + "=" + window_word(sentence, position, k));
  }

  const std::u32string cps = unicode::to_utf32(tok.normalized);
  for (std::size_t len = 1; len <= 3 && len <= cps.size(); ++len) {
    f.push_back("pre" + std::to_string(len) + "=" +
                unicode::to_utf8(std::u32string_view(cps).substr(0, len)));
  }
  for (std::size_t len = 1; len <= 3 && len <= cps.size(); ++len) {
    f.push_back("suf" + std::to_string(len) + "=" +
                unicode::to_utf8(std::u32string_view(cps).substr(cps.size() - len)));
  }

  f.push_back("shape=" + word_shape(tok.text));
  f.push_back(tok.is_punct ? "punct=1" : "punct=0");
  if (position == 0) f.push_back("BOS");
  if (position + 1 == n) f.push_back("EOS");

  if (sentence.pos_tags) {
    const auto& pos = *sentence.pos_tags;
    for (int k = -1; k <= 1; ++k) {
      const long t = static_cast<long>(position) + k;
      std::string tag = t < 0 ? kBos
                        : t >= static_cast<long>(n)
                            ? kEos
                            : pos[static_cast<std::size_t>(t)];
      f.push_back("pos" + offset_name(k) + "=" + tag);
    }
  }

  const TypeSet gaz = gazetteer.token_types(tok);
  for (auto type : kEntityTypes) {
    if (gaz.contains(type)) f.push_back("gaz=" + std::string(entity_type_name(type)));
  }
  return f;
}

std::optional<std::uint32_t> FeatureVocab::add(const std::string& feature) {
  if (auto it = index_.find(feature); it != index_.end()) return it->second;
  if (frozen_) return std::nullopt;
  const auto idx = static_cast<std::uint32_t>(names_.size());
  index_.emplace(feature, idx);
  names_.push_back(feature);
  return idx;
}

std::optional<std::uint32_t> FeatureVocab::find(const std::string& feature) const {
  if (auto it = index_.find(feature); it != index_.end()) return it->second;
  return std::nullopt;
}

FeatureVocab FeatureVocab::from_names(std::vector<std::string> names) {
  FeatureVocab v;
  for (auto& name : names) {
    if (v.index_.contains(name)) {
      throw Error(ErrorCode::kCorruptFile, "duplicate feature name '" + name + "'");
    }
    v.add(name);
  }
  v.freeze();
  return v;
}

FeatureVocab build_vocab(std::span<const Sentence> corpus,
                         const Gazetteer& gazetteer, std::size_t min_freq) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "corpus is empty");
  std::vector<std::string> order;
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& s : corpus) {
    for (std::size_t t = 0; t < s.tokens.size(); ++t) {
      for (auto& feat : extract(s, t, gazetteer)) {
        auto [it, inserted] = counts.try_emplace(feat, 0);
        if (inserted) order.push_back(feat);
        ++it->second;
      }
    }
  }
  FeatureVocab vocab;
  for (const auto& feat : order) {
    if (counts[feat] >= min_freq) vocab.add(feat);
  }
  vocab.freeze();
  return vocab;
}

FeatureVector vectorize(std::span<const std::string> features,
                        const FeatureVocab& vocab) {
  FeatureVector out;
  out.reserve(features.size());
  for (const auto& f : features) {
    if (auto idx = vocab.find(f)) out.push_back(*idx);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<FeatureVector> featurize(const Sentence& sentence,
                                     const FeatureVocab& vocab,
                                     const Gazetteer& gazetteer) {
  std::vector<FeatureVector> out;
  out.reserve(sentence.tokens.size());
  for (std::size_t t = 0; t < sentence.tokens.size(); ++t) {
    const auto strings = extract(sentence, t, gazetteer);
    out.push_back(vectorize(strings, vocab));
  }
  return out;
}

}  // namespace wazobia
