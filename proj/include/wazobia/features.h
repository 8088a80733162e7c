#ifndef WAZOBIA_FEATURES_H_
#define WAZOBIA_FEATURES_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wazobia/gazetteer.h"
#include "wazobia/text.h"

namespace wazobia {

// Sorted, distinct feature indices. All features are binary.
using FeatureVector = std::vector<std::uint32_t>;

// Templates fired at one position, in this order:
//
//   w[-2] w[-1] w[0] w[+1] w[+2]   normalized words; out-of-range -> <BOS>/<EOS>
//   pre1..pre3 suf1..suf3          of the normalized current token
//   shape=...                      see word_shape()
//   punct=0|1
//   BOS / EOS                      at the first / last position
//   pos[-1] pos[0] pos[+1]         only when the sentence carries POS tags
//   gaz=PER gaz=ORG gaz=LOC        when the token occurs in that gazetteer
//
// The word window skips punctuation tokens: w[+1] of a word is the next
// non-punctuation token.
std::vector<std::string> extract(const Sentence& sentence, std::size_t position,
                                 const Gazetteer& gazetteer);

// X upper, x lower, 9 digit, ´ combining mark (on the decomposed form),
// # anything else; runs longer than 4 are cut to 4 followed by '+'.
std::string word_shape(std::string_view text);

class FeatureVocab {
 public:
  FeatureVocab() = default;

  // Index of `feature`, adding it if the vocabulary is still open.
  std::optional<std::uint32_t> add(const std::string& feature);
  std::optional<std::uint32_t> find(const std::string& feature) const;

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }
  std::size_t size() const { return names_.size(); }
  const std::string& name(std::uint32_t index) const { return names_[index]; }
  const std::vector<std::string>& names() const { return names_; }

  // Rebuilds a frozen vocabulary whose index i is names[i].
  static FeatureVocab from_names(std::vector<std::string> names);

 private:
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::string> names_;
  bool frozen_ = false;
};

// Every feature emitted over the corpus, indexed in first-seen order, kept if
// it fires at least `min_freq` times. Returned frozen. Throws EMPTY_CORPUS.
FeatureVocab build_vocab(std::span<const Sentence> corpus,
                         const Gazetteer& gazetteer, std::size_t min_freq = 1);

// Unknown strings are dropped; output is sorted and deduplicated.
FeatureVector vectorize(std::span<const std::string> features,
                        const FeatureVocab& vocab);

// vectorize(extract(s, t)) for every position of s.
std::vector<FeatureVector> featurize(const Sentence& sentence,
                                     const FeatureVocab& vocab,
                                     const Gazetteer& gazetteer);

}  // namespace wazobia

#endif  // WAZOBIA_FEATURES_H_
