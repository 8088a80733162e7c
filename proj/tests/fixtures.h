#ifndef WAZOBIA_TESTS_FIXTURES_H_
#define WAZOBIA_TESTS_FIXTURES_H_

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "wazobia/corpus.h"
#include "wazobia/gazetteer.h"
#include "wazobia/model_file.h"
#include "wazobia/rng.h"
#include "wazobia/store.h"
#include "wazobia/tagger.h"
#include "wazobia/train_config.h"

namespace wazobia::testing {

inline std::filesystem::path data_path(const char* name) {
  return std::filesystem::path(WAZOBIA_DATA_DIR_PATH) / name;
}

inline const std::vector<LabeledSentence>& mini_corpus() {
  static const std::vector<LabeledSentence> corpus =
      read_corpus(data_path("mini_corpus.tsv")).sentences;
  return corpus;
}

inline const Gazetteer& bundled_gazetteer() {
  static const Gazetteer g = Gazetteer::load(data_path("gazetteer.tsv"));
  return g;
}

inline ModelFile train_model(ModelType type, int epochs, bool hard = false) {
  TrainConfig config =
      type == ModelType::kCrf ? TrainConfig::crf_defaults() : TrainConfig::bilstm_defaults();
  config.epochs = epochs;
  const auto parts = split(mini_corpus(), SplitSpec{});
  ModelFile m;
  m.model_type = type;
  m.languages = {Language::kHausa, Language::kIgbo, Language::kYoruba};
  m.created_at = utc_timestamp();
  m.config = config;
  if (type == ModelType::kCrf) {
    FeatureVocab vocab = build_vocab(sentences_of(parts.train), bundled_gazetteer());
    auto r = crf::train(parts.train, parts.val, config, vocab, bundled_gazetteer());
    m.tagger = std::make_shared<CrfTagger>(std::move(r.params), std::move(vocab),
                                           bundled_gazetteer(), hard);
  } else {
    bilstm::WordVocab vocab = bilstm::build_word_vocab(parts.train);
    auto r = bilstm::train(parts.train, parts.val, config, vocab);
    m.tagger = std::make_shared<BilstmTagger>(std::move(r.params), std::move(vocab),
                                              bundled_gazetteer());
  }
  return m;
}

// Sentences mixing corpus words, unseen words and punctuation.
inline std::vector<std::string> random_texts(std::size_t count, std::uint64_t seed) {
  std::vector<std::string> words;
  for (const auto& ls : mini_corpus()) {
    for (const auto& t : ls.sentence.tokens) words.push_back(t.text);
  }
  const std::vector<std::string> extra = {"Zugu", "ọ̀rẹ́", "xyz", ",", "!", "Lagos", "2024"};
  words.insert(words.end(), extra.begin(), extra.end());
  SplitMix64 rng(seed);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::string s;
    const std::size_t n = 1 + rng.uniform_below(12);
    for (std::size_t k = 0; k < n; ++k) {
      if (k) s += ' ';
      s += words[rng.uniform_below(words.size())];
    }
    out.push_back(s);
  }
  return out;
}

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() : path_(std::filesystem::temp_directory_path() / ("wazobia-" + new_uuid())) {
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary | std::ios::trunc) << content;
}

}  // namespace wazobia::testing

#endif  // WAZOBIA_TESTS_FIXTURES_H_
