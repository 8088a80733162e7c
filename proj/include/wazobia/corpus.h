#ifndef WAZOBIA_CORPUS_H_
#define WAZOBIA_CORPUS_H_

// Annotated corpus files.
//
//   # language: yoruba
//   Adé<TAB>B-PER
//   lọ<TAB>O
//   ...
//   <blank line between sentences>
//
// Each token line is `token<TAB>tag` or `token<TAB>pos<TAB>tag`. A
// `# language: xx` comment applies to every following sentence; other '#'
// lines are ignored. Files are UTF-8 with LF endings and no BOM.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wazobia/text.h"

namespace wazobia {

struct LabeledSentence {
  Sentence sentence;
  std::vector<BioLabel> labels;
  std::string source_id;

  bool operator==(const LabeledSentence&) const = default;
};

struct CorpusReadResult {
  std::vector<LabeledSentence> sentences;
  // Orphan I-X tags rewritten to B-X.
  std::size_t repair_warnings = 0;
};

// Throws BAD_TAG / BAD_LINE (with line number), EMPTY_FILE, FILE_NOT_FOUND.
// `source_prefix` names sentences "<prefix>:<ordinal>".
CorpusReadResult parse_corpus(std::string_view content,
                              std::string_view source_prefix = "corpus");
CorpusReadResult read_corpus(const std::filesystem::path& path);

std::string format_corpus(std::span<const LabeledSentence> sentences);
void write_corpus(std::span<const LabeledSentence> sentences,
                  const std::filesystem::path& path);

// Builds a sentence whose text is the tokens joined by single spaces.
Sentence sentence_from_tokens(std::span<const std::string> tokens,
                              Language language);

struct SplitSpec {
  double train_frac = 0.8;
  double val_frac = 0.1;
  double test_frac = 0.1;
  std::uint64_t seed = 42;
};

struct CorpusSplit {
  std::vector<LabeledSentence> train;
  std::vector<LabeledSentence> val;
  std::vector<LabeledSentence> test;
};

// Seeded shuffle, then n_train = floor(0.8 n), n_val = floor(0.1 n), the
// rest is test. Throws CORPUS_TOO_SMALL when n < 3.
CorpusSplit split(std::span<const LabeledSentence> corpus, const SplitSpec& spec);

// Sizes the floor rule produces for n items.
struct SplitSizes {
  std::size_t train, val, test;
};
SplitSizes split_sizes(std::size_t n, const SplitSpec& spec);

std::vector<Sentence> sentences_of(std::span<const LabeledSentence> corpus);

}  // namespace wazobia

#endif  // WAZOBIA_CORPUS_H_
