#ifndef WAZOBIA_TAGGER_H_
#define WAZOBIA_TAGGER_H_

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wazobia/bilstm.h"
#include "wazobia/corpus.h"
#include "wazobia/crf.h"
#include "wazobia/features.h"
#include "wazobia/gazetteer.h"
#include "wazobia/metrics.h"
#include "wazobia/text.h"

namespace wazobia {

enum class ModelType { kCrf, kBilstm };

ModelType parse_model_type(std::string_view name);
std::string_view model_type_name(ModelType type);

// A trained sequence labeler. Implementations are immutable after
// construction and safe to share between threads.
class Tagger {
 public:
  virtual ~Tagger() = default;

  virtual ModelType type() const = 0;
  // Raw model labels, one per token.
  virtual std::vector<BioLabel> predict(const Sentence& sentence) const = 0;
  virtual const Gazetteer& gazetteer() const = 0;
};

class CrfTagger final : public Tagger {
 public:
  CrfTagger(crf::CrfParams params, FeatureVocab vocab, Gazetteer gazetteer,
            bool hard_bio_constraints = false);

  ModelType type() const override { return ModelType::kCrf; }
  std::vector<BioLabel> predict(const Sentence& sentence) const override;
  const Gazetteer& gazetteer() const override { return gazetteer_; }

  const crf::CrfParams& params() const { return params_; }
  const FeatureVocab& vocab() const { return vocab_; }
  bool hard_bio_constraints() const { return hard_bio_constraints_; }

 private:
  crf::CrfParams params_;
  FeatureVocab vocab_;
  Gazetteer gazetteer_;
  bool hard_bio_constraints_;
};

class BilstmTagger final : public Tagger {
 public:
  BilstmTagger(bilstm::BilstmParams params, bilstm::WordVocab vocab,
               Gazetteer gazetteer);

  ModelType type() const override { return ModelType::kBilstm; }
  std::vector<BioLabel> predict(const Sentence& sentence) const override;
  const Gazetteer& gazetteer() const override { return gazetteer_; }

  const bilstm::BilstmParams& params() const { return params_; }
  const bilstm::WordVocab& vocab() const { return vocab_; }

 private:
  bilstm::BilstmParams params_;
  bilstm::WordVocab vocab_;
  Gazetteer gazetteer_;
};

// Model labels with punctuation forced to O and orphan I-X repaired, so
// entity spans never contain punctuation.
std::vector<BioLabel> predict_labels(const Tagger& tagger, const Sentence& sentence);

struct TagResult {
  std::vector<Token> tokens;
  // Token indices and char offsets refer to the whole input text.
  std::vector<EntitySpan> entities;
};

// Tokenize, split at sentence-final punctuation, label each sentence, decode
// spans and, when `postprocess` is set, apply gazetteer disambiguation.
TagResult tag_text(const Tagger& tagger, std::string_view text, Language language,
                   bool postprocess = true);

// Scores predict_labels() output against gold labels.
Evaluation evaluate_tagger(const Tagger& tagger,
                           std::span<const LabeledSentence> corpus);

}  // namespace wazobia

#endif  // WAZOBIA_TAGGER_H_
