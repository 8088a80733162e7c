#include "wazobia/tagger.h"

#include "wazobia/error.h"
#include "wazobia/postprocess.h"

namespace wazobia {

ModelType parse_model_type(std::string_view name) {
  if (name == "crf") return ModelType::kCrf;
  if (name == "bilstm") return ModelType::kBilstm;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown model type '" + std::string(name) + "'");
}

std::string_view model_type_name(ModelType type) {
  return type == ModelType::kCrf ? "crf" : "bilstm";
}

CrfTagger::CrfTagger(crf::CrfParams params, FeatureVocab vocab, Gazetteer gazetteer,
                     bool hard_bio_constraints)
    : params_(std::move(params)),
      vocab_(std::move(vocab)),
      gazetteer_(std::move(gazetteer)),
      hard_bio_constraints_(hard_bio_constraints) {
  if (params_.feature_count() != vocab_.size() || params_.label_count() != kLabelCount) {
    throw Error(ErrorCode::kInvalidArgument, "CRF weights do not match vocabulary");
  }
}

std::vector<BioLabel> CrfTagger::predict(const Sentence& sentence) const {
  const auto features = featurize(sentence, vocab_, gazetteer_);
  return crf::decode(params_, features, hard_bio_constraints_);
}

BilstmTagger::BilstmTagger(bilstm::BilstmParams params, bilstm::WordVocab vocab,
                           Gazetteer gazetteer)
    : params_(std::move(params)),
      vocab_(std::move(vocab)),
      gazetteer_(std::move(gazetteer)) {
  params_.check_shapes();
  if (params_.vocab_size() != vocab_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "embedding rows do not match vocabulary");
  }
}

std::vector<BioLabel> BilstmTagger::predict(const Sentence& sentence) const {
  const auto words = bilstm::word_indices(sentence, vocab_);
  return bilstm::predict(params_, words);
}

std::vector<BioLabel> predict_labels(const Tagger& tagger, const Sentence& sentence) {
  if (sentence.tokens.empty()) return {};
  std::vector<BioLabel> labels = tagger.predict(sentence);
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (sentence.tokens[t].is_punct) labels[t] = BioLabel::kO;
  }
  repair_bio(labels);
  return labels;
}

TagResult tag_text(const Tagger& tagger, std::string_view text, Language language,
                   bool postprocess) {
  TagResult result;
  result.tokens = tokenize(text);
  const std::string source(text);
  for (const auto& [begin, end] : sentence_bounds(result.tokens)) {
    Sentence s;
    s.text = source;
    s.language = language;
    s.tokens.assign(result.tokens.begin() + static_cast<long>(begin),
                    result.tokens.begin() + static_cast<long>(end));
    const auto labels = predict_labels(tagger, s);
    std::vector<EntitySpan> spans = decode_bio(labels, s);
    if (postprocess) spans = disambiguate(spans, s, tagger.gazetteer());
    for (auto& span : spans) {
      span.start_tok += begin;
      span.end_tok += begin;
      result.entities.push_back(std::move(span));
    }
  }
  return result;
}

Evaluation evaluate_tagger(const Tagger& tagger,
                           std::span<const LabeledSentence> corpus) {
  std::vector<std::vector<BioLabel>> gold, pred;
  gold.reserve(corpus.size());
  pred.reserve(corpus.size());
  for (const auto& ls : corpus) {
    gold.push_back(ls.labels);
    pred.push_back(predict_labels(tagger, ls.sentence));
  }
  return evaluate(gold, pred);
}

}  // namespace wazobia
