#include "wazobia/training.h"

#include <algorithm>

#include "wazobia/bilstm.h"
#include "wazobia/corpus.h"
#include "wazobia/crf.h"
#include "wazobia/error.h"
#include "wazobia/features.h"
#include "wazobia/gazetteer.h"
#include "wazobia/model_file.h"

namespace wazobia {
namespace {

std::vector<Language> languages_in(std::span<const LabeledSentence> corpus) {
  std::vector<Language> out;
  for (const auto& ls : corpus) {
    const Language lang = ls.sentence.language;
    if (std::find(out.begin(), out.end(), lang) == out.end()) out.push_back(lang);
  }
  return out;
}

}  // namespace

RunRecord begin_run(Store& store, const TrainingRequest& request) {
  RunRecord record;
  record.run_id = new_uuid();
  record.model_type = request.model_type;
  record.config = request.config;
  record.status = RunStatus::kRunning;
  record.created_at = utc_timestamp();
  try {
    record.corpus_fingerprint = file_fingerprint(request.corpus_path);
  } catch (const Error&) {
    // Left empty; execute_training reports the unreadable corpus.
  }
  store.put_run(record);
  return record;
}

RunRecord execute_training(Store& store, const TrainingRequest& request,
                           RunRecord record, const EpochCallback& on_epoch) {
  try {
    if (request.config.epochs < 1) {
      throw Error(ErrorCode::kInvalidArgument, "epochs must be at least 1");
    }
    const CorpusReadResult corpus = read_corpus(request.corpus_path);
    if (corpus.sentences.empty()) throw Error(ErrorCode::kEmptyCorpus, "corpus has no sentences");
    SplitSpec spec;
    spec.seed = request.config.seed;
    const CorpusSplit parts = split(corpus.sentences, spec);
    record.languages = languages_in(corpus.sentences);
    store.put_run(record);

    const Gazetteer gazetteer =
        request.gazetteer_path ? Gazetteer::load(*request.gazetteer_path) : Gazetteer{};

    auto record_epoch = [&](const RunEpoch& row) {
      record.history.push_back(row);
      store.put_run(record);
      if (on_epoch) on_epoch(row);
    };

    std::shared_ptr<const Tagger> tagger;
    if (request.model_type == ModelType::kCrf) {
      const std::vector<Sentence> train_sentences = sentences_of(parts.train);
      FeatureVocab vocab =
          build_vocab(train_sentences, gazetteer, request.config.min_feat_freq);
      crf::TrainResult result =
          crf::train(parts.train, parts.val, request.config, vocab, gazetteer, record_epoch);
      tagger = std::make_shared<CrfTagger>(std::move(result.params), std::move(vocab),
                                           gazetteer, request.hard_bio_constraints);
    } else {
      std::optional<bilstm::Embeddings> pretrained;
      if (request.embeddings_path) pretrained = bilstm::load_embeddings(*request.embeddings_path);
      bilstm::WordVocab vocab = bilstm::build_word_vocab(parts.train);
      bilstm::TrainResult result =
          bilstm::train(parts.train, parts.val, request.config, vocab,
                        pretrained ? &*pretrained : nullptr, record_epoch);
      tagger = std::make_shared<BilstmTagger>(std::move(result.params), std::move(vocab),
                                              gazetteer);
    }

    record.train_scores = EvalSummary::from(evaluate_tagger(*tagger, parts.train));
    record.test_scores = EvalSummary::from(evaluate_tagger(*tagger, parts.test));

    ModelFile model;
    model.model_type = request.model_type;
    model.languages = record.languages;
    model.created_at = utc_timestamp();
    model.config = request.config;
    model.tagger = std::move(tagger);
    store.put_model(record.run_id, model);

    record.status = RunStatus::kDone;
    store.put_run(record);
  } catch (const Error& e) {
    record.status = RunStatus::kFailed;
    record.error_code = std::string(e.code_name());
    record.error_message = e.what();
    store.put_run(record);
  } catch (const std::exception& e) {
    record.status = RunStatus::kFailed;
    record.error_code = "INTERNAL";
    record.error_message = e.what();
    store.put_run(record);
  }
  return record;
}

RunRecord run_training_sync(Store& store, const TrainingRequest& request,
                            const EpochCallback& on_epoch) {
  return execute_training(store, request, begin_run(store, request), on_epoch);
}

TrainingManager::~TrainingManager() {
  if (worker_.joinable()) worker_.join();
}

std::string TrainingManager::start(const TrainingRequest& request) {
  std::lock_guard lock(mutex_);
  if (busy_) throw Error(ErrorCode::kRunInProgress, "a training run is already in progress");
  if (worker_.joinable()) worker_.join();
  RunRecord record = begin_run(store_, request);
  const std::string run_id = record.run_id;
  busy_ = true;
  worker_ = std::thread([this, request, record = std::move(record)]() mutable {
    execute_training(store_, request, std::move(record));
    std::lock_guard done_lock(mutex_);
    busy_ = false;
    idle_.notify_all();
  });
  return run_id;
}

bool TrainingManager::busy() const {
  std::lock_guard lock(mutex_);
  return busy_;
}

void TrainingManager::wait() {
  std::unique_lock lock(mutex_);
  idle_.wait(lock, [this] { return !busy_; });
}

}  // namespace wazobia
