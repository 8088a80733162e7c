#ifndef WAZOBIA_TRAINING_H_
#define WAZOBIA_TRAINING_H_

// Training runs: split, build vocabulary, train, evaluate, persist.

#include <condition_variable>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "wazobia/store.h"
#include "wazobia/tagger.h"
#include "wazobia/train_config.h"

namespace wazobia {

struct TrainingRequest {
  std::filesystem::path corpus_path;
  ModelType model_type = ModelType::kCrf;
  TrainConfig config;
  std::optional<std::filesystem::path> gazetteer_path;
  std::optional<std::filesystem::path> embeddings_path;
  bool hard_bio_constraints = false;
};

// Creates and stores a RunRecord in the running state.
RunRecord begin_run(Store& store, const TrainingRequest& request);

// Runs a begun training to completion. The record is re-saved after every
// epoch so readers see history grow. Errors are caught and recorded as
// status=failed with the error code and message; the final record is
// returned either way.
RunRecord execute_training(Store& store, const TrainingRequest& request,
                           RunRecord record, const EpochCallback& on_epoch = {});

// begin_run + execute_training on the calling thread.
RunRecord run_training_sync(Store& store, const TrainingRequest& request,
                            const EpochCallback& on_epoch = {});

// Background runs, at most one at a time.
class TrainingManager {
 public:
  explicit TrainingManager(Store& store) : store_(store) {}
  ~TrainingManager();

  TrainingManager(const TrainingManager&) = delete;
  TrainingManager& operator=(const TrainingManager&) = delete;

  // Returns the new run id once its running record is stored. Throws
  // RUN_IN_PROGRESS while another run is active.
  std::string start(const TrainingRequest& request);
  bool busy() const;
  // Blocks until no run is active.
  void wait();

 private:
  Store& store_;
  mutable std::mutex mutex_;
  std::condition_variable idle_;
  bool busy_ = false;
  std::thread worker_;
};

}  // namespace wazobia

#endif  // WAZOBIA_TRAINING_H_
