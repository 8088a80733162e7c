#ifndef WAZOBIA_STORE_H_
#define WAZOBIA_STORE_H_

// Run, model and annotation persistence.
//
//   <root>/runs/<run_id>/record      RunRecord (JSON)
//   <root>/runs/<run_id>/model       ModelFile (JSON)
//   <root>/annotations/<record_id>   AnnotationRecord (JSON)
//
// Every write goes to a temporary file that is renamed into place, under one
// writer lock. Readers never see a partial document.

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wazobia/metrics.h"
#include "wazobia/model_file.h"
#include "wazobia/text.h"
#include "wazobia/train_config.h"

namespace wazobia {

enum class RunStatus { kRunning, kDone, kFailed };
std::string_view run_status_name(RunStatus status);
RunStatus parse_run_status(std::string_view name);

struct EvalSummary {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  double accuracy_excluding_o = 0.0;

  static EvalSummary from(const Evaluation& ev);
  bool operator==(const EvalSummary&) const = default;
};

struct RunRecord {
  std::string run_id;
  ModelType model_type = ModelType::kCrf;
  TrainConfig config;
  std::vector<RunEpoch> history;
  std::string corpus_fingerprint;
  RunStatus status = RunStatus::kRunning;
  std::string created_at;
  std::vector<Language> languages;
  std::string error_code;
  std::string error_message;
  std::optional<EvalSummary> train_scores;
  std::optional<EvalSummary> test_scores;

  bool operator==(const RunRecord&) const = default;
};

nlohmann::json run_to_json(const RunRecord& run);
RunRecord run_from_json(const nlohmann::json& doc);

enum class Provenance { kModelSuggested, kHumanCorrected };
std::string_view provenance_name(Provenance p);
Provenance parse_provenance(std::string_view name);

struct AnnotationRecord {
  std::string record_id;
  std::string text;
  Language language = Language::kUnknown;
  std::vector<EntitySpan> spans;
  std::string created_at;
  Provenance provenance = Provenance::kHumanCorrected;

  bool operator==(const AnnotationRecord&) const = default;
};

nlohmann::json annotation_to_json(const AnnotationRecord& rec);
AnnotationRecord annotation_from_json(const nlohmann::json& doc);

// Checks spans against a fresh tokenization of the text: token indices in
// range, char offsets equal to the token offsets, surface equal to the text
// slice (when given) and no overlaps. Fills an empty surface. Throws
// INVALID_ARGUMENT or OVERLAPPING_SPANS.
void validate_annotation(AnnotationRecord& rec);

struct ModelSummary {
  std::string model_id;
  ModelType model_type = ModelType::kCrf;
  std::string created_at;
  std::vector<Language> languages;
};

class Store {
 public:
  virtual ~Store() = default;

  virtual void put_run(const RunRecord& run) = 0;
  virtual std::optional<RunRecord> get_run(const std::string& run_id) const = 0;
  // Oldest first.
  virtual std::vector<RunRecord> list_runs() const = 0;

  virtual void put_model(const std::string& run_id, const ModelFile& model) = 0;
  // Throws UNKNOWN_MODEL when the run has no model.
  virtual ModelFile get_model(const std::string& model_id) const = 0;
  virtual std::vector<ModelSummary> list_models() const = 0;

  // Validates, assigns record_id and created_at, persists; returns the id.
  virtual std::string add_annotation(AnnotationRecord rec) = 0;
  virtual std::optional<AnnotationRecord> get_annotation(const std::string& id) const = 0;
  virtual std::vector<AnnotationRecord> list_annotations() const = 0;
};

class FileStore final : public Store {
 public:
  explicit FileStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path run_dir(const std::string& run_id) const;
  std::filesystem::path model_path(const std::string& run_id) const;

  void put_run(const RunRecord& run) override;
  std::optional<RunRecord> get_run(const std::string& run_id) const override;
  std::vector<RunRecord> list_runs() const override;

  void put_model(const std::string& run_id, const ModelFile& model) override;
  ModelFile get_model(const std::string& model_id) const override;
  std::vector<ModelSummary> list_models() const override;

  std::string add_annotation(AnnotationRecord rec) override;
  std::optional<AnnotationRecord> get_annotation(const std::string& id) const override;
  std::vector<AnnotationRecord> list_annotations() const override;

 private:
  std::filesystem::path root_;
  mutable std::mutex write_mutex_;
};

// Random (version 4) UUID string.
std::string new_uuid();

// "sha256:" followed by the hex SHA-256 of the bytes.
std::string file_fingerprint(const std::filesystem::path& path);
std::string content_fingerprint(std::string_view bytes);

// --data-dir wins, then WAZOBIA_DATA_DIR, then ./wazobia-data.
std::filesystem::path resolve_data_dir(const std::string& flag_value);

}  // namespace wazobia

#endif  // WAZOBIA_STORE_H_
