#ifndef WAZOBIA_SERVICE_H_
#define WAZOBIA_SERVICE_H_

// JSON-over-HTTP API. Every error response is {"error_code", "message"}.
//
//   POST /api/tag                   {text, language, model_id?}
//   POST /api/ocr-tag               multipart: image, language, model_id?
//   GET  /api/models
//   POST /api/runs                  {corpus_id | upload, model_type, config?}
//   GET  /api/runs
//   GET  /api/runs/{id}
//   GET  /api/runs/{id}/metrics.csv
//   POST /api/annotations
//   GET  /api/annotations
//
// Requests without a model_id use the most recently created model.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "json.hpp"
#include "wazobia/error.h"
#include "wazobia/model_file.h"
#include "wazobia/ocr.h"
#include "wazobia/store.h"
#include "wazobia/training.h"

// After Eigen: glibc's <resolv.h>, pulled in by httplib, defines a macro
// `_res` that collides with Eigen parameter names.
#include "httplib.h"

namespace wazobia {

struct ServiceOptions {
  std::string ocr_command;
  // Static UI bundle mounted at "/", when set.
  std::optional<std::filesystem::path> ui_dir;
  // corpus_id "mini" resolves here; other ids to <root>/corpora/<id>.tsv.
  std::optional<std::filesystem::path> bundled_corpus;
  // Gazetteer used by API-launched runs, when set.
  std::optional<std::filesystem::path> gazetteer;
};

int http_status_for(ErrorCode code);
nlohmann::json error_body(const Error& e);

nlohmann::json tag_result_to_json(const TagResult& result);

class Service {
 public:
  Service(FileStore& store, ServiceOptions options);

  void register_routes(httplib::Server& server);

  TrainingManager& trainer() { return trainer_; }

  // Cached, shared between requests. Empty id selects the newest model.
  // Throws UNKNOWN_MODEL.
  std::pair<std::string, std::shared_ptr<const ModelFile>> model(const std::string& id);

 private:
  nlohmann::json tag(const std::string& text, Language language, const std::string& model_id);
  std::filesystem::path resolve_corpus(const nlohmann::json& body);

  FileStore& store_;
  ServiceOptions options_;
  OcrAdapter ocr_;
  TrainingManager trainer_;
  std::mutex cache_mutex_;
  std::map<std::string, std::shared_ptr<const ModelFile>> cache_;
};

}  // namespace wazobia

#endif  // WAZOBIA_SERVICE_H_
