#ifndef WAZOBIA_MODEL_FILE_H_
#define WAZOBIA_MODEL_FILE_H_

// Trained-model persistence. A model file is one JSON document:
//
//   format_version   1
//   model_type       "crf" | "bilstm"
//   labels           the seven BIO labels in index order
//   languages        languages seen in training
//   feature_vocab    {feature: index}            (crf)
//   word_vocab       {word: index}, <UNK> = 0    (bilstm)
//   weights          {name: {"shape": [rows, cols], "data": [...]}}, row-major
//   gazetteer        [[TYPE, phrase], ...]
//   hard_bio_constraints
//   created_at       ISO-8601 UTC
//   config           training configuration
//
// Doubles are written in shortest round-trip form, so load(save(m)) restores
// every weight bit for bit.

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "wazobia/tagger.h"
#include "wazobia/train_config.h"

namespace wazobia {

inline constexpr int kModelFormatVersion = 1;

struct ModelFile {
  int format_version = kModelFormatVersion;
  ModelType model_type = ModelType::kCrf;
  std::vector<Language> languages;
  std::string created_at;
  TrainConfig config;
  std::shared_ptr<const Tagger> tagger;
};

nlohmann::json model_to_json(const ModelFile& model);
// Throws BAD_VERSION or CORRUPT_FILE naming the offending field path.
ModelFile model_from_json(const nlohmann::json& doc);

void save_model(const ModelFile& model, const std::filesystem::path& path);
// Throws FILE_NOT_FOUND, BAD_VERSION, CORRUPT_FILE.
ModelFile load_model(const std::filesystem::path& path);

nlohmann::json config_to_json(const TrainConfig& config);
TrainConfig config_from_json(const nlohmann::json& doc);

nlohmann::json epoch_to_json(const RunEpoch& row);
RunEpoch epoch_from_json(const nlohmann::json& doc);

nlohmann::json span_to_json(const EntitySpan& span);
EntitySpan span_from_json(const nlohmann::json& doc);

// Current time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

}  // namespace wazobia

#endif  // WAZOBIA_MODEL_FILE_H_
