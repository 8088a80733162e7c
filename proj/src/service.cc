#include "wazobia/service.h"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "wazobia/metrics.h"
#include "wazobia/tagger.h"

namespace wazobia {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kJson = "application/json; charset=utf-8";

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, const Error& e) {
  send_json(res, http_status_for(e.code()), error_body(e));
}

// Wraps a handler so library errors become structured responses.
template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const json::exception& e) {
      send_error(res, Error(ErrorCode::kInvalidArgument, e.what()));
    } catch (const std::exception& e) {
      send_json(res, 500, json{{"error_code", "INTERNAL"}, {"message", e.what()}});
    }
  };
}

json parse_body(const httplib::Request& req) {
  try {
    json body = json::parse(req.body);
    if (!body.is_object()) throw Error(ErrorCode::kInvalidArgument, "body must be a JSON object");
    return body;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed JSON: ") + e.what());
  }
}

bool safe_name(const std::string& s) {
  return !s.empty() && s.size() <= 128 && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
  });
}

TrainConfig config_for(ModelType type, const json& overrides) {
  const TrainConfig base =
      type == ModelType::kCrf ? TrainConfig::crf_defaults() : TrainConfig::bilstm_defaults();
  if (overrides.is_null()) return base;
  if (!overrides.is_object()) throw Error(ErrorCode::kInvalidArgument, "config must be an object");
  json merged = config_to_json(base);
  merged.update(overrides);
  try {
    return config_from_json(merged);
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidArgument, e.what());
  }
}

json summary_json(const ModelSummary& m) {
  json langs = json::array();
  for (auto l : m.languages) langs.push_back(std::string(language_name(l)));
  return json{{"model_id", m.model_id},
              {"model_type", std::string(model_type_name(m.model_type))},
              {"created_at", m.created_at},
              {"languages", std::move(langs)}};
}

}  // namespace

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownModel:
    case ErrorCode::kUnknownRun:
    case ErrorCode::kUnknownRecord:
    case ErrorCode::kFileNotFound:
      return 404;
    case ErrorCode::kRunInProgress:
    case ErrorCode::kEmptyHistory:
      return 409;
    case ErrorCode::kOcrUnavailable:
      return 503;
    case ErrorCode::kOcrFailed:
      return 502;
    case ErrorCode::kIo:
    case ErrorCode::kCorruptFile:
    case ErrorCode::kBadVersion:
    case ErrorCode::kNonfiniteLoss:
      return 500;
    default:
      return 400;
  }
}

json error_body(const Error& e) {
  return json{{"error_code", std::string(e.code_name())}, {"message", e.what()}};
}

json tag_result_to_json(const TagResult& result) {
  json tokens = json::array();
  for (const auto& t : result.tokens) {
    tokens.push_back({{"text", t.text}, {"start_char", t.start_char}, {"end_char", t.end_char}});
  }
  json entities = json::array();
  for (const auto& s : result.entities) entities.push_back(span_to_json(s));
  return json{{"tokens", std::move(tokens)}, {"entities", std::move(entities)}};
}

Service::Service(FileStore& store, ServiceOptions options)
    : store_(store),
      options_(std::move(options)),
      ocr_(options_.ocr_command),
      trainer_(store) {}

std::pair<std::string, std::shared_ptr<const ModelFile>> Service::model(const std::string& id) {
  std::string key = id;
  if (key.empty()) {
    const auto models = store_.list_models();
    if (models.empty()) throw Error(ErrorCode::kUnknownModel, "no trained model available");
    key = models.back().model_id;
  }
  std::lock_guard lock(cache_mutex_);
  if (auto it = cache_.find(key); it != cache_.end()) return {key, it->second};
  auto loaded = std::make_shared<const ModelFile>(store_.get_model(key));
  cache_.emplace(key, loaded);
  return {key, loaded};
}

json Service::tag(const std::string& text, Language language, const std::string& model_id) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "text is empty");
  }
  auto [id, model] = this->model(model_id);
  json out = tag_result_to_json(tag_text(*model->tagger, text, language));
  out["model_id"] = id;
  out["language"] = std::string(language_name(language));
  return out;
}

fs::path Service::resolve_corpus(const json& body) {
  if (body.contains("upload")) {
    const std::string content = body.at("upload").get<std::string>();
    const fs::path dir = store_.root() / "uploads";
    fs::create_directories(dir);
    const fs::path path = dir / (new_uuid() + ".tsv");
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw Error(ErrorCode::kIo, "cannot store uploaded corpus");
    return path;
  }
  const std::string id = body.value("corpus_id", std::string());
  if (id.empty()) throw Error(ErrorCode::kInvalidArgument, "corpus_id or upload required");
  if (id == "mini" && options_.bundled_corpus) return *options_.bundled_corpus;
  if (!safe_name(id)) throw Error(ErrorCode::kInvalidArgument, "bad corpus_id");
  const fs::path path = store_.root() / "corpora" / (id + ".tsv");
  if (!fs::exists(path)) throw Error(ErrorCode::kFileNotFound, "unknown corpus '" + id + "'");
  return path;
}

void Service::register_routes(httplib::Server& server) {
  server.Post("/api/tag", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    const Language lang = parse_language(body.value("language", std::string("unknown")));
    send_json(res, 200,
              tag(body.value("text", std::string()), lang, body.value("model_id", std::string())));
  }));

  server.Post("/api/ocr-tag", guarded([this](const httplib::Request& req,
                                             httplib::Response& res) {
    if (!req.has_file("image")) throw Error(ErrorCode::kInvalidArgument, "image part required");
    const auto image = req.get_file_value("image");
    const Language lang = parse_language(
        req.has_file("language") ? req.get_file_value("language").content : "unknown");
    const std::string model_id =
        req.has_file("model_id") ? req.get_file_value("model_id").content : "";
    if (!ocr_.configured()) throw Error(ErrorCode::kOcrUnavailable, "no OCR command configured");

    const fs::path dir = store_.root() / "tmp";
    fs::create_directories(dir);
    const fs::path path = dir / new_uuid();
    {
      std::ofstream out(path, std::ios::binary);
      out << image.content;
    }
    std::string text;
    try {
      text = ocr_.extract(path, lang);
    } catch (...) {
      fs::remove(path);
      throw;
    }
    fs::remove(path);
    json out = tag(text, lang, model_id);
    out["extracted_text"] = text;
    send_json(res, 200, out);
  }));

  server.Get("/api/models", guarded([this](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& m : store_.list_models()) out.push_back(summary_json(m));
    send_json(res, 200, out);
  }));

  server.Post("/api/runs", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    TrainingRequest request;
    request.model_type = parse_model_type(body.value("model_type", std::string("crf")));
    request.config = config_for(request.model_type,
                                body.contains("config") ? body.at("config") : json());
    request.hard_bio_constraints = body.value("hard_bio_constraints", false);
    request.gazetteer_path = options_.gazetteer;
    if (trainer_.busy()) {
      throw Error(ErrorCode::kRunInProgress, "a training run is already in progress");
    }
    request.corpus_path = resolve_corpus(body);
    send_json(res, 202, json{{"run_id", trainer_.start(request)}});
  }));

  server.Get("/api/runs", guarded([this](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& r : store_.list_runs()) out.push_back(run_to_json(r));
    send_json(res, 200, out);
  }));

  server.Get(R"(/api/runs/([^/]+))",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               const std::string id = req.matches[1];
               const auto run = store_.get_run(id);
               if (!run) throw Error(ErrorCode::kUnknownRun, "unknown run '" + id + "'");
               send_json(res, 200, run_to_json(*run));
             }));

  server.Get(R"(/api/runs/([^/]+)/metrics\.csv)",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               const std::string id = req.matches[1];
               const auto run = store_.get_run(id);
               if (!run) throw Error(ErrorCode::kUnknownRun, "unknown run '" + id + "'");
               res.status = 200;
               res.set_content(history_to_csv(run->history), "text/csv; charset=utf-8");
             }));

  server.Post("/api/annotations",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                AnnotationRecord rec = annotation_from_json(parse_body(req));
                send_json(res, 201, json{{"record_id", store_.add_annotation(std::move(rec))}});
              }));

  server.Get("/api/annotations", guarded([this](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& a : store_.list_annotations()) out.push_back(annotation_to_json(a));
    send_json(res, 200, out);
  }));

  if (options_.ui_dir) server.set_mount_point("/", options_.ui_dir->string());
}

}  // namespace wazobia
