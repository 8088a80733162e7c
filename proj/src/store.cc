#include "wazobia/store.h"

#include <openssl/evp.h>

#include <algorithm>
#include <boost/uuid/random_generator.hpp>
#include <boost/uuid/uuid_io.hpp>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "wazobia/error.h"
#include "wazobia/unicode.h"

namespace wazobia {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_atomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + path.parent_path().string());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out << content;
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot move " + tmp.string() + " into place");
}

// Ids become path components; only UUID characters are accepted.
bool safe_id(const std::string& id) {
  return !id.empty() && id.size() <= 64 &&
         std::all_of(id.begin(), id.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') ||
                  (c >= 'A' && c <= 'F') || c == '-';
         });
}

json parse_json_file(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kCorruptFile, path.string() + ": " + e.what());
  }
}

json languages_to_json(const std::vector<Language>& langs) {
  json out = json::array();
  for (auto l : langs) out.push_back(std::string(language_name(l)));
  return out;
}

std::vector<Language> languages_from_json(const json& doc) {
  std::vector<Language> out;
  for (const auto& l : doc) out.push_back(parse_language(l.get<std::string>()));
  return out;
}

json summary_to_json(const std::optional<EvalSummary>& s) {
  if (!s) return nullptr;
  return json{{"precision", s->precision},
              {"recall", s->recall},
              {"f1_score", s->f1},
              {"accuracy", s->accuracy},
              {"accuracy_excluding_o", s->accuracy_excluding_o}};
}

std::optional<EvalSummary> summary_from_json(const json& doc) {
  if (doc.is_null()) return std::nullopt;
  EvalSummary s;
  s.precision = doc.at("precision").get<double>();
  s.recall = doc.at("recall").get<double>();
  s.f1 = doc.at("f1_score").get<double>();
  s.accuracy = doc.at("accuracy").get<double>();
  s.accuracy_excluding_o = doc.at("accuracy_excluding_o").get<double>();
  return s;
}

}  // namespace

std::string_view run_status_name(RunStatus status) {
  switch (status) {
    case RunStatus::kRunning: return "running";
    case RunStatus::kDone: return "done";
    case RunStatus::kFailed: return "failed";
  }
  return "failed";
}

RunStatus parse_run_status(std::string_view name) {
  if (name == "running") return RunStatus::kRunning;
  if (name == "done") return RunStatus::kDone;
  if (name == "failed") return RunStatus::kFailed;
  throw Error(ErrorCode::kCorruptFile, "unknown run status '" + std::string(name) + "'");
}

EvalSummary EvalSummary::from(const Evaluation& ev) {
  EvalSummary s;
  s.precision = ev.entities.micro.precision;
  s.recall = ev.entities.micro.recall;
  s.f1 = ev.entities.micro.f1;
  s.accuracy = ev.accuracy.with_o;
  s.accuracy_excluding_o = ev.accuracy.excluding_o;
  return s;
}

json run_to_json(const RunRecord& run) {
  json history = json::array();
  for (const auto& row : run.history) history.push_back(epoch_to_json(row));
  json doc{{"run_id", run.run_id},
           {"model_type", std::string(model_type_name(run.model_type))},
           {"config", config_to_json(run.config)},
           {"history", std::move(history)},
           {"corpus_fingerprint", run.corpus_fingerprint},
           {"status", std::string(run_status_name(run.status))},
           {"created_at", run.created_at},
           {"languages", languages_to_json(run.languages)},
           {"train_scores", summary_to_json(run.train_scores)},
           {"test_scores", summary_to_json(run.test_scores)}};
  if (!run.error_code.empty()) {
    doc["error"] = json{{"error_code", run.error_code}, {"message", run.error_message}};
  } else {
    doc["error"] = nullptr;
  }
  return doc;
}

RunRecord run_from_json(const json& doc) {
  try {
    RunRecord r;
    r.run_id = doc.at("run_id").get<std::string>();
    r.model_type = parse_model_type(doc.at("model_type").get<std::string>());
    r.config = config_from_json(doc.at("config"));
    for (const auto& row : doc.at("history")) r.history.push_back(epoch_from_json(row));
    r.corpus_fingerprint = doc.at("corpus_fingerprint").get<std::string>();
    r.status = parse_run_status(doc.at("status").get<std::string>());
    r.created_at = doc.at("created_at").get<std::string>();
    r.languages = languages_from_json(doc.at("languages"));
    if (const auto& err = doc.at("error"); !err.is_null()) {
      r.error_code = err.at("error_code").get<std::string>();
      r.error_message = err.at("message").get<std::string>();
    }
    r.train_scores = summary_from_json(doc.at("train_scores"));
    r.test_scores = summary_from_json(doc.at("test_scores"));
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kCorruptFile, std::string("run record: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::kCorruptFile, std::string("run record: ") + e.what());
  }
}

std::string_view provenance_name(Provenance p) {
  return p == Provenance::kModelSuggested ? "model_suggested" : "human_corrected";
}

Provenance parse_provenance(std::string_view name) {
  if (name == "model_suggested") return Provenance::kModelSuggested;
  if (name == "human_corrected") return Provenance::kHumanCorrected;
  throw Error(ErrorCode::kInvalidArgument, "unknown provenance '" + std::string(name) + "'");
}

json annotation_to_json(const AnnotationRecord& rec) {
  json spans = json::array();
  for (const auto& s : rec.spans) spans.push_back(span_to_json(s));
  return json{{"record_id", rec.record_id},
              {"text", rec.text},
              {"language", std::string(language_name(rec.language))},
              {"spans", std::move(spans)},
              {"created_at", rec.created_at},
              {"provenance", std::string(provenance_name(rec.provenance))}};
}

AnnotationRecord annotation_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kInvalidArgument, "annotation must be an object");
  AnnotationRecord rec;
  try {
    rec.record_id = doc.value("record_id", std::string());
    rec.text = doc.at("text").get<std::string>();
    rec.language = parse_language(doc.value("language", std::string("unknown")));
    rec.created_at = doc.value("created_at", std::string());
    rec.provenance = parse_provenance(doc.value("provenance", std::string("human_corrected")));
    if (doc.contains("spans")) {
      for (const auto& s : doc.at("spans")) rec.spans.push_back(span_from_json(s));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad annotation: ") + e.what());
  }
  return rec;
}

void validate_annotation(AnnotationRecord& rec) {
  const std::vector<Token> tokens = tokenize(rec.text);
  for (auto& s : rec.spans) {
    if (s.start_tok > s.end_tok || s.end_tok >= tokens.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "span tokens [" + std::to_string(s.start_tok) + ", " +
                      std::to_string(s.end_tok) + "] outside " +
                      std::to_string(tokens.size()) + " tokens");
    }
    if (s.start_char != tokens[s.start_tok].start_char ||
        s.end_char != tokens[s.end_tok].end_char) {
      throw Error(ErrorCode::kInvalidArgument,
                  "span char offsets do not match tokens " + std::to_string(s.start_tok) +
                      ".." + std::to_string(s.end_tok));
    }
    const std::string slice = unicode::substr(rec.text, s.start_char, s.end_char);
    if (s.surface.empty()) {
      s.surface = slice;
    } else if (s.surface != slice) {
      throw Error(ErrorCode::kInvalidArgument, "span surface does not match text");
    }
  }
  encode_bio(rec.spans, tokens.size());  // throws OVERLAPPING_SPANS
}

FileStore::FileStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_ / "runs", ec);
  fs::create_directories(root_ / "annotations", ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create data directory " + root_.string());
}

fs::path FileStore::run_dir(const std::string& run_id) const {
  return root_ / "runs" / run_id;
}

fs::path FileStore::model_path(const std::string& run_id) const {
  return run_dir(run_id) / "model";
}

void FileStore::put_run(const RunRecord& run) {
  if (!safe_id(run.run_id)) throw Error(ErrorCode::kInvalidArgument, "bad run id");
  std::lock_guard lock(write_mutex_);
  write_atomic(run_dir(run.run_id) / "record", run_to_json(run).dump(2) + "\n");
}

std::optional<RunRecord> FileStore::get_run(const std::string& run_id) const {
  if (!safe_id(run_id)) return std::nullopt;
  const fs::path path = run_dir(run_id) / "record";
  if (!fs::exists(path)) return std::nullopt;
  return run_from_json(parse_json_file(path));
}

std::vector<RunRecord> FileStore::list_runs() const {
  std::vector<RunRecord> runs;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(root_ / "runs", ec)) {
    if (!entry.is_directory()) continue;
    if (auto r = get_run(entry.path().filename().string())) runs.push_back(std::move(*r));
  }
  std::sort(runs.begin(), runs.end(), [](const RunRecord& a, const RunRecord& b) {
    return std::tie(a.created_at, a.run_id) < std::tie(b.created_at, b.run_id);
  });
  return runs;
}

void FileStore::put_model(const std::string& run_id, const ModelFile& model) {
  if (!safe_id(run_id)) throw Error(ErrorCode::kInvalidArgument, "bad run id");
  std::lock_guard lock(write_mutex_);
  write_atomic(model_path(run_id), model_to_json(model).dump() + "\n");
}

ModelFile FileStore::get_model(const std::string& model_id) const {
  if (!safe_id(model_id) || !fs::exists(model_path(model_id))) {
    throw Error(ErrorCode::kUnknownModel, "unknown model '" + model_id + "'");
  }
  return load_model(model_path(model_id));
}

std::vector<ModelSummary> FileStore::list_models() const {
  std::vector<ModelSummary> out;
  for (const auto& run : list_runs()) {
    if (run.status != RunStatus::kDone || !fs::exists(model_path(run.run_id))) continue;
    out.push_back({run.run_id, run.model_type, run.created_at, run.languages});
  }
  return out;
}

std::string FileStore::add_annotation(AnnotationRecord rec) {
  validate_annotation(rec);
  rec.record_id = new_uuid();
  rec.created_at = utc_timestamp();
  std::lock_guard lock(write_mutex_);
  write_atomic(root_ / "annotations" / rec.record_id,
               annotation_to_json(rec).dump(2) + "\n");
  return rec.record_id;
}

std::optional<AnnotationRecord> FileStore::get_annotation(const std::string& id) const {
  if (!safe_id(id)) return std::nullopt;
  const fs::path path = root_ / "annotations" / id;
  if (!fs::exists(path)) return std::nullopt;
  try {
    return annotation_from_json(parse_json_file(path));
  } catch (const Error& e) {
    throw Error(ErrorCode::kCorruptFile, path.string() + ": " + e.what());
  }
}

std::vector<AnnotationRecord> FileStore::list_annotations() const {
  std::vector<AnnotationRecord> out;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(root_ / "annotations", ec)) {
    const std::string name = entry.path().filename().string();
    if (!entry.is_regular_file() || !safe_id(name)) continue;
    if (auto rec = get_annotation(name)) out.push_back(std::move(*rec));
  }
  std::sort(out.begin(), out.end(), [](const AnnotationRecord& a, const AnnotationRecord& b) {
    return std::tie(a.created_at, a.record_id) < std::tie(b.created_at, b.record_id);
  });
  return out;
}

std::string new_uuid() {
  thread_local boost::uuids::random_generator gen;
  return boost::uuids::to_string(gen());
}

std::string content_fingerprint(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIo, "SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return "sha256:" + out;
}

std::string file_fingerprint(const fs::path& path) {
  return content_fingerprint(read_file(path));
}

fs::path resolve_data_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("WAZOBIA_DATA_DIR"); env && *env) return env;
  return "wazobia-data";
}

}  // namespace wazobia
