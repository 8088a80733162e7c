#include "wazobia/model_file.h"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "wazobia/error.h"

namespace wazobia {
namespace {

using nlohmann::json;

[[noreturn]] void corrupt(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kCorruptFile, path + ": " + what);
}

const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) corrupt(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) corrupt(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

template <typename T>
T get_as(const json& value, const std::string& path) {
  try {
    return value.get<T>();
  } catch (const json::exception& e) {
    corrupt(path, e.what());
  }
}

template <typename MatrixT>
json matrix_to_json(const MatrixT& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return json{{"shape", {m.rows(), m.cols()}}, {"data", std::move(data)}};
}

template <typename MatrixT>
MatrixT matrix_from_json(const json& doc, const std::string& path,
                         Eigen::Index rows, Eigen::Index cols) {
  const json& shape = field(doc, "shape", path);
  const json& data = field(doc, "data", path);
  if (!shape.is_array() || shape.size() != 2) corrupt(child(path, "shape"), "expected [rows, cols]");
  const auto r = get_as<Eigen::Index>(shape[0], child(path, "shape[0]"));
  const auto c = get_as<Eigen::Index>(shape[1], child(path, "shape[1]"));
  if ((rows >= 0 && r != rows) || (cols >= 0 && c != cols)) {
    corrupt(child(path, "shape"), "expected " + std::to_string(rows) + "x" +
                                      std::to_string(cols) + ", found " +
                                      std::to_string(r) + "x" + std::to_string(c));
  }
  if (!data.is_array() || data.size() != static_cast<std::size_t>(r * c)) {
    corrupt(child(path, "data"), "expected " + std::to_string(r * c) + " numbers");
  }
  MatrixT m(r, c);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j, ++k) {
      if (!data[k].is_number()) corrupt(child(path, "data") + "[" + std::to_string(k) + "]", "not a number");
      m(i, j) = data[k].get<double>();
    }
  }
  return m;
}

// {name: index} with dense indices 0..n-1, returned in index order.
std::vector<std::string> vocab_from_json(const json& doc, const std::string& path) {
  if (!doc.is_object()) corrupt(path, "expected an object");
  std::vector<std::string> names(doc.size());
  std::vector<bool> seen(doc.size(), false);
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const auto idx = get_as<std::size_t>(it.value(), child(path, it.key()));
    if (idx >= names.size() || seen[idx]) {
      corrupt(child(path, it.key()), "index not dense");
    }
    seen[idx] = true;
    names[idx] = it.key();
  }
  return names;
}

json gazetteer_to_json(const Gazetteer& gaz) {
  json out = json::array();
  for (const auto& [type, phrase] : gaz.list()) {
    out.push_back({std::string(entity_type_name(type)), phrase});
  }
  return out;
}

Gazetteer gazetteer_from_json(const json& doc, const std::string& path) {
  if (!doc.is_array()) corrupt(path, "expected an array");
  Gazetteer gaz;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (!doc[i].is_array() || doc[i].size() != 2) corrupt(p, "expected [TYPE, phrase]");
    auto type = parse_entity_type(get_as<std::string>(doc[i][0], p));
    if (!type) corrupt(p, "unknown entity type");
    gaz.add(*type, get_as<std::string>(doc[i][1], p));
  }
  return gaz;
}

}  // namespace

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json config_to_json(const TrainConfig& c) {
  return json{{"epochs", c.epochs},
              {"learning_rate", c.learning_rate},
              {"l2_lambda", c.l2_lambda},
              {"seed", c.seed},
              {"min_feat_freq", c.min_feat_freq},
              {"embedding_dim", c.embedding_dim},
              {"hidden_dim", c.hidden_dim},
              {"clip_norm", c.clip_norm}};
}

TrainConfig config_from_json(const json& doc) {
  if (!doc.is_object()) corrupt("config", "expected an object");
  TrainConfig c;
  auto read = [&](const char* key, auto& target) {
    if (auto it = doc.find(key); it != doc.end()) {
      target = get_as<std::decay_t<decltype(target)>>(*it, std::string("config.") + key);
    }
  };
  read("epochs", c.epochs);
  read("learning_rate", c.learning_rate);
  read("l2_lambda", c.l2_lambda);
  read("seed", c.seed);
  read("min_feat_freq", c.min_feat_freq);
  read("embedding_dim", c.embedding_dim);
  read("hidden_dim", c.hidden_dim);
  read("clip_norm", c.clip_norm);
  return c;
}

json epoch_to_json(const RunEpoch& r) {
  return json{{"epoch", r.epoch},
              {"training_loss", r.training_loss},
              {"validation_loss", r.validation_loss},
              {"precision", r.precision},
              {"recall", r.recall},
              {"f1_score", r.f1},
              {"accuracy", r.accuracy}};
}

RunEpoch epoch_from_json(const json& doc) {
  RunEpoch r;
  r.epoch = get_as<int>(field(doc, "epoch", "history"), "history.epoch");
  r.training_loss = get_as<double>(field(doc, "training_loss", "history"), "history");
  r.validation_loss = get_as<double>(field(doc, "validation_loss", "history"), "history");
  r.precision = get_as<double>(field(doc, "precision", "history"), "history");
  r.recall = get_as<double>(field(doc, "recall", "history"), "history");
  r.f1 = get_as<double>(field(doc, "f1_score", "history"), "history");
  r.accuracy = get_as<double>(field(doc, "accuracy", "history"), "history");
  return r;
}

json span_to_json(const EntitySpan& s) {
  return json{{"type", std::string(entity_type_name(s.type))},
              {"start_tok", s.start_tok},
              {"end_tok", s.end_tok},
              {"start_char", s.start_char},
              {"end_char", s.end_char},
              {"surface", s.surface}};
}

EntitySpan span_from_json(const json& doc) {
  if (!doc.is_object()) {
    throw Error(ErrorCode::kInvalidArgument, "span must be an object");
  }
  EntitySpan s;
  auto type = parse_entity_type(doc.value("type", std::string()));
  if (!type) throw Error(ErrorCode::kInvalidArgument, "span type must be PER, ORG or LOC");
  s.type = *type;
  try {
    s.start_tok = doc.at("start_tok").get<std::size_t>();
    s.end_tok = doc.at("end_tok").get<std::size_t>();
    s.start_char = doc.value("start_char", std::size_t{0});
    s.end_char = doc.value("end_char", std::size_t{0});
    s.surface = doc.value("surface", std::string());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad span: ") + e.what());
  }
  return s;
}

json model_to_json(const ModelFile& model) {
  if (!model.tagger) throw Error(ErrorCode::kInvalidArgument, "model has no tagger");
  json doc;
  doc["format_version"] = model.format_version;
  doc["model_type"] = std::string(model_type_name(model.tagger->type()));
  json labels = json::array();
  for (int i = 0; i < kLabelCount; ++i) {
    labels.push_back(std::string(label_name(label_from_index(i))));
  }
  doc["labels"] = labels;
  json langs = json::array();
  for (auto l : model.languages) langs.push_back(std::string(language_name(l)));
  doc["languages"] = langs;
  doc["created_at"] = model.created_at;
  doc["config"] = config_to_json(model.config);
  doc["gazetteer"] = gazetteer_to_json(model.tagger->gazetteer());

  if (const auto* crf = dynamic_cast<const CrfTagger*>(model.tagger.get())) {
    json vocab = json::object();
    const auto& names = crf->vocab().names();
    for (std::size_t i = 0; i < names.size(); ++i) vocab[names[i]] = i;
    doc["feature_vocab"] = std::move(vocab);
    doc["weights"] = json{{"emission", matrix_to_json(crf->params().emission)},
                          {"transition", matrix_to_json(crf->params().transition)}};
    doc["hard_bio_constraints"] = crf->hard_bio_constraints();
  } else if (const auto* lstm = dynamic_cast<const BilstmTagger*>(model.tagger.get())) {
    json vocab = json::object();
    const auto& words = lstm->vocab().words();
    for (std::size_t i = 0; i < words.size(); ++i) vocab[words[i]] = i;
    doc["word_vocab"] = std::move(vocab);
    json weights = json::object();
    for (const auto& [name, m] : lstm->params().tensors()) weights[name] = matrix_to_json(*m);
    doc["weights"] = std::move(weights);
    doc["hard_bio_constraints"] = false;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unsupported tagger type");
  }
  return doc;
}

ModelFile model_from_json(const json& doc) {
  if (!doc.is_object()) corrupt("<root>", "expected an object");
  ModelFile m;
  m.format_version = get_as<int>(field(doc, "format_version", ""), "format_version");
  if (m.format_version != kModelFormatVersion) {
    throw Error(ErrorCode::kBadVersion,
                "unsupported format_version " + std::to_string(m.format_version));
  }
  const auto type_name = get_as<std::string>(field(doc, "model_type", ""), "model_type");
  if (type_name != "crf" && type_name != "bilstm") corrupt("model_type", "unknown model type");
  m.model_type = parse_model_type(type_name);

  const json& labels = field(doc, "labels", "");
  if (!labels.is_array() || labels.size() != kLabelCount) corrupt("labels", "expected 7 labels");
  for (int i = 0; i < kLabelCount; ++i) {
    if (get_as<std::string>(labels[static_cast<std::size_t>(i)], "labels") !=
        label_name(label_from_index(i))) {
      corrupt("labels[" + std::to_string(i) + "]", "label order differs");
    }
  }
  const json& langs = field(doc, "languages", "");
  if (!langs.is_array()) corrupt("languages", "expected an array");
  for (const auto& l : langs) {
    try {
      m.languages.push_back(parse_language(get_as<std::string>(l, "languages")));
    } catch (const Error&) {
      corrupt("languages", "unknown language");
    }
  }
  m.created_at = get_as<std::string>(field(doc, "created_at", ""), "created_at");
  m.config = config_from_json(field(doc, "config", ""));
  Gazetteer gaz = gazetteer_from_json(field(doc, "gazetteer", ""), "gazetteer");
  const bool hard = doc.contains("hard_bio_constraints")
                        ? get_as<bool>(doc["hard_bio_constraints"], "hard_bio_constraints")
                        : false;
  const json& weights = field(doc, "weights", "");

  if (m.model_type == ModelType::kCrf) {
    FeatureVocab vocab =
        FeatureVocab::from_names(vocab_from_json(field(doc, "feature_vocab", ""), "feature_vocab"));
    crf::CrfParams p;
    p.emission = matrix_from_json<crf::Matrix>(
        field(weights, "emission", "weights"), "weights.emission",
        static_cast<Eigen::Index>(vocab.size()), kLabelCount);
    p.transition = matrix_from_json<crf::Matrix>(field(weights, "transition", "weights"),
                                                 "weights.transition", kLabelCount, kLabelCount);
    if (!p.all_finite()) corrupt("weights", "non-finite value");
    m.tagger = std::make_shared<CrfTagger>(std::move(p), std::move(vocab), std::move(gaz), hard);
  } else {
    bilstm::WordVocab vocab = bilstm::WordVocab::from_words(
        vocab_from_json(field(doc, "word_vocab", ""), "word_vocab"));
    const auto& emb = field(field(weights, "embeddings", "weights"), "shape", "weights.embeddings");
    if (!emb.is_array() || emb.size() != 2) corrupt("weights.embeddings.shape", "expected [rows, cols]");
    const auto dim = get_as<int>(emb[1], "weights.embeddings.shape[1]");
    const auto& proj = field(field(weights, "projection", "weights"), "shape", "weights.projection");
    if (!proj.is_array() || proj.size() != 2) corrupt("weights.projection.shape", "expected [rows, cols]");
    const auto hidden = get_as<int>(proj[0], "weights.projection.shape[0]") / 2;
    if (dim < 1 || hidden < 1) corrupt("weights", "bad dimensions");
    bilstm::BilstmParams p = bilstm::BilstmParams::zeros(vocab.size(), dim, hidden);
    for (auto& [name, tensor] : p.tensors()) {
      *tensor = matrix_from_json<bilstm::Matrix>(field(weights, name, "weights"),
                                                 "weights." + name, tensor->rows(),
                                                 tensor->cols());
    }
    if (!p.all_finite()) corrupt("weights", "non-finite value");
    m.tagger = std::make_shared<BilstmTagger>(std::move(p), std::move(vocab), std::move(gaz));
  }
  return m;
}

void save_model(const ModelFile& model, const std::filesystem::path& path) {
  const std::string text = model_to_json(model).dump();
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp);
    out << text << '\n';
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot move model into " + path.string());
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kCorruptFile, path.string() + ": " + e.what());
  }
  return model_from_json(doc);
}

}  // namespace wazobia
