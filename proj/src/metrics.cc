#include "wazobia/metrics.h"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "wazobia/error.h"

namespace wazobia {

PRF PRF::from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  PRF r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  r.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  r.f1 = wazobia::f1(r.precision, r.recall);
  return r;
}

double f1(double precision, double recall) {
  if (!(precision >= 0.0 && precision <= 1.0) || !(recall >= 0.0 && recall <= 1.0)) {
    throw Error(ErrorCode::kDomain, "precision and recall must lie in [0, 1]");
  }
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

EntityScores entity_prf(std::span<const std::vector<EntitySpan>> gold,
                        std::span<const std::vector<EntitySpan>> pred) {
  if (gold.size() != pred.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "gold has " + std::to_string(gold.size()) + " sentences, pred " +
                    std::to_string(pred.size()));
  }
  using Key = std::tuple<EntityType, std::size_t, std::size_t>;
  std::map<EntityType, std::array<std::size_t, 3>> counts;  // tp, fp, fn
  for (auto t : kEntityTypes) counts[t] = {0, 0, 0};

  for (std::size_t s = 0; s < gold.size(); ++s) {
    std::multiset<Key> gold_keys;
    for (const auto& g : gold[s]) gold_keys.emplace(g.type, g.start_tok, g.end_tok);
    for (const auto& p : pred[s]) {
      auto it = gold_keys.find(Key{p.type, p.start_tok, p.end_tok});
      if (it != gold_keys.end()) {
        ++counts[p.type][0];
        gold_keys.erase(it);
      } else {
        ++counts[p.type][1];
      }
    }
    for (const auto& [type, b, e] : gold_keys) ++counts[type][2];
  }

  EntityScores out;
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& [type, c] : counts) {
    out.per_type[type] = PRF::from_counts(c[0], c[1], c[2]);
    tp += c[0];
    fp += c[1];
    fn += c[2];
  }
  out.micro = PRF::from_counts(tp, fp, fn);
  return out;
}

TokenAccuracy token_accuracy(std::span<const std::vector<BioLabel>> gold,
                             std::span<const std::vector<BioLabel>> pred) {
  if (gold.size() != pred.size()) {
    throw Error(ErrorCode::kLengthMismatch, "sentence counts differ");
  }
  std::size_t total = 0, correct = 0, entity_total = 0, entity_correct = 0;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != pred[s].size()) {
      throw Error(ErrorCode::kLengthMismatch,
                  "sentence " + std::to_string(s) + " label counts differ");
    }
    for (std::size_t t = 0; t < gold[s].size(); ++t) {
      const bool hit = gold[s][t] == pred[s][t];
      ++total;
      correct += hit ? 1 : 0;
      if (gold[s][t] != BioLabel::kO) {
        ++entity_total;
        entity_correct += hit ? 1 : 0;
      }
    }
  }
  TokenAccuracy acc;
  acc.with_o = total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
  acc.excluding_o = entity_total == 0 ? 0.0
                                      : static_cast<double>(entity_correct) /
                                            static_cast<double>(entity_total);
  return acc;
}

Evaluation evaluate(std::span<const std::vector<BioLabel>> gold,
                    std::span<const std::vector<BioLabel>> pred) {
  Evaluation ev;
  ev.accuracy = token_accuracy(gold, pred);
  std::vector<std::vector<EntitySpan>> gold_spans, pred_spans;
  gold_spans.reserve(gold.size());
  pred_spans.reserve(pred.size());
  for (const auto& g : gold) gold_spans.push_back(decode_bio(g));
  for (const auto& p : pred) pred_spans.push_back(decode_bio(p));
  ev.entities = entity_prf(gold_spans, pred_spans);
  return ev;
}

namespace {

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_real(std::string_view field, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::kBadFormat,
                "history line " + std::to_string(line) + ": bad number '" +
                    std::string(field) + "'");
  }
  return v;
}

}  // namespace

std::string history_to_csv(std::span<const RunEpoch> history) {
  if (history.empty()) throw Error(ErrorCode::kEmptyHistory, "history is empty");
  std::string out(kHistoryCsvHeader);
  out += '\n';
  for (const auto& e : history) {
    out += std::to_string(e.epoch);
    for (double v : {e.training_loss, e.validation_loss, e.precision, e.recall,
                     e.f1, e.accuracy}) {
      out += ',';
      out += format_real(v);
    }
    out += '\n';
  }
  return out;
}

std::vector<RunEpoch> history_from_csv(std::string_view csv) {
  std::vector<RunEpoch> history;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t nl = csv.find('\n', pos);
    if (nl == std::string_view::npos) nl = csv.size();
    std::string_view line = csv.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line_no == 1) {
      if (line != kHistoryCsvHeader) {
        throw Error(ErrorCode::kBadFormat, "history CSV header mismatch");
      }
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 7) {
      throw Error(ErrorCode::kBadFormat,
                  "history line " + std::to_string(line_no) + ": expected 7 fields");
    }
    RunEpoch e;
    e.epoch = static_cast<int>(parse_real(fields[0], line_no));
    e.training_loss = parse_real(fields[1], line_no);
    e.validation_loss = parse_real(fields[2], line_no);
    e.precision = parse_real(fields[3], line_no);
    e.recall = parse_real(fields[4], line_no);
    e.f1 = parse_real(fields[5], line_no);
    e.accuracy = parse_real(fields[6], line_no);
    history.push_back(e);
  }
  if (line_no == 0) throw Error(ErrorCode::kEmptyFile, "history CSV is empty");
  return history;
}

void export_history(std::span<const RunEpoch> history,
                    const std::filesystem::path& path) {
  const std::string csv = history_to_csv(history);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << csv;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

std::vector<RunEpoch> import_history(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return history_from_csv(buf.str());
}

}  // namespace wazobia
