#ifndef WAZOBIA_METRICS_H_
#define WAZOBIA_METRICS_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wazobia/text.h"

namespace wazobia {

struct PRF {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  // Precision, recall and F1 from the counts; zero denominators give 0.
  static PRF from_counts(std::size_t tp, std::size_t fp, std::size_t fn);
};

struct EntityScores {
  PRF micro;
  std::map<EntityType, PRF> per_type;
};

// Exact (type, start_tok, end_tok) matching within each sentence, counted
// micro-style. Throws LENGTH_MISMATCH when the sentence counts differ.
EntityScores entity_prf(std::span<const std::vector<EntitySpan>> gold,
                        std::span<const std::vector<EntitySpan>> pred);

struct TokenAccuracy {
  double with_o = 0.0;
  // Over gold non-O positions only; 0 when there are none.
  double excluding_o = 0.0;
};

TokenAccuracy token_accuracy(std::span<const std::vector<BioLabel>> gold,
                             std::span<const std::vector<BioLabel>> pred);

// Harmonic mean; 0 when both are 0. Throws DOMAIN outside [0, 1].
double f1(double precision, double recall);

// One row of a training history.
struct RunEpoch {
  int epoch = 0;
  double training_loss = 0.0;
  double validation_loss = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;

  bool operator==(const RunEpoch&) const = default;
};

inline constexpr std::string_view kHistoryCsvHeader =
    "epoch,training_loss,validation_loss,precision,recall,f1_score,accuracy";

// Header line plus one row per epoch; reals printed with 17 significant
// digits, LF line endings. Throws EMPTY_HISTORY.
std::string history_to_csv(std::span<const RunEpoch> history);
std::vector<RunEpoch> history_from_csv(std::string_view csv);

void export_history(std::span<const RunEpoch> history,
                    const std::filesystem::path& path);
std::vector<RunEpoch> import_history(const std::filesystem::path& path);

// Entity and token scores for a labeled set against predicted labels.
struct Evaluation {
  EntityScores entities;
  TokenAccuracy accuracy;
};

Evaluation evaluate(std::span<const std::vector<BioLabel>> gold,
                    std::span<const std::vector<BioLabel>> pred);

}  // namespace wazobia

#endif  // WAZOBIA_METRICS_H_
