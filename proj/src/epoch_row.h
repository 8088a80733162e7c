#ifndef WAZOBIA_SRC_EPOCH_ROW_H_
#define WAZOBIA_SRC_EPOCH_ROW_H_

#include <span>
#include <vector>

#include "wazobia/metrics.h"

namespace wazobia::internal {

template <typename InstanceT>
RunEpoch epoch_row(int epoch, double training_loss, double validation_loss,
                   std::span<const InstanceT> val,
                   std::span<const std::vector<BioLabel>> predicted) {
  std::vector<std::vector<BioLabel>> gold;
  gold.reserve(val.size());
  for (const auto& inst : val) gold.push_back(inst.gold);
  const Evaluation ev = evaluate(gold, predicted);
  RunEpoch row;
  row.epoch = epoch;
  row.training_loss = training_loss;
  row.validation_loss = validation_loss;
  row.precision = ev.entities.micro.precision;
  row.recall = ev.entities.micro.recall;
  row.f1 = ev.entities.micro.f1;
  row.accuracy = ev.accuracy.with_o;
  return row;
}

}  // namespace wazobia::internal

#endif  // WAZOBIA_SRC_EPOCH_ROW_H_
