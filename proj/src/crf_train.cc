#include <cmath>
#include <numeric>

#include "epoch_row.h"
#include "wazobia/crf.h"
#include "wazobia/error.h"
#include "wazobia/kernels.h"
#include "wazobia/rng.h"

namespace wazobia::crf {

TrainResult train(std::span<const LabeledSentence> corpus,
                  std::span<const LabeledSentence> val, const TrainConfig& config,
                  const FeatureVocab& vocab, const Gazetteer& gazetteer,
                  const EpochCallback& on_epoch) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "training corpus is empty");
  if (!vocab.frozen()) {
    throw Error(ErrorCode::kInvalidArgument, "feature vocabulary must be frozen");
  }
  if (config.epochs < 1 || !(config.learning_rate > 0.0) || config.l2_lambda < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid training configuration");
  }

  const std::vector<Instance> train_set = make_instances(corpus, vocab, gazetteer);
  const std::vector<Instance> val_set = make_instances(val, vocab, gazetteer);

  TrainResult result;
  result.params = CrfParams::zeros(vocab.size());
  CrfParams& w = result.params;
  // AdaGrad accumulators.
  Matrix g2_emission = Matrix::Zero(w.emission.rows(), w.emission.cols());
  Matrix g2_transition = Matrix::Zero(w.transition.rows(), w.transition.cols());
  constexpr double kEps = 1e-8;

  SplitMix64 rng(config.seed);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t idx : order) {
      const Instance& inst = train_set[idx];
      if (inst.gold.empty()) continue;
      LossAndGrad lg = nll_and_grad(w, inst.features, inst.gold, config.l2_lambda);
      if (!std::isfinite(lg.loss)) {
        throw Error(ErrorCode::kNonfiniteLoss,
                    "non-finite loss at epoch " + std::to_string(epoch));
      }
      g2_emission += lg.grad.emission.cwiseAbs2();
      g2_transition += lg.grad.transition.cwiseAbs2();
      w.emission.array() -= config.learning_rate * lg.grad.emission.array() /
                            (g2_emission.array().sqrt() + kEps);
      w.transition.array() -= config.learning_rate * lg.grad.transition.array() /
                              (g2_transition.array().sqrt() + kEps);
    }
    if (!w.all_finite()) {
      throw Error(ErrorCode::kNonfiniteLoss,
                  "weights diverged at epoch " + std::to_string(epoch));
    }

    const auto train_losses = kernels::crf_losses(w, train_set, kernels::Exec::kParallel);
    const auto val_losses = kernels::crf_losses(w, val_set, kernels::Exec::kParallel);
    const auto predicted = kernels::crf_decode(w, val_set, kernels::Exec::kParallel);
    const double train_loss = kernels::mean(train_losses);
    const double val_loss = kernels::mean(val_losses);
    if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) {
      throw Error(ErrorCode::kNonfiniteLoss,
                  "non-finite mean loss at epoch " + std::to_string(epoch));
    }
    RunEpoch row = internal::epoch_row<Instance>(epoch, train_loss, val_loss,
                                                 val_set, predicted);
    result.history.push_back(row);
    if (on_epoch) on_epoch(row);
  }
  return result;
}

}  // namespace wazobia::crf
