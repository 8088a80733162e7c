#include <cmath>
#include <numeric>

#include "epoch_row.h"
#include "wazobia/bilstm.h"
#include "wazobia/error.h"
#include "wazobia/kernels.h"

namespace wazobia::bilstm {

TrainResult train(std::span<const LabeledSentence> corpus,
                  std::span<const LabeledSentence> val, const TrainConfig& config,
                  const WordVocab& vocab, const Embeddings* pretrained,
                  const EpochCallback& on_epoch) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "training corpus is empty");
  if (!vocab.frozen()) {
    throw Error(ErrorCode::kInvalidArgument, "word vocabulary must be frozen");
  }
  if (config.epochs < 1 || !(config.learning_rate > 0.0) || config.hidden_dim < 1 ||
      config.embedding_dim < 1 || !(config.clip_norm > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid training configuration");
  }

  const std::vector<Instance> train_set = make_instances(corpus, vocab);
  const std::vector<Instance> val_set = make_instances(val, vocab);

  SplitMix64 rng(config.seed);
  const int dim = pretrained ? static_cast<int>(pretrained->vectors.cols())
                             : config.embedding_dim;
  TrainResult result;
  result.params = BilstmParams::random(vocab.size(), dim, config.hidden_dim, rng);
  BilstmParams& p = result.params;
  if (pretrained) {
    p.embeddings.row(0) = pretrained->vectors.row(0);
    for (std::size_t k = 1; k < vocab.size(); ++k) {
      const std::string& word = vocab.words()[k];
      if (pretrained->vocab.contains(word)) {
        p.embeddings.row(static_cast<Eigen::Index>(k)) =
            pretrained->vectors.row(static_cast<Eigen::Index>(pretrained->vocab.index_of(word)));
      }
    }
  }

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t idx : order) {
      const Instance& inst = train_set[idx];
      if (inst.gold.empty()) continue;
      LossAndGrad lg = loss_and_grad(p, inst.words, inst.gold, config.l2_lambda);
      if (!std::isfinite(lg.loss)) {
        throw Error(ErrorCode::kNonfiniteLoss,
                    "non-finite loss at epoch " + std::to_string(epoch));
      }
      clip_gradient(lg.grad, config.clip_norm);
      sgd_step(p, lg.grad, config.learning_rate);
    }
    if (!p.all_finite()) {
      throw Error(ErrorCode::kNonfiniteLoss,
                  "weights diverged at epoch " + std::to_string(epoch));
    }

    const auto train_losses = kernels::bilstm_losses(p, train_set, kernels::Exec::kParallel);
    const auto val_losses = kernels::bilstm_losses(p, val_set, kernels::Exec::kParallel);
    const auto predicted = kernels::bilstm_predict(p, val_set, kernels::Exec::kParallel);
    RunEpoch row = internal::epoch_row<Instance>(epoch, kernels::mean(train_losses),
                                                 kernels::mean(val_losses), val_set,
                                                 predicted);
    result.history.push_back(row);
    if (on_epoch) on_epoch(row);
  }
  return result;
}

}  // namespace wazobia::bilstm
