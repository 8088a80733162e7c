#ifndef WAZOBIA_CRF_H_
#define WAZOBIA_CRF_H_

// First-order linear-chain CRF. Potentials are log-space scores:
//
//   score(y) = sum_t node[t][y_t] + sum_{t>0} edge[y_{t-1}][y_t]
//   node[t][l] = sum over active features f at t of emission[f][l]
//
// Inference routines accept any label count so they can be checked against
// enumeration on small lattices; the tagger itself always uses the seven
// BIO labels.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "wazobia/corpus.h"
#include "wazobia/features.h"
#include "wazobia/text.h"
#include "wazobia/train_config.h"

namespace wazobia::crf {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct CrfParams {
  Matrix emission;    // F x L
  Matrix transition;  // L x L, from-label row, to-label column

  static CrfParams zeros(std::size_t feature_count, int label_count = kLabelCount);

  std::size_t feature_count() const { return static_cast<std::size_t>(emission.rows()); }
  int label_count() const { return static_cast<int>(transition.rows()); }
  bool all_finite() const;
  double squared_norm() const;
};

struct Lattice {
  Matrix node_scores;  // T x L
  Matrix edge_scores;  // L x L

  std::size_t length() const { return static_cast<std::size_t>(node_scores.rows()); }
  int label_count() const { return static_cast<int>(node_scores.cols()); }
};

Lattice build_lattice(const CrfParams& params,
                      std::span<const FeatureVector> features);

// Masks transitions that BIO forbids (O -> I-X, B-X/I-X -> I-Y with Y != X)
// and I-X at the first position with -inf. Decode-time only.
void apply_bio_constraints(Lattice& lattice);

double logsumexp(std::span<const double> values);

struct ForwardResult {
  double log_z = 0.0;
  Matrix alpha;  // T x L
};

// Throws EMPTY_SEQUENCE for T = 0.
ForwardResult log_forward(const Lattice& lattice);
Matrix log_backward(const Lattice& lattice);

struct Marginals {
  Matrix node;              // T x L
  std::vector<Matrix> edge;  // T-1 matrices, L x L
  double log_z = 0.0;
};

Marginals marginals(const Lattice& lattice);

struct ViterbiResult {
  std::vector<int> path;
  double score = 0.0;
};

// Ties go to the lower label index at every decision.
ViterbiResult viterbi(const Lattice& lattice);

double path_score(const Lattice& lattice, std::span<const int> path);

std::vector<int> to_indices(std::span<const BioLabel> labels);
std::vector<BioLabel> to_labels(std::span<const int> path);

struct LossAndGrad {
  double loss = 0.0;
  CrfParams grad;
};

// loss = log Z - score(gold) + (l2/2) |params|^2, with its exact gradient.
// Throws LENGTH_MISMATCH.
LossAndGrad nll_and_grad(const CrfParams& params,
                         std::span<const FeatureVector> features,
                         std::span<const BioLabel> gold, double l2_lambda);

// Unregularized negative log-likelihood.
double nll(const CrfParams& params, std::span<const FeatureVector> features,
           std::span<const BioLabel> gold);

std::vector<BioLabel> decode(const CrfParams& params,
                             std::span<const FeatureVector> features,
                             bool hard_bio_constraints = false);

// A sentence ready for the CRF: feature vectors per position and gold labels.
struct Instance {
  std::vector<FeatureVector> features;
  std::vector<BioLabel> gold;
};

std::vector<Instance> make_instances(std::span<const LabeledSentence> corpus,
                                     const FeatureVocab& vocab,
                                     const Gazetteer& gazetteer);

struct TrainResult {
  CrfParams params;
  std::vector<RunEpoch> history;
};

// Per-sentence AdaGrad over a seeded shuffle each epoch; one history row per
// epoch with the mean training and validation NLL and the validation scores.
// Throws EMPTY_CORPUS, NONFINITE_LOSS.
TrainResult train(std::span<const LabeledSentence> corpus,
                  std::span<const LabeledSentence> val, const TrainConfig& config,
                  const FeatureVocab& vocab, const Gazetteer& gazetteer,
                  const EpochCallback& on_epoch = {});

}  // namespace wazobia::crf

#endif  // WAZOBIA_CRF_H_
