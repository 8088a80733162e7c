#include "wazobia/crf.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wazobia/error.h"

namespace wazobia::crf {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_nonempty(const Lattice& lattice) {
  if (lattice.length() == 0) {
    throw Error(ErrorCode::kEmptySequence, "lattice has no positions");
  }
}

}  // namespace

CrfParams CrfParams::zeros(std::size_t feature_count, int label_count) {
  CrfParams p;
  p.emission = Matrix::Zero(static_cast<Eigen::Index>(feature_count), label_count);
  p.transition = Matrix::Zero(label_count, label_count);
  return p;
}

bool CrfParams::all_finite() const {
  return emission.allFinite() && transition.allFinite();
}

double CrfParams::squared_norm() const {
  return emission.squaredNorm() + transition.squaredNorm();
}

Lattice build_lattice(const CrfParams& params,
                      std::span<const FeatureVector> features) {
  const int L = params.label_count();
  Lattice lat;
  lat.node_scores = Matrix::Zero(static_cast<Eigen::Index>(features.size()), L);
  for (std::size_t t = 0; t < features.size(); ++t) {
    auto row = lat.node_scores.row(static_cast<Eigen::Index>(t));
    for (auto f : features[t]) row += params.emission.row(f);
  }
  lat.edge_scores = params.transition;
  return lat;
}

void apply_bio_constraints(Lattice& lattice) {
  for (int to = 0; to < kLabelCount; ++to) {
    const BioLabel to_label = label_from_index(to);
    if (!is_inside(to_label)) continue;
    if (lattice.length() > 0) lattice.node_scores(0, to) = kNegInf;
    for (int from = 0; from < kLabelCount; ++from) {
      if (entity_of(label_from_index(from)) != entity_of(to_label)) {
        lattice.edge_scores(from, to) = kNegInf;
      }
    }
  }
}

double logsumexp(std::span<const double> values) {
  double hi = kNegInf;
  for (double v : values) hi = std::max(hi, v);
  if (hi == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - hi);
  return hi + std::log(sum);
}

ForwardResult log_forward(const Lattice& lattice) {
  require_nonempty(lattice);
  const auto T = static_cast<Eigen::Index>(lattice.length());
  const int L = lattice.label_count();
  ForwardResult r;
  r.alpha.resize(T, L);
  r.alpha.row(0) = lattice.node_scores.row(0);
  std::vector<double> buf(static_cast<std::size_t>(L));
  for (Eigen::Index t = 1; t < T; ++t) {
    for (int j = 0; j < L; ++j) {
      for (int i = 0; i < L; ++i) {
        buf[static_cast<std::size_t>(i)] = r.alpha(t - 1, i) + lattice.edge_scores(i, j);
      }
      r.alpha(t, j) = lattice.node_scores(t, j) + logsumexp(buf);
    }
  }
  for (int j = 0; j < L; ++j) buf[static_cast<std::size_t>(j)] = r.alpha(T - 1, j);
  r.log_z = logsumexp(buf);
  return r;
}

Matrix log_backward(const Lattice& lattice) {
  require_nonempty(lattice);
  const auto T = static_cast<Eigen::Index>(lattice.length());
  const int L = lattice.label_count();
  Matrix beta = Matrix::Zero(T, L);
  std::vector<double> buf(static_cast<std::size_t>(L));
  for (Eigen::Index t = T - 2; t >= 0; --t) {
    for (int i = 0; i < L; ++i) {
      for (int j = 0; j < L; ++j) {
        buf[static_cast<std::size_t>(j)] =
            lattice.edge_scores(i, j) + lattice.node_scores(t + 1, j) + beta(t + 1, j);
      }
      beta(t, i) = logsumexp(buf);
    }
  }
  return beta;
}

Marginals marginals(const Lattice& lattice) {
  const ForwardResult fwd = log_forward(lattice);
  const Matrix beta = log_backward(lattice);
  const auto T = static_cast<Eigen::Index>(lattice.length());
  const int L = lattice.label_count();

  Marginals m;
  m.log_z = fwd.log_z;
  m.node.resize(T, L);
  for (Eigen::Index t = 0; t < T; ++t) {
    for (int l = 0; l < L; ++l) {
      m.node(t, l) = std::exp(fwd.alpha(t, l) + beta(t, l) - fwd.log_z);
    }
  }
  m.edge.reserve(static_cast<std::size_t>(T > 0 ? T - 1 : 0));
  for (Eigen::Index t = 0; t + 1 < T; ++t) {
    Matrix e(L, L);
    for (int i = 0; i < L; ++i) {
      for (int j = 0; j < L; ++j) {
        e(i, j) = std::exp(fwd.alpha(t, i) + lattice.edge_scores(i, j) +
                           lattice.node_scores(t + 1, j) + beta(t + 1, j) - fwd.log_z);
      }
    }
    m.edge.push_back(std::move(e));
  }
  return m;
}

double path_score(const Lattice& lattice, std::span<const int> path) {
  if (path.size() != lattice.length()) {
    throw Error(ErrorCode::kLengthMismatch, "path length differs from lattice");
  }
  if (path.empty()) return 0.0;
  double s = lattice.node_scores(0, path[0]);
  for (std::size_t t = 1; t < path.size(); ++t) {
    s = s + lattice.edge_scores(path[t - 1], path[t]) +
        lattice.node_scores(static_cast<Eigen::Index>(t), path[t]);
  }
  return s;
}

ViterbiResult viterbi(const Lattice& lattice) {
  require_nonempty(lattice);
  const auto T = static_cast<Eigen::Index>(lattice.length());
  const int L = lattice.label_count();
  Matrix delta(T, L);
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> back(T, L);
  delta.row(0) = lattice.node_scores.row(0);
  back.row(0).setZero();
  for (Eigen::Index t = 1; t < T; ++t) {
    for (int j = 0; j < L; ++j) {
      int best_i = 0;
      double best = delta(t - 1, 0) + lattice.edge_scores(0, j);
      for (int i = 1; i < L; ++i) {
        const double v = delta(t - 1, i) + lattice.edge_scores(i, j);
        if (v > best) {
          best = v;
          best_i = i;
        }
      }
      delta(t, j) = best + lattice.node_scores(t, j);
      back(t, j) = best_i;
    }
  }
  int last = 0;
  for (int j = 1; j < L; ++j) {
    if (delta(T - 1, j) > delta(T - 1, last)) last = j;
  }
  ViterbiResult r;
  r.path.assign(static_cast<std::size_t>(T), 0);
  r.path[static_cast<std::size_t>(T - 1)] = last;
  for (Eigen::Index t = T - 1; t > 0; --t) {
    r.path[static_cast<std::size_t>(t - 1)] = back(t, r.path[static_cast<std::size_t>(t)]);
  }
  r.score = path_score(lattice, r.path);
  return r;
}

std::vector<int> to_indices(std::span<const BioLabel> labels) {
  std::vector<int> out;
  out.reserve(labels.size());
  for (auto l : labels) out.push_back(label_index(l));
  return out;
}

std::vector<BioLabel> to_labels(std::span<const int> path) {
  std::vector<BioLabel> out;
  out.reserve(path.size());
  for (int i : path) out.push_back(label_from_index(i));
  return out;
}

LossAndGrad nll_and_grad(const CrfParams& params,
                         std::span<const FeatureVector> features,
                         std::span<const BioLabel> gold, double l2_lambda) {
  if (features.size() != gold.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "gold has " + std::to_string(gold.size()) + " labels for " +
                    std::to_string(features.size()) + " positions");
  }
  const Lattice lat = build_lattice(params, features);
  const Marginals m = marginals(lat);
  const std::vector<int> y = to_indices(gold);

  LossAndGrad out;
  out.loss = m.log_z - path_score(lat, y) + 0.5 * l2_lambda * params.squared_norm();
  out.grad.emission = l2_lambda * params.emission;
  out.grad.transition = l2_lambda * params.transition;

  for (std::size_t t = 0; t < features.size(); ++t) {
    const auto row = static_cast<Eigen::Index>(t);
    for (auto f : features[t]) {
      out.grad.emission.row(f) += m.node.row(row);
      out.grad.emission(f, y[t]) -= 1.0;
    }
  }
  for (std::size_t t = 0; t + 1 < features.size(); ++t) {
    out.grad.transition += m.edge[t];
    out.grad.transition(y[t], y[t + 1]) -= 1.0;
  }
  return out;
}

double nll(const CrfParams& params, std::span<const FeatureVector> features,
           std::span<const BioLabel> gold) {
  if (features.size() != gold.size()) {
    throw Error(ErrorCode::kLengthMismatch, "gold length differs from features");
  }
  const Lattice lat = build_lattice(params, features);
  return log_forward(lat).log_z - path_score(lat, to_indices(gold));
}

std::vector<BioLabel> decode(const CrfParams& params,
                             std::span<const FeatureVector> features,
                             bool hard_bio_constraints) {
  if (features.empty()) return {};
  Lattice lat = build_lattice(params, features);
  if (hard_bio_constraints) apply_bio_constraints(lat);
  return to_labels(viterbi(lat).path);
}

std::vector<Instance> make_instances(std::span<const LabeledSentence> corpus,
                                     const FeatureVocab& vocab,
                                     const Gazetteer& gazetteer) {
  std::vector<Instance> out;
  out.reserve(corpus.size());
  for (const auto& ls : corpus) {
    if (ls.labels.size() != ls.sentence.tokens.size()) {
      throw Error(ErrorCode::kLengthMismatch,
                  "sentence " + ls.source_id + " label count differs from tokens");
    }
    out.push_back({featurize(ls.sentence, vocab, gazetteer), ls.labels});
  }
  return out;
}

}  // namespace wazobia::crf
